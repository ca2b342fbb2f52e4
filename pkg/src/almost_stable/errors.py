"""Exception hierarchy shared by all modules."""


class AlmostStableError(Exception):
    """Base class for every error raised by this package."""


class InputError(AlmostStableError, ValueError):
    """Malformed or inconsistent user input."""


class NonMutualPreference(InputError):
    pass


class DuplicateEntry(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class InvalidMatching(InputError):
    pass


class ParseError(InputError):
    pass


class MuNotStable(InputError):
    pass


class InvalidParameters(InputError):
    pass


class BudgetOverflow(AlmostStableError):
    pass


class VerificationFailed(AlmostStableError):
    pass


class TooLargeToVerify(AlmostStableError):
    pass


class FamilyTooLarge(AlmostStableError):
    pass


class InstanceTooLarge(AlmostStableError):
    pass


class AssemblyInvariantViolation(AlmostStableError):
    """A re-checked postcondition of the assembled matching failed."""


class NotRegular(InputError):
    pass


class NotPadded(InputError):
    pass


class NotAClique(InputError):
    pass
