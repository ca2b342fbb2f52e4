"""Almost-stable matchings: exact oracles, a parameterized local-search
solver and gadget generators for hardness constructions."""

from .core import (
    A,
    B,
    UNMATCHED,
    AlternatingStructure,
    Answer,
    Matching,
    PreferenceInstance,
    StructureKind,
    blocking_edges,
    classify_components,
    is_stable,
    symmetric_difference,
    validate_instance,
)
from .errors import AlmostStableError, InputError
from .fpt import LsAsmQuery, solve_derandomized, solve_randomized
from .knapsack import KnapsackInstance, solve_2dkp
from .oracle import enumerate_matchings, oracle_asm, oracle_lsasm
from .stable import gale_shapley, saturated_set
from .usfam import build_lopsided_family, verify_lopsided

__version__ = "0.1.0"

__all__ = [
    "A",
    "B",
    "UNMATCHED",
    "AlmostStableError",
    "AlternatingStructure",
    "Answer",
    "InputError",
    "KnapsackInstance",
    "LsAsmQuery",
    "Matching",
    "PreferenceInstance",
    "StructureKind",
    "blocking_edges",
    "build_lopsided_family",
    "classify_components",
    "enumerate_matchings",
    "gale_shapley",
    "is_stable",
    "oracle_asm",
    "oracle_lsasm",
    "saturated_set",
    "solve_2dkp",
    "solve_derandomized",
    "solve_randomized",
    "symmetric_difference",
    "validate_instance",
    "verify_lopsided",
]
