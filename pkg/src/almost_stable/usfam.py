"""Lopsided universal families.

A family over ``[n]`` is (n, p, q)-lopsided universal when every p-set ``A``
and every q-set ``B`` disjoint from it are separated by some member ``F``
(``A`` inside ``F``, ``B`` outside).  Members are stored as bit masks where
bit ``i - 1`` stands for element ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import FamilyTooLarge, InvalidParameters, TooLargeToVerify, VerificationFailed

MODES = ("exhaustive", "random-verified", "random-unverified")
EXHAUSTIVE_MAX_N = 20
DEFAULT_VERIFY_CAP = 10**7
DEFAULT_MAX_SETS = 2_000_000
DEFAULT_RETRIES = 20


def mask_of(elements) -> int:
    out = 0
    for x in elements:
        out |= 1 << (x - 1)
    return out


def elements_of(mask: int) -> frozenset[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class LopsidedFamily:
    n: int
    p: int
    q: int
    masks: tuple[int, ...]
    mode: str = "given"
    seed: int | None = None
    sampling_budget: int | None = None
    attempts: int = 1
    verified: bool = False

    @classmethod
    def from_sets(cls, n: int, p: int, q: int, sets) -> LopsidedFamily:
        return cls(n, p, q, tuple(mask_of(s) for s in sets))

    @property
    def sets(self) -> list[frozenset[int]]:
        return [elements_of(m) for m in self.masks]

    def __len__(self):
        return len(self.masks)

    @property
    def reference_size(self) -> int:
        """Textbook cardinality C(p+q, p) * ceil(log n), reported only."""
        return math.comb(self.p + self.q, self.p) * max(1, math.ceil(math.log(max(self.n, 2))))


def _check_params(n, p, q):
    for name, v in (("n", n), ("p", p), ("q", q)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise InvalidParameters(f"{name} must be a non-negative integer, got {v!r}")
    if p + q > n:
        raise InvalidParameters(f"p + q = {p + q} exceeds n = {n}")


def sampling_budget(n: int, p: int, q: int) -> int:
    """Number of random sets drawn: C(p+q,p) * (p+q) * ceil(ln(C(n,p) C(n-p,q)))."""
    pairs = math.comb(n, p) * math.comb(n - p, q)
    budget = math.comb(p + q, p) * (p + q) * math.ceil(math.log(pairs)) if pairs > 1 else 0
    return max(1, budget)


def _rows_to_masks(bits: np.ndarray) -> list[int]:
    n = bits.shape[1]
    if n == 0:
        return [0] * bits.shape[0]
    out = np.zeros(bits.shape[0], dtype=object)
    for start in range(0, n, 62):
        chunk = bits[:, start : start + 62].astype(np.int64)
        weights = np.left_shift(np.int64(1), np.arange(chunk.shape[1], dtype=np.int64))
        vals = chunk @ weights
        out = out + np.array([int(v) << start for v in vals], dtype=object)
    return [int(v) for v in out]


def _sample(n, p, q, budget, seed, attempt) -> tuple[int, ...]:
    rng = np.random.default_rng([seed, attempt])
    prob = p / (p + q) if p + q else 0.0
    bits = rng.random((budget, n)) < prob
    # duplicates carry no information; keep first occurrences in draw order
    return tuple(dict.fromkeys(_rows_to_masks(bits)))


def build_lopsided_family(
    n: int,
    p: int,
    q: int,
    mode: str = "random-verified",
    seed: int = 0,
    retries: int = DEFAULT_RETRIES,
    max_sets: int = DEFAULT_MAX_SETS,
    verify_cap: int = DEFAULT_VERIFY_CAP,
) -> LopsidedFamily:
    _check_params(n, p, q)
    if mode not in MODES:
        raise InvalidParameters(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if mode == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise InvalidParameters(f"exhaustive mode needs n <= {EXHAUSTIVE_MAX_N}")
        if 1 << n > max_sets:
            raise FamilyTooLarge(f"2^{n} sets exceed the limit of {max_sets}")
        return LopsidedFamily(n, p, q, tuple(range(1 << n)), mode, None, None, 1, True)
    budget = sampling_budget(n, p, q)
    if budget > max_sets:
        raise FamilyTooLarge(f"sampling budget {budget} exceeds the limit of {max_sets}")
    if mode == "random-unverified":
        return LopsidedFamily(n, p, q, _sample(n, p, q, budget, seed, 0), mode, seed, budget)
    for attempt in range(max(1, retries)):
        fam = LopsidedFamily(n, p, q, _sample(n, p, q, budget, seed, attempt), mode, seed, budget, attempt + 1)
        ok, _ = verify_lopsided(fam, verify_cap)
        if ok:
            return LopsidedFamily(n, p, q, fam.masks, mode, seed, budget, attempt + 1, True)
    raise VerificationFailed(f"no universal sample for (n={n}, p={p}, q={q}) after {retries} attempts")


def verify_lopsided(family: LopsidedFamily, cap: int = DEFAULT_VERIFY_CAP):
    """Exhaustively check universality.

    Returns ``(True, None)`` or ``(False, (A, B))`` with the first failing pair
    in lexicographic order of ``A`` then ``B``.
    """
    n, p, q = family.n, family.p, family.q
    _check_params(n, p, q)
    pairs = math.comb(n, p) * math.comb(n - p, q)
    if pairs > cap:
        raise TooLargeToVerify(f"{pairs} (A, B) pairs exceed the cap of {cap}")
    masks = list(family.masks)
    use_np = n <= 63
    fam_arr = np.array(masks, dtype=np.uint64) if use_np else None
    universe = range(1, n + 1)
    for a_set in combinations(universe, p):
        a_mask = mask_of(a_set)
        if use_np:
            cover = fam_arr[(fam_arr & np.uint64(a_mask)) == np.uint64(a_mask)]
        else:
            cover = [f for f in masks if f & a_mask == a_mask]
        rest = [x for x in universe if x not in a_set]
        if len(cover) == 0:
            b_set = tuple(rest[:q])
            return False, (frozenset(a_set), frozenset(b_set))
        if q == 0:
            continue
        b_sets = list(combinations(rest, q))
        if use_np:
            b_arr = np.array([mask_of(b) for b in b_sets], dtype=np.uint64)
            step = max(1, 4_000_000 // max(1, len(cover)))
            for start in range(0, len(b_arr), step):
                block = b_arr[start : start + step]
                ok = ((block[:, None] & cover[None, :]) == 0).any(axis=1)
                if not ok.all():
                    b_set = b_sets[start + int(np.argmin(ok))]
                    return False, (frozenset(a_set), frozenset(b_set))
        else:
            for b_set in b_sets:
                b_mask = mask_of(b_set)
                if not any(f & b_mask == 0 for f in cover):
                    return False, (frozenset(a_set), frozenset(b_set))
    return True, None


def separating_requirements(n: int, p: int, q: int) -> tuple[tuple[int, int, int], ...]:
    """Exact-size requirements that together separate every disjoint pair
    with ``|A| <= p``, ``|B| <= q``.

    When ``p + q <= n`` one (n, p, q) family suffices, since smaller pairs
    extend to full-size ones.  Otherwise every maximal pair fills the whole
    universe, so the requirements are the (n, a, n - a) layers.
    """
    if p + q <= n:
        return ((n, p, q),)
    return tuple((n, a, n - a) for a in range(max(0, n - q), min(p, n) + 1))


@dataclass(frozen=True)
class SeparatingFamily:
    n: int
    p: int
    q: int
    masks: tuple[int, ...]
    requirements: tuple[tuple[int, int, int], ...]
    mode: str
    parts: tuple[LopsidedFamily, ...] = field(default=(), repr=False)

    def __len__(self):
        return len(self.masks)

    @property
    def sets(self) -> list[frozenset[int]]:
        return [elements_of(m) for m in self.masks]


def build_separating_family(
    n: int,
    p: int,
    q: int,
    mode: str = "random-verified",
    seed: int = 0,
    max_sets: int = DEFAULT_MAX_SETS,
    verify_cap: int = DEFAULT_VERIFY_CAP,
) -> SeparatingFamily:
    """Family separating all pairs with ``|A| <= p`` and ``|B| <= q`` over ``[n]``.

    Layer requirements (n, a, n - a) admit only one minimal family, the
    a-subsets themselves, so those are generated directly.
    """
    for name, v in (("n", n), ("p", p), ("q", q)):
        if v < 0:
            raise InvalidParameters(f"{name} must be non-negative")
    reqs = separating_requirements(n, p, q)
    if len(reqs) == 1 and reqs[0] == (n, p, q):
        fam = build_lopsided_family(n, p, q, mode, seed, max_sets=max_sets, verify_cap=verify_cap)
        return SeparatingFamily(n, p, q, fam.masks, reqs, mode, (fam,))
    total = sum(math.comb(n, a) for _, a, _ in reqs)
    if total > max_sets:
        raise FamilyTooLarge(f"{total} sets needed for n={n}, p={p}, q={q}; limit is {max_sets}")
    masks = []
    for _, a, _ in reqs:
        masks.extend(mask_of(c) for c in combinations(range(1, n + 1), a))
    return SeparatingFamily(n, p, q, tuple(masks), reqs, "layers")


def verify_separating(family: SeparatingFamily, cap: int = DEFAULT_VERIFY_CAP) -> bool:
    for n, a, b in family.requirements:
        ok, _ = verify_lopsided(LopsidedFamily(n, a, b, family.masks), cap)
        if not ok:
            return False
    return True


def format_family(masks) -> str:
    return "".join(" ".join(map(str, sorted(elements_of(m)))) + "\n" for m in masks)
