"""Independent reference implementations used as test oracles.

Nothing here calls into the package's solvers; these work straight from
the preference lists so that agreement is a genuine cross-check.
"""

from itertools import combinations

import numpy as np

from almost_stable.core import validate_instance
from almost_stable.generators import random_instance


def sample_instance():
    # A1:[B1,B2], A2:[B1], B1:[A2,A1], B2:[A1]
    return validate_instance([[1, 2], [1]], [[2, 1], [1]])


def instance_from_seed(seed, n_a=6, n_b=6, d=3, density=0.6):
    return random_instance(np.random.default_rng(seed), n_a, n_b, d, density)


def all_matchings(inst):
    """Every matching as a frozenset of (a, b), by recursion over A agents."""
    out = []

    def rec(a, used, chosen):
        if a > inst.n_a:
            out.append(frozenset(chosen))
            return
        rec(a + 1, used, chosen)
        for b in inst.prefs_a[a - 1]:
            if b not in used:
                rec(a + 1, used | {b}, chosen + [(a, b)])

    rec(1, frozenset(), [])
    return out


def blocking(inst, edges):
    """Blocking pairs straight from the definition."""
    pa = {a: b for a, b in edges}
    pb = {b: a for a, b in edges}
    out = set()
    for a in range(1, inst.n_a + 1):
        lst = list(inst.prefs_a[a - 1])
        for b in lst:
            if pa.get(a) == b:
                continue
            a_wants = a not in pa or lst.index(b) < lst.index(pa[a])
            blst = list(inst.prefs_b[b - 1])
            b_wants = b not in pb or blst.index(a) < blst.index(pb[b])
            if a_wants and b_wants:
                out.add((a, b))
    return out


def stable_matchings(inst):
    return [m for m in all_matchings(inst) if not blocking(inst, m)]


def knapsack_brute(items, c1, c2, p):
    n = len(items)
    for size in range(n + 1):
        for z in combinations(range(n), size):
            if (
                sum(items[i][0] for i in z) <= c1
                and sum(items[i][1] for i in z) <= c2
                and sum(items[i][2] for i in z) >= p
            ):
                return True
    return False


def is_universal(n, p, q, sets):
    universe = set(range(1, n + 1))
    for a in combinations(sorted(universe), p):
        for b in combinations(sorted(universe - set(a)), q):
            if not any(set(a) <= f and not (set(b) & f) for f in sets):
                return False
    return True
