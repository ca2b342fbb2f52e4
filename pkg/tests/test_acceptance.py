"""Acceptance suite: one test per criterion, each printing a pass/fail line."""

import time
from functools import cache
from itertools import permutations

import numpy as np

from almost_stable.core import Matching, StructureKind, blocking_edges, classify_components, symmetric_difference
from almost_stable.fpt import LsAsmQuery, build_families, solve_derandomized, solve_randomized
from almost_stable.generators import planted_bounded_mcq, planted_regular_mcq, random_instance, random_mcq
from almost_stable.knapsack import KnapsackInstance, solve_2dkp
from almost_stable.oracle import oracle_lsasm
from almost_stable.reductions import (
    asm_closed_forms,
    build_asm_reduction,
    build_lsasm_reduction,
    clique_edges,
    embed_clique_asm,
    embed_clique_lsasm,
    extract_clique_lsasm,
    find_clique,
    make_mcq,
    multicolored_cliques,
    pad_mcq,
    two_coloring,
)
from almost_stable.stable import gale_shapley, saturated_set
from almost_stable.usfam import build_lopsided_family, verify_lopsided, verify_separating
from helpers import all_matchings, blocking, stable_matchings


def test_criterion_01_stable_matching_suite(acceptance):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    bad_blocking = bad_saturated = bad_size = small = 0
    for _ in range(500):
        n_a, n_b, d = int(rng.integers(1, 13)), int(rng.integers(1, 13)), int(rng.integers(1, 6))
        inst = random_instance(rng, n_a, n_b, d, float(rng.uniform(0.3, 1.0)))
        ma, mb = gale_shapley(inst, "A"), gale_shapley(inst, "B")
        bad_blocking += bool(blocking(inst, ma.edges)) + bool(blocking(inst, mb.edges))
        bad_saturated += saturated_set(ma) != saturated_set(mb)
        if n_a <= 6 and n_b <= 6:
            small += 1
            bad_size += any(len(m) != len(ma) for m in stable_matchings(inst))
    elapsed = time.perf_counter() - start
    ok = not (bad_blocking or bad_saturated or bad_size) and elapsed < 10
    acceptance(
        1, ok,
        f"500 instances ({small} brute-forced): blocking={bad_blocking} saturated-mismatch={bad_saturated} "
        f"size-mismatch={bad_size} time={elapsed:.2f}s",
    )
    assert ok


def _asm_counts(art):
    return (
        art.instance.n_agents,
        len(art.mu),
        art.t,
        len(art.mu) + art.t == art.instance.n_agents / 2,
        not blocking_edges(art.instance, art.mu),
        two_coloring(art.instance) is not None,
    )


def test_criterion_02_asm_counts(acceptance):
    start = time.perf_counter()
    mcq, _ = planted_bounded_mcq(np.random.default_rng(2), 2, 4, 4, 2)
    two = _asm_counts(build_asm_reduction(mcq, r=2))
    # 3 parts, each vertex of degree 2 (one edge to each other part), edge sets padded to 8
    mcq3, _ = planted_regular_mcq(np.random.default_rng(3), 3, 4, 1)
    art3 = build_asm_reduction(pad_mcq(mcq3, m_target=8), strict=True)
    three = _asm_counts(art3)
    forms3 = asm_closed_forms(3, 4, 8, 2)
    elapsed = time.perf_counter() - start
    ok = (
        two == (86, 40, 3, True, True, True)
        and three == (forms3["vertices"], forms3["mu"], 6, True, True, True)
        and elapsed < 1
    )
    acceptance(
        2, ok,
        f"k=2: |V|={two[0]} |mu|={two[1]} t={two[2]}; k=3 (n=4,m=8,r=2): |V|={three[0]} |mu|={three[1]} "
        f"t={three[2]}; stable+bipartite+perfect={all(two[3:]) and all(three[3:])} time={elapsed:.3f}s",
    )
    assert ok


def test_criterion_03_asm_embedding_census(acceptance):
    start = time.perf_counter()
    details = []
    ok = True
    for seed in range(10):
        mcq, clique = planted_bounded_mcq(np.random.default_rng(seed), 2, 4, 4, 2)
        art = build_asm_reduction(mcq, r=2)
        for x in multicolored_cliques(mcq):
            eta = embed_clique_asm(art, x)
            got = blocking_edges(art.instance, eta)
            static = {art.edge(f"u:{v}#1", f"u:{v}#2") for v in x}
            static |= {art.edge(*art.edge_map[e.name]) for e in clique_edges(mcq, x)}
            sd = symmetric_difference(art.mu, eta)[1]
            ok &= len(got) == 3 and got == static and sd == 29 == art.embedded_q and len(eta) == 43
            details.append(sd)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1
    acceptance(
        3, ok,
        f"{len(details)} embedded cliques: 3 static blocking edges each, |mu^eta| in {sorted(set(details))} "
        f"(formula 29) time={elapsed:.3f}s",
    )
    assert ok


def test_criterion_04_lsasm_counts(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(4)
    ok = True
    checked = 0
    first = None
    for _ in range(20):
        parts = [["a", "b", "c"], ["x", "y", "z"]]
        pairs = [(u, v) for u in parts[0] for v in parts[1]]
        idx = rng.choice(len(pairs), size=2, replace=False)
        mcq = make_mcq(parts, [pairs[int(i)] for i in idx])
        art = build_lsasm_reduction(mcq)
        counts = (art.instance.n_agents, len(art.mu), art.q, art.t)
        ok &= counts == (34, 14, 13, 3) and not blocking_edges(art.instance, art.mu)
        ok &= two_coloring(art.instance) is not None
        for x in multicolored_cliques(mcq):
            eta = embed_clique_lsasm(art, x)
            measured = (len(eta), symmetric_difference(art.mu, eta)[1], len(blocking_edges(art.instance, eta)))
            first = first or measured
            ok &= measured == (17, 13, 3)
            ok &= extract_clique_lsasm(art, eta) == (list(x), [e.name for e in clique_edges(mcq, x)])
            checked += 1
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1
    acceptance(
        4, ok,
        f"|V|=34 |mu|=14 q=13 t=3; {checked} planted cliques with (|eta|, |mu^eta|, blocking)={first}, "
        f"round trip exact; time={elapsed:.3f}s",
    )
    assert ok


def _bipartite_classes(n=4):
    """One representative edge set per isomorphism class of subgraphs of K_{n,n}
    under independent row and column permutations."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    perms = list(permutations(range(n)))
    seen = set()
    reps = []
    for bits in range(1 << len(cells)):
        rows = [tuple((bits >> (i * n + j)) & 1 for j in range(n)) for i in range(n)]
        canon = min(tuple(sorted(tuple(r[p[j]] for j in range(n)) for r in rows)) for p in perms)
        if canon not in seen:
            seen.add(canon)
            reps.append([cells[c] for c in range(len(cells)) if (bits >> c) & 1])
    return reps


def _equivalent(mcq):
    art = build_lsasm_reduction(mcq)
    ans = oracle_lsasm(art.instance, art.mu, art.k_prime, art.q, art.t)
    return ans.yes == (find_clique(mcq) is not None), ans.yes


def test_criterion_05_end_to_end_equivalence(acceptance):
    start = time.perf_counter()
    parts = [[f"a{i}" for i in range(4)], [f"b{i}" for i in range(4)]]
    classes = _bipartite_classes()
    agree = yes = 0
    for cells in classes:
        same, ans = _equivalent(make_mcq(parts, [(parts[0][i], parts[1][j]) for i, j in cells]))
        agree += same
        yes += ans
    rng = np.random.default_rng(5)
    for _ in range(50):
        mcq = random_mcq(rng, 2, int(rng.integers(1, 5)), float(rng.uniform(0.0, 0.6)))
        same, ans = _equivalent(mcq)
        agree += same
        yes += ans
    total = len(classes) + 50
    elapsed = time.perf_counter() - start
    ok = agree == total and elapsed < 300
    acceptance(
        5, ok,
        f"{len(classes)} isomorphism classes of 4x4 part graphs + 50 random: {agree}/{total} agree "
        f"({yes} yes, {total - yes} no) time={elapsed:.1f}s",
    )
    assert ok


class _Observer:
    """Checks every G* handed to it: each component must be a single valid
    alternating path or cycle, and augmenting profiles must cost k_i >= 1."""

    def __init__(self):
        self.rounds = self.stars = self.violations = 0

    def __call__(self, query, gstar, profiles):
        self.rounds += 1
        for star in gstar:
            self.stars += 1
            comps = classify_components(query.instance, query.mu, query.edges_of(star.edge_mask))
            if len(comps) != 1 or not comps[0].structure.valid:
                self.violations += 1
        for prof in profiles:
            if prof.structure.kind is StructureKind.AUGMENTING_PATH and prof.k < 1:
                self.violations += 1


def _certifies(query, eta):
    return (
        len(eta) >= len(query.mu) + query.t
        and symmetric_difference(query.mu, eta)[1] <= query.q
        and len(blocking(query.instance, eta.edges)) <= query.k
    )


@cache
def _criterion6_run():
    rng = np.random.default_rng(606)
    obs = _Observer()
    start = time.perf_counter()
    queries = []
    agree = yes = bad_cert = unverified = 0
    for _ in range(200):
        inst = random_instance(rng, int(rng.integers(1, 7)), int(rng.integers(1, 7)), int(rng.integers(1, 4)))
        mu = gale_shapley(inst)
        k, q, t = int(rng.integers(0, 4)), int(rng.integers(0, 5)), int(rng.integers(0, 3))
        query = LsAsmQuery(inst, mu, k, q, t)
        queries.append(query)
        fams = build_families(query, "random-verified", seed=0)
        unverified += not (verify_separating(fams.vertices) and verify_separating(fams.edges))
        truth = oracle_lsasm(inst, mu, k, q, t)
        ans = solve_derandomized(query, families=fams, observer=obs)
        agree += ans.yes == truth.yes
        yes += truth.yes
        if ans.yes and not _certifies(query, ans.eta):
            bad_cert += 1
    return dict(
        agree=agree, yes=yes, bad_cert=bad_cert, unverified=unverified, obs=obs, queries=queries,
        elapsed=time.perf_counter() - start,
    )


def test_criterion_06_fpt_vs_oracle(acceptance):
    r = _criterion6_run()
    ok = r["agree"] == 200 and r["bad_cert"] == 0 and r["unverified"] == 0 and r["elapsed"] < 600
    acceptance(
        6, ok,
        f"200 queries ({r['yes']} yes / {200 - r['yes']} no): agree={r['agree']} bad certificates={r['bad_cert']} "
        f"unverified families={r['unverified']} time={r['elapsed']:.1f}s",
    )
    assert ok


@cache
def _criterion7_run():
    rng = np.random.default_rng(707)
    queries = []
    while len(queries) < 30:
        inst = random_instance(rng, 6, 6, 2, 0.7)
        if inst.max_degree != 2:
            continue
        mu = gale_shapley(inst)
        k = int(rng.integers(1, 4))
        if oracle_lsasm(inst, mu, k, 3, 1):
            queries.append(LsAsmQuery(inst, mu, k, 3, 1))
    obs = _Observer()
    start = time.perf_counter()
    rates = []
    bad_cert = 0
    capped = 0
    for query in queries:
        hits = 0
        for seed in range(100):
            ans = solve_randomized(query, seed=seed, observer=obs)
            hits += ans.yes
            capped += ans.stats["repetitions_budget"] < ans.stats["repetitions_formula"]
            if ans.yes and not _certifies(query, ans.eta):
                bad_cert += 1
        rates.append(hits / 100)
    return dict(rates=rates, bad_cert=bad_cert, capped=capped, obs=obs, elapsed=time.perf_counter() - start)


def test_criterion_07_randomized_success(acceptance):
    r = _criterion7_run()
    worst = min(r["rates"])
    ok = worst >= 0.99 and r["bad_cert"] == 0 and r["elapsed"] < 600
    acceptance(
        7, ok,
        f"30 yes-queries x 100 seeds: worst success rate={worst:.2f} mean={np.mean(r['rates']):.3f} "
        f"(budget capped at 100000 in {r['capped']} runs) time={r['elapsed']:.1f}s",
    )
    assert ok


def _subset_feasible(items, c1, c2, p):
    n = len(items)
    if n == 0:
        return p <= 0
    arr = np.array(items, dtype=np.int64)
    subsets = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    sums = subsets @ arr
    return bool(((sums[:, 0] <= c1) & (sums[:, 1] <= c2) & (sums[:, 2] >= p)).any())


def test_criterion_08_knapsack(acceptance):
    rng = np.random.default_rng(808)
    start = time.perf_counter()
    agree = yes = invalid = 0
    for _ in range(1000):
        n = int(rng.integers(0, 16))
        items = [tuple(int(v) for v in rng.integers(0, [9, 9, 6])) for _ in range(n)]
        c1, c2 = int(rng.integers(0, 21)), int(rng.integers(0, 21))
        p = int(rng.integers(0, 3 * n + 2))
        z = solve_2dkp(KnapsackInstance.of(items, c1, c2, p))
        expect = _subset_feasible(items, c1, c2, p)
        agree += (z is not None) == expect
        yes += expect
        if z is not None:
            chosen = [items[i - 1] for i in z]
            invalid += not (
                sum(c[0] for c in chosen) <= c1 and sum(c[1] for c in chosen) <= c2 and sum(c[2] for c in chosen) >= p
            )
    elapsed = time.perf_counter() - start
    ok = agree == 1000 and invalid == 0 and elapsed < 30
    acceptance(8, ok, f"1000 instances ({yes} feasible): agree={agree} invalid selections={invalid} time={elapsed:.1f}s")
    assert ok


def test_criterion_09_universal_families(acceptance):
    start = time.perf_counter()
    checked = failed = 0
    for n in range(13):
        for p in range(7):
            for q in range(7 - p):
                if p + q > n:
                    continue
                for mode in ("exhaustive", "random-verified"):
                    fam = build_lopsided_family(n, p, q, mode, seed=n * 100 + p * 10 + q)
                    checked += 1
                    failed += not verify_lopsided(fam)[0]
    elapsed = time.perf_counter() - start
    ok = failed == 0 and elapsed < 120
    acceptance(9, ok, f"{checked} families (n<=12, p+q<=6, both modes): failures={failed} time={elapsed:.1f}s")
    assert ok


def test_criterion_10_structural_invariants(acceptance):
    r6, r7 = _criterion6_run(), _criterion7_run()
    violations = r6["obs"].violations + r7["obs"].violations
    stars = r6["obs"].stars + r7["obs"].stars
    # blocking edges of any matching touch an agent whose partner changed
    triples = prop_violations = 0
    for query in r6["queries"]:
        inst, mu = query.instance, query.mu
        for edges in all_matchings(inst):
            eta = Matching(inst, edges)
            for a, b in blocking_edges(inst, eta):
                triples += 1
                if mu.partner("A", a) == eta.partner("A", a) and mu.partner("B", b) == eta.partner("B", b):
                    prop_violations += 1
    ok = violations == 0 and prop_violations == 0 and stars > 0
    acceptance(
        10, ok,
        f"{stars} G* components checked, {violations} violations; {triples} (mu, eta, blocking edge) triples, "
        f"{prop_violations} with both partners unchanged",
    )
    assert ok
