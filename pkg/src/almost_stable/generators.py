"""Random instances for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .core import PreferenceInstance, validate_instance
from .reductions import McqInstance, make_mcq


def random_instance(rng: np.random.Generator, n_a: int, n_b: int, max_degree: int, density: float = 0.6) -> PreferenceInstance:
    """Random bipartite instance with strict random preferences.

    Each candidate edge is kept with probability ``density`` unless an
    endpoint already has ``max_degree`` neighbours.
    """
    deg_a = [0] * (n_a + 1)
    deg_b = [0] * (n_b + 1)
    pairs = [(a, b) for a in range(1, n_a + 1) for b in range(1, n_b + 1)]
    rng.shuffle(pairs)
    nbrs_a = [[] for _ in range(n_a + 1)]
    nbrs_b = [[] for _ in range(n_b + 1)]
    for a, b in pairs:
        a, b = int(a), int(b)
        if deg_a[a] < max_degree and deg_b[b] < max_degree and rng.random() < density:
            deg_a[a] += 1
            deg_b[b] += 1
            nbrs_a[a].append(b)
            nbrs_b[b].append(a)
    prefs_a = [[int(x) for x in rng.permutation(nbrs_a[a])] for a in range(1, n_a + 1)]
    prefs_b = [[int(x) for x in rng.permutation(nbrs_b[b])] for b in range(1, n_b + 1)]
    return validate_instance(prefs_a, prefs_b)


def random_mcq(rng: np.random.Generator, k: int, n: int, density: float = 0.5) -> McqInstance:
    parts = [[f"v{i}.{s}" for s in range(1, n + 1)] for i in range(1, k + 1)]
    edges = [
        (u, v)
        for i in range(k)
        for j in range(i + 1, k)
        for u in parts[i]
        for v in parts[j]
        if rng.random() < density
    ]
    return make_mcq(parts, edges)


def planted_regular_mcq(rng: np.random.Generator, k: int, n: int, per_pair: int) -> tuple[McqInstance, tuple[str, ...]]:
    """k-partite instance where every part pair carries a ``per_pair``-regular
    bipartite graph (``per_pair`` edges at each vertex), so every vertex has
    degree ``(k - 1) * per_pair``.  A multicolored clique is planted; it is
    returned with the instance.

    Each pair graph is a union of ``per_pair`` perfect matchings chosen as
    cyclic shifts of a random bijection, with the first shift pinned so the
    planted vertices are matched to each other.
    """
    if not 1 <= per_pair <= n:
        raise ValueError("per_pair must lie in 1..n")
    parts = [[f"v{i}.{s}" for s in range(1, n + 1)] for i in range(1, k + 1)]
    clique = [int(rng.integers(n)) for _ in range(k)]
    edges = []
    for i in range(k):
        for j in range(i + 1, k):
            perm = [int(x) for x in rng.permutation(n)]
            # rotate so that the clique vertex of part i maps to the one of part j
            shift = (perm.index(clique[j]) - clique[i]) % n
            base = [perm[(x + shift) % n] for x in range(n)]
            pair = set()
            for s in range(per_pair):
                for x in range(n):
                    pair.add((x, base[(x + s) % n]))
            for x, y in sorted(pair):
                edges.append((parts[i][x], parts[j][y]))
    mcq = make_mcq(parts, edges, r=(k - 1) * per_pair)
    return mcq, tuple(parts[i][clique[i]] for i in range(k))


def planted_bounded_mcq(
    rng: np.random.Generator, k: int, n: int, m: int, r: int, tries: int = 1000
) -> tuple[McqInstance, tuple[str, ...]]:
    """Exactly ``m`` edges per part pair, every degree at most ``r``, with a
    planted multicolored clique (returned alongside).  Rejection sampling."""
    if r < k - 1 or m < 1:
        raise ValueError("a planted clique needs r >= k - 1 and at least one edge per pair")
    parts = [[f"v{i}.{s}" for s in range(1, n + 1)] for i in range(1, k + 1)]
    for _ in range(tries):
        clique = [int(rng.integers(n)) for _ in range(k)]
        deg = {}
        chosen = {}
        for i in range(k):
            for j in range(i + 1, k):
                edge = (clique[i], clique[j])
                chosen[(i, j)] = [edge]
                for key in ((i, edge[0]), (j, edge[1])):
                    deg[key] = deg.get(key, 0) + 1
        ok = True
        for i in range(k):
            for j in range(i + 1, k):
                cand = [(x, y) for x in range(n) for y in range(n) if (x, y) not in chosen[(i, j)]]
                rng.shuffle(cand)
                for x, y in cand:
                    if len(chosen[(i, j)]) == m:
                        break
                    if deg.get((i, x), 0) < r and deg.get((j, y), 0) < r:
                        chosen[(i, j)].append((int(x), int(y)))
                        deg[(i, x)] = deg.get((i, x), 0) + 1
                        deg[(j, y)] = deg.get((j, y), 0) + 1
                ok = ok and len(chosen[(i, j)]) == m
        if ok and all(v <= r for v in deg.values()):
            edges = [
                (parts[i][x], parts[j][y]) for (i, j), pairs in sorted(chosen.items()) for x, y in sorted(pairs)
            ]
            return make_mcq(parts, edges, r=r), tuple(parts[i][clique[i]] for i in range(k))
    raise ValueError(f"no instance with k={k}, n={n}, m={m}, r={r} found")
