"""Exact ground truth for ASM and LS-ASM on small instances.

``enumerate_matchings`` lists matchings outright.  The two decision oracles
use a depth-first search over partner assignments that prunes on the
symmetric-difference budget, the blocking-edge budget and a simple size
bound; they are exact but exponential.
"""

from __future__ import annotations

import math
from collections.abc import Iterator

from .core import Answer, Matching, PreferenceInstance, blocking_edges, symmetric_difference
from .errors import InstanceTooLarge, InvalidParameters, MuNotStable
from .stable import gale_shapley

ENUMERATION_MAX_EDGES = 24
SEARCH_MAX_EDGES = 1024

_UNDECIDED = -2
_SINGLE = -1


def _check_size(instance: PreferenceInstance, cap: int):
    if instance.m > cap:
        raise InstanceTooLarge(f"instance has {instance.m} edges; cap is {cap}")


def enumerate_matchings(
    instance: PreferenceInstance,
    within: tuple[Matching, int] | None = None,
    max_edges: int = ENUMERATION_MAX_EDGES,
    restricted: bool = True,
) -> Iterator[Matching]:
    """Yield every matching, or only those within distance ``q`` of ``mu``
    when ``within=(mu, q)`` is given.

    The distance-restricted stream chooses the flipped edge set directly
    (at most ``q`` edges); ``restricted=False`` filters the full stream
    instead, which is only useful to cross-check the former.
    """
    _check_size(instance, max_edges)
    if within is None:
        yield from _all_matchings(instance)
        return
    mu, q = within
    if not restricted:
        for eta in _all_matchings(instance):
            if symmetric_difference(mu, eta)[1] <= q:
                yield eta
        return
    yield from _flip_sets(instance, mu, q)


def _all_matchings(instance: PreferenceInstance) -> Iterator[Matching]:
    edges = instance.edges
    used_a: set[int] = set()
    used_b: set[int] = set()
    chosen: list = []

    def rec(i):
        if i == len(edges):
            yield Matching(instance, chosen)
            return
        yield from rec(i + 1)
        a, b = edges[i]
        if a not in used_a and b not in used_b:
            used_a.add(a)
            used_b.add(b)
            chosen.append((a, b))
            yield from rec(i + 1)
            chosen.pop()
            used_a.discard(a)
            used_b.discard(b)

    yield from rec(0)


def _flip_sets(instance: PreferenceInstance, mu: Matching, q: int) -> Iterator[Matching]:
    edges = instance.edges
    ends = instance.edge_vids
    mate = mu.mate
    # index of the last edge able to lower a vertex's degree: its mu-edge
    last_fix = [-1] * instance.n_agents
    for eid, (u, v) in enumerate(ends):
        if mate[u] == v:
            last_fix[u] = last_fix[v] = eid
    deg = [1 if m >= 0 else 0 for m in mate]
    flipped: list[int] = []

    def feasible_after(i):
        for eid in flipped:
            for w in ends[eid]:
                if deg[w] > 1 and last_fix[w] < i:
                    return False
        return True

    def rec(i):
        if i == len(edges) or len(flipped) == q:
            if all(deg[w] <= 1 for eid in flipped for w in ends[eid]):
                yield Matching(instance, (mu.edges ^ {edges[e] for e in flipped}))
            return
        yield from rec(i + 1)
        u, v = ends[i]
        delta = -1 if mate[u] == v else 1
        deg[u] += delta
        deg[v] += delta
        flipped.append(i)
        if feasible_after(i + 1):
            yield from rec(i + 1)
        flipped.pop()
        deg[u] -= delta
        deg[v] -= delta

    yield from rec(0)


def _search(instance: PreferenceInstance, ref: tuple[int, ...], k: int, q: float, target: int, stats: dict):
    """Depth-first search for a matching with at least ``target`` edges, at
    most ``k`` blocking edges and at most ``q`` edges differing from the
    reference ``ref`` (partner vertex ids, -1 for single).

    Returns the partner array of the first matching found, or None.
    """
    n = instance.n_agents
    n_a = instance.n_a
    adj = instance.adjacency
    vrank = instance.vrank
    dec = [_UNDECIDED] * n
    state = {"size": 0, "sd": 0, "blocks": 0, "und_a": n_a, "und_b": n - n_a}
    nodes = 0

    def blocks_between(v, x):
        # edge v-x with both endpoints decided and not matched together
        pv, px = dec[v], dec[x]
        if pv >= 0 and vrank[v][x] > vrank[v][pv]:
            return False
        if px >= 0 and vrank[x][v] > vrank[x][px]:
            return False
        return True

    def count_blocks(v, skip):
        c = 0
        for x in adj[v]:
            if x != skip and dec[x] != _UNDECIDED and blocks_between(v, x):
                c += 1
        return c

    def side_dec(v, d):
        if v < n_a:
            state["und_a"] += d
        else:
            state["und_b"] += d

    def assign(v, w):
        """Decide v (and w); return the undo record."""
        old = dict(state)
        if w == _SINGLE:
            if ref[v] >= 0 and dec[ref[v]] == _UNDECIDED:
                state["sd"] += 1
            dec[v] = _SINGLE
            side_dec(v, -1)
            state["blocks"] += count_blocks(v, -1)
        else:
            if ref[v] != w:
                state["sd"] += 1
                for x in (v, w):
                    if ref[x] >= 0 and dec[ref[x]] == _UNDECIDED:
                        state["sd"] += 1
            dec[v] = w
            dec[w] = v
            side_dec(v, -1)
            side_dec(w, -1)
            state["size"] += 1
            state["blocks"] += count_blocks(v, w) + count_blocks(w, v)
        return old

    def unassign(v, w, old):
        dec[v] = _UNDECIDED
        if w != _SINGLE:
            dec[w] = _UNDECIDED
        state.update(old)

    def ok():
        return (
            state["sd"] <= q
            and state["blocks"] <= k
            and state["size"] + min(state["und_a"], state["und_b"]) >= target
        )

    def options(v):
        opts = [w for w in adj[v] if dec[w] == _UNDECIDED]
        if ref[v] in opts:
            opts.remove(ref[v])
            opts.insert(0, ref[v])
        side_left = state["und_a"] - 1 if v < n_a else state["und_b"] - 1
        other_left = state["und_b"] if v < n_a else state["und_a"]
        if state["size"] + min(side_left, other_left) >= target:
            opts.append(_SINGLE)
        return opts

    def pick():
        best, best_opts = -1, None
        for v in range(n):
            if dec[v] != _UNDECIDED:
                continue
            opts = options(v)
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = v, opts
                if len(opts) <= 1:
                    break
        return best, best_opts

    def rec():
        nonlocal nodes
        nodes += 1
        v, opts = pick()
        if v < 0:
            return True
        for w in opts:
            old = assign(v, w)
            if ok() and rec():
                return True
            unassign(v, w, old)
        return False

    found = rec()
    stats["nodes"] = stats.get("nodes", 0) + nodes
    return list(dec) if found else None


def _to_matching(instance: PreferenceInstance, dec) -> Matching:
    return Matching(instance, [(instance.agent(v)[1], instance.agent(w)[1]) for v, w in enumerate(dec) if w > v])


def _check_budgets(**kw):
    for name, v in kw.items():
        if v < 0:
            raise InvalidParameters(f"{name} must be non-negative")


def oracle_asm(instance: PreferenceInstance, k: int, t: int, max_edges: int = SEARCH_MAX_EDGES) -> Answer:
    """Is there a matching ``t`` larger than a stable one with at most ``k``
    blocking edges?"""
    _check_budgets(k=k, t=t)
    _check_size(instance, max_edges)
    stable = gale_shapley(instance)
    stats = {"stable_size": len(stable)}
    dec = _search(instance, stable.mate, k, math.inf, len(stable) + t, stats)
    if dec is None:
        return Answer(False, None, stats)
    return Answer(True, _to_matching(instance, dec), stats)


def oracle_lsasm(
    instance: PreferenceInstance, mu: Matching, k: int, q: int, t: int, max_edges: int = SEARCH_MAX_EDGES
) -> Answer:
    """Exact LS-ASM decision with a witness."""
    _check_budgets(k=k, q=q, t=t)
    _check_size(instance, max_edges)
    if blocking_edges(instance, mu):
        raise MuNotStable("the reference matching has blocking edges")
    stats: dict = {}
    if t == 0:
        return Answer(True, mu, stats)
    dec = _search(instance, mu.mate, k, q, len(mu) + t, stats)
    if dec is None:
        return Answer(False, None, stats)
    return Answer(True, _to_matching(instance, dec), stats)


def oracle_lsasm_enumerative(instance: PreferenceInstance, mu: Matching, k: int, q: int, t: int) -> Answer:
    """Same decision by plain enumeration of the distance-q ball around mu."""
    _check_budgets(k=k, q=q, t=t)
    if blocking_edges(instance, mu):
        raise MuNotStable("the reference matching has blocking edges")
    for eta in enumerate_matchings(instance, (mu, q)):
        if len(eta) >= len(mu) + t and len(blocking_edges(instance, eta)) <= k:
            return Answer(True, eta)
    return Answer(False)
