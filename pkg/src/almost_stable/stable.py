"""Deferred acceptance for instances with incomplete lists."""

from __future__ import annotations

import heapq

from .core import A, B, UNMATCHED, Agent, Matching, PreferenceInstance


def gale_shapley(instance: PreferenceInstance, proposing_side: str = A) -> Matching:
    """Proposer-optimal stable matching.

    Free proposers are served lowest index first, so the run is fully
    deterministic.
    """
    if proposing_side not in (A, B):
        raise ValueError(f"proposing side must be 'A' or 'B', not {proposing_side!r}")
    if proposing_side == A:
        plists, n_prop, n_resp, rrank = instance.prefs_a, instance.n_a, instance.n_b, instance.rank_b
    else:
        plists, n_prop, n_resp, rrank = instance.prefs_b, instance.n_b, instance.n_a, instance.rank_a
    nxt = [0] * (n_prop + 1)
    held = [UNMATCHED] * (n_resp + 1)
    free = [p for p in range(1, n_prop + 1) if plists[p - 1]]
    heapq.heapify(free)
    while free:
        p = heapq.heappop(free)
        lst = plists[p - 1]
        if nxt[p] >= len(lst):
            continue  # exhausted its list, stays single
        r = lst[nxt[p]]
        nxt[p] += 1
        cur = held[r]
        ranks = rrank[r - 1]
        if cur == UNMATCHED:
            held[r] = p
        elif ranks[p] < ranks[cur]:
            held[r] = p
            heapq.heappush(free, cur)
        else:
            heapq.heappush(free, p)
    if proposing_side == A:
        pairs = [(p, r) for r, p in enumerate(held) if p != UNMATCHED]
    else:
        pairs = [(r, p) for r, p in enumerate(held) if p != UNMATCHED]
    return Matching(instance, pairs)


def saturated_set(matching: Matching) -> frozenset[Agent]:
    return frozenset(v for a, b in matching.edges for v in ((A, a), (B, b)))
