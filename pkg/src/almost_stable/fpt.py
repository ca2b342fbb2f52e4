"""Random-separation algorithm for LS-ASM.

One *round* takes a 2-colouring of the agents and of the edges and runs

1. ``phase1``: keep colour-1 agents, drop every component that does not
   contain the reference partner of each of its agents;
2. ``phase2``: keep colour-1 edges, drop every component whose kept edges
   are not a single alternating path or cycle;
3. ``phase3_profiles``: measure each surviving structure (blocking edges it
   causes, edges it flips, size it gains);
4. ``size_fitting``: pick structures with a 2D knapsack;
5. ``assemble_eta``: flip the picked structures and re-check the result.

``solve_randomized`` draws colourings from a hash-based stream and
``solve_derandomized`` walks every pair of members of two separating
families.  Agents are coloured through their vertex ids and edges through
their canonical edge ids, so bit ``i`` of a mask is element ``i + 1`` of the
family universe.
"""

from __future__ import annotations

import hashlib
import math
import struct
import time
from collections.abc import Callable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .core import (
    A,
    B,
    Agent,
    AlternatingStructure,
    Answer,
    Edge,
    Matching,
    PreferenceInstance,
    StructureKind,
    blocking_edges,
    symmetric_difference,
)
from .errors import AssemblyInvariantViolation, FamilyTooLarge, InvalidMatching, InvalidParameters, MuNotStable
from .knapsack import KnapsackInstance, solve_2dkp
from .usfam import DEFAULT_MAX_SETS, SeparatingFamily, build_separating_family

DEFAULT_DELTA = 0.01
DEFAULT_REPETITION_CAP = 100_000
REPETITION_CAP_CAVEAT = "RepetitionCapExceeded"


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class LsAsmQuery:
    """An LS-ASM question: beat ``mu`` by ``t`` edges with at most ``k``
    blocking edges while flipping at most ``q`` edges."""

    def __init__(self, instance: PreferenceInstance, mu: Matching, k: int, q: int, t: int):
        for name, v in (("k", k), ("q", q), ("t", t)):
            if v < 0:
                raise InvalidParameters(f"{name} must be non-negative")
        if mu.instance != instance:
            raise InvalidMatching("reference matching belongs to another instance")
        if blocking_edges(instance, mu):
            raise MuNotStable("the reference matching has blocking edges")
        self.instance = instance
        self.mu = mu
        self.k, self.q, self.t = k, q, t
        self.d = instance.max_degree
        self.n = instance.n_agents
        self.m = instance.m
        self.adj = instance.adjacency
        self.vrank = instance.vrank
        self.mate = mu.mate
        self.ends = instance.edge_vids
        self.inc = instance.incident_edges
        self.nbr_mask = tuple(sum(1 << w for w in nbrs) for nbrs in self.adj)
        self.is_mu = tuple(self.mate[u] == v for u, v in self.ends)

    def __repr__(self):
        return f"LsAsmQuery({self.instance!r}, |mu|={len(self.mu)}, k={self.k}, q={self.q}, t={self.t})"

    def edges_inside(self, vmask: int) -> int:
        out = 0
        for v in _bits(vmask):
            for e in self.inc[v]:
                u, w = self.ends[e]
                if (vmask >> u) & 1 and (vmask >> w) & 1:
                    out |= 1 << e
        return out

    def agents_of(self, vmask: int) -> frozenset[Agent]:
        return frozenset(self.instance.agent(v) for v in _bits(vmask))

    def edges_of(self, emask: int) -> frozenset[Edge]:
        return frozenset(self.instance.edges[e] for e in _bits(emask))


@dataclass(frozen=True)
class SeparationColoring:
    """Colour-1 agents and edges as bit masks over vertex ids / edge ids."""

    vertex_mask: int
    edge_mask: int = 0

    @classmethod
    def from_colors(
        cls, query: LsAsmQuery, vertex_color: Mapping[Agent, int], edge_color: Mapping[Edge, int] | None = None
    ) -> SeparationColoring:
        inst = query.instance
        vmask = sum(1 << inst.vid(side, i) for (side, i), c in vertex_color.items() if c == 1)
        emask = sum(1 << inst.edge_index[e] for e, c in (edge_color or {}).items() if c == 1)
        return cls(vmask, emask)

    def vertex_color(self, query: LsAsmQuery) -> dict[Agent, int]:
        return {query.instance.agent(v): 1 if (self.vertex_mask >> v) & 1 else 2 for v in range(query.n)}

    def edge_color(self, query: LsAsmQuery) -> dict[Edge, int]:
        """Colours of the edges of G[V1], the only edges that matter."""
        inside = query.edges_inside(self.vertex_mask)
        return {query.instance.edges[e]: 1 if (self.edge_mask >> e) & 1 else 2 for e in _bits(inside)}


@dataclass(frozen=True)
class Subgraph:
    """G1: surviving components of G[V1], each a vertex mask."""

    components: tuple[int, ...]

    @property
    def vertex_mask(self) -> int:
        out = 0
        for c in self.components:
            out |= c
        return out


@dataclass(frozen=True)
class StarComponent:
    vertex_mask: int
    edge_mask: int
    structure: AlternatingStructure


@dataclass(frozen=True)
class ComponentProfile:
    component_id: int
    k: int
    q: int
    t: int
    structure: AlternatingStructure
    component: StarComponent = field(repr=False)


def phase1(query: LsAsmQuery, coloring: SeparationColoring | int) -> Subgraph:
    """Components of G[V1] that contain the reference partner of each member."""
    rest = coloring.vertex_mask if isinstance(coloring, SeparationColoring) else coloring
    nbr, mate = query.nbr_mask, query.mate
    kept = []
    while rest:
        comp = frontier = rest & -rest
        while frontier:
            grow = 0
            for v in _bits(frontier):
                grow |= nbr[v]
            frontier = grow & rest & ~comp
            comp |= frontier
        rest &= ~comp
        if all(mate[v] < 0 or (comp >> mate[v]) & 1 for v in _bits(comp)):
            kept.append(comp)
    return Subgraph(tuple(kept))


def _structure(query: LsAsmQuery, emask: int) -> AlternatingStructure:
    """Classify a non-empty edge set given as a mask of edge ids."""
    ends, is_mu, mate = query.ends, query.is_mu, query.mate
    deg: dict[int, int] = {}
    mu_deg: dict[int, int] = {}
    links: dict[int, list[int]] = {}
    q = n_mu = 0
    for e in _bits(emask):
        q += 1
        n_mu += is_mu[e]
        u, v = ends[e]
        for x, y in ((u, v), (v, u)):
            deg[x] = deg.get(x, 0) + 1
            mu_deg[x] = mu_deg.get(x, 0) + is_mu[e]
            links.setdefault(x, []).append(y)
    invalid = AlternatingStructure(StructureKind.INVALID, q, n_mu)
    path_ends = []
    for x, dx in deg.items():
        if dx > 2 or (dx == 2 and mu_deg[x] != 1):
            return invalid
        if dx == 1:
            if not mu_deg[x] and mate[x] >= 0:
                return invalid
            path_ends.append(x)
    start = next(iter(deg))
    seen = {start}
    stack = [start]
    while stack:
        for y in links[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(deg):
        return invalid
    if not path_ends:
        return AlternatingStructure(StructureKind.ALTERNATING_CYCLE, q, n_mu)
    if q - 2 * n_mu == 1:
        return AlternatingStructure(StructureKind.AUGMENTING_PATH, q, n_mu)
    return AlternatingStructure(StructureKind.ALTERNATING_PATH, q, n_mu)


def _star_component(query: LsAsmQuery, comp: int, edge_mask: int) -> StarComponent | None:
    kept = query.edges_inside(comp) & edge_mask
    if not kept:
        return None
    structure = _structure(query, kept)
    if not structure.valid:
        return None
    vmask = 0
    for e in _bits(kept):
        u, v = query.ends[e]
        vmask |= (1 << u) | (1 << v)
    return StarComponent(vmask, kept, structure)


def phase2(query: LsAsmQuery, g1: Subgraph, coloring: SeparationColoring | int) -> tuple[StarComponent, ...]:
    """G*: one alternating path or cycle per surviving component of G1."""
    edge_mask = coloring.edge_mask if isinstance(coloring, SeparationColoring) else coloring
    out = []
    for comp in g1.components:
        star = _star_component(query, comp, edge_mask)
        if star is not None:
            out.append(star)
    return tuple(out)


def _probe_partners(query: LsAsmQuery, star: StarComponent) -> dict[int, int]:
    partner: dict[int, int] = {}
    for e in _bits(star.edge_mask):
        if not query.is_mu[e]:
            u, v = query.ends[e]
            partner[u] = v
            partner[v] = u
    return partner


def probe_matching(query: LsAsmQuery, star: StarComponent) -> Matching:
    """Non-reference edges of the component plus the reference edges of its
    outside neighbours."""
    inst = query.instance
    pairs = {inst.edges[e] for e in _bits(star.edge_mask) if not query.is_mu[e]}
    for u in _bits(star.vertex_mask):
        for x in query.adj[u]:
            if not (star.vertex_mask >> x) & 1 and query.mate[x] >= 0:
                pairs.add(inst.edges[inst.edge_id(x, query.mate[x])])
    return Matching(inst, pairs)


def _incident_blocking(query: LsAsmQuery, star: StarComponent) -> int:
    partner = _probe_partners(query, star)
    vmask = star.vertex_mask
    adj, vrank, mate = query.adj, query.vrank, query.mate
    count = 0
    for u in _bits(vmask):
        pu = partner.get(u, -1)
        ru = vrank[u]
        for x in adj[u]:
            if (vmask >> x) & 1:
                if x < u:
                    continue
                px = partner.get(x, -1)
            else:
                px = mate[x]
            if px == u:
                continue
            if pu >= 0 and ru[x] > ru[pu]:
                continue
            if px >= 0 and vrank[x][u] > vrank[x][px]:
                continue
            count += 1
    return count


def _profile(query: LsAsmQuery, cid: int, star: StarComponent, count_all: bool) -> ComponentProfile:
    if count_all:
        k = len(blocking_edges(query.instance, probe_matching(query, star)))
    else:
        k = _incident_blocking(query, star)
    s = star.structure
    return ComponentProfile(cid, k, s.edge_count, s.gain, s, star)


def phase3_profiles(query: LsAsmQuery, gstar, count_all: bool = False) -> list[ComponentProfile]:
    """Profile ``(k_i, q_i, t_i)`` of every component of G*.

    By default ``k_i`` counts blocking edges of the probe matching that touch
    the component; ``count_all=True`` counts all of them instead.
    """
    return [_profile(query, i, star, count_all) for i, star in enumerate(gstar)]


def size_fitting(profiles, k: int, q: int, t: int) -> tuple[int, ...] | None:
    """Choose augmenting components with total cost within ``(k, q)`` and at
    least ``t`` of them; returns component ids or None."""
    if t == 0:
        return ()
    aug = [p for p in profiles if p.t == 1]
    if len(aug) < t:
        return None
    items = tuple((p.k, p.q, p.t) for p in aug)
    chosen = solve_2dkp(KnapsackInstance(items, k, q, t))
    if chosen is None:
        return None
    return tuple(aug[i - 1].component_id for i in chosen)


def assemble_eta(query: LsAsmQuery, profiles, selection) -> Matching:
    """Flip the selected components of ``mu`` and re-check every guarantee."""
    by_id = {p.component_id: p for p in profiles}
    chosen = [by_id[i] for i in selection]
    inst = query.instance
    inside = 0
    pairs = set()
    for p in chosen:
        inside |= p.component.vertex_mask
        pairs.update(inst.edges[e] for e in _bits(p.component.edge_mask) if not query.is_mu[e])
    for e, (u, v) in enumerate(query.ends):
        if query.is_mu[e] and not (inside >> u) & 1 and not (inside >> v) & 1:
            pairs.add(inst.edges[e])
    try:
        eta = Matching(inst, pairs)
    except InvalidMatching as exc:
        raise AssemblyInvariantViolation(f"assembled edge set is not a matching: {exc}") from exc
    budget = sum(p.k for p in chosen)
    blocking = blocking_edges(inst, eta)
    problems = []
    if len(eta) < len(query.mu) + query.t:
        problems.append(f"size {len(eta)} < {len(query.mu) + query.t}")
    if symmetric_difference(query.mu, eta)[1] > query.q:
        problems.append("symmetric difference exceeds q")
    if len(blocking) > budget or budget > query.k:
        problems.append(f"{len(blocking)} blocking edges against budget {budget} (k={query.k})")
    for a, b in blocking:
        if not (inside >> inst.vid(A, a)) & 1 and not (inside >> inst.vid(B, b)) & 1:
            problems.append(f"blocking edge {(a, b)} away from every selected component")
            break
    if problems:
        raise AssemblyInvariantViolation("; ".join(problems))
    return eta


Observer = Callable[[LsAsmQuery, tuple, list], None]


def run_round(query: LsAsmQuery, coloring: SeparationColoring, observer: Observer | None = None, count_all=False):
    """Phases 1-3 for one colouring; returns a certificate or None."""
    g1 = phase1(query, coloring)
    gstar = phase2(query, g1, coloring)
    profiles = phase3_profiles(query, gstar, count_all)
    if observer is not None:
        observer(query, gstar, profiles)
    selection = size_fitting(profiles, query.k, query.q, query.t)
    if selection is None:
        return None
    return assemble_eta(query, profiles, selection)


def default_repetitions(query: LsAsmQuery, delta: float = DEFAULT_DELTA) -> int:
    """Uncapped budget 2^(3q + 6dq) * ceil(ln(1/delta))."""
    if not 0 < delta < 1:
        raise InvalidParameters("delta must lie strictly between 0 and 1")
    return 2 ** (3 * query.q + 6 * query.d * query.q) * math.ceil(math.log(1 / delta))


def coin_flips(seed: int, rep: int, count: int) -> int:
    """``count`` fair coins for repetition ``rep`` as an integer bit mask.

    Block ``j`` of 512 bits is BLAKE2b(seed, rep, j), so the stream is
    counter based and identical on every platform.
    """
    out = 0
    for block in range((count + 511) // 512):
        digest = hashlib.blake2b(struct.pack("<QQQ", seed & (2**64 - 1), rep, block), digest_size=64).digest()
        out |= int.from_bytes(digest, "little") << (512 * block)
    return out & ((1 << count) - 1)


def repetition_coloring(query: LsAsmQuery, seed: int, rep: int) -> SeparationColoring:
    coins = coin_flips(seed, rep, query.n + query.m)
    return SeparationColoring(coins & ((1 << query.n) - 1), coins >> query.n)


def _scan_repetitions(query, seed, start, stop, observer=None, count_all=False):
    for rep in range(start, stop):
        eta = run_round(query, repetition_coloring(query, seed, rep), observer, count_all)
        if eta is not None:
            return rep, eta
    return None


def _scan_chunk(args):
    instance, mu, k, q, t, seed, start, stop, count_all = args
    found = _scan_repetitions(LsAsmQuery(instance, mu, k, q, t), seed, start, stop, None, count_all)
    return None if found is None else (found[0], sorted(found[1].edges))


def solve_randomized(
    query: LsAsmQuery,
    seed: int = 0,
    repetitions: int | None = None,
    delta: float = DEFAULT_DELTA,
    cap: int = DEFAULT_REPETITION_CAP,
    observer: Observer | None = None,
    count_all: bool = False,
    workers: int = 1,
    chunk: int = 2048,
) -> Answer:
    """Repeat random rounds until a certificate appears.

    A no answer is never certified; if the budget was cut by ``cap`` the
    answer carries the ``RepetitionCapExceeded`` caveat.  With several
    workers the reported certificate is still the one from the lowest
    successful repetition.
    """
    start_time = time.perf_counter()
    full = default_repetitions(query, delta)
    caveats = []
    if repetitions is None:
        repetitions = min(cap, full)
        capped = full > cap
    else:
        if repetitions < 1:
            raise InvalidParameters("repetitions must be at least 1")
        capped = False
    stats = {"repetitions_budget": repetitions, "repetitions_formula": full}
    if query.t == 0:
        stats.update(repetitions_used=1, wall_time=time.perf_counter() - start_time)
        return Answer(True, query.mu, stats)
    if workers > 1 and observer is None:
        found = _parallel_scan(query, seed, repetitions, workers, chunk, count_all)
    else:
        found = _scan_repetitions(query, seed, 0, repetitions, observer, count_all)
    if found is None:
        stats["repetitions_used"] = repetitions
        if capped:
            caveats.append(REPETITION_CAP_CAVEAT)
        stats["wall_time"] = time.perf_counter() - start_time
        return Answer(False, None, stats, caveats)
    rep, eta = found
    stats["repetitions_used"] = rep + 1
    stats["wall_time"] = time.perf_counter() - start_time
    return Answer(True, eta, stats)


def _parallel_scan(query, seed, repetitions, workers, chunk, count_all):
    base = (query.instance, query.mu, query.k, query.q, query.t, seed)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_scan_chunk, base + (s, min(s + chunk, repetitions), count_all))
            for s in range(0, repetitions, chunk)
        ]
        # consumed in chunk order, so the first hit is the lowest repetition
        for fut in futures:
            res = fut.result()
            if res is not None:
                for other in futures:
                    other.cancel()
                return res[0], Matching(query.instance, res[1])
    return None


@dataclass(frozen=True)
class FamilyPair:
    vertices: SeparatingFamily
    edges: SeparatingFamily


def build_families(
    query: LsAsmQuery, mode: str = "random-verified", seed: int = 0, max_sets: int = DEFAULT_MAX_SETS
) -> FamilyPair:
    """Separating families for agents (sizes 2q / 4qd) and edges (q / 2qd)."""
    q, d = query.q, query.d
    try:
        fv = build_separating_family(query.n, 2 * q, 4 * q * d, mode, seed, max_sets=max_sets)
        fe = build_separating_family(query.m, q, 2 * q * d, mode, seed, max_sets=max_sets)
    except FamilyTooLarge as exc:
        raise FamilyTooLarge(f"{exc}; use randomized mode") from exc
    return FamilyPair(fv, fe)


def solve_derandomized(
    query: LsAsmQuery,
    families: FamilyPair | None = None,
    mode: str = "random-verified",
    seed: int = 0,
    max_sets: int = DEFAULT_MAX_SETS,
    observer: Observer | None = None,
    count_all: bool = False,
) -> Answer:
    """Try every (agent set, edge set) pair of the two families in order.

    Pairs whose G1 or whose edge colouring restricted to G1 repeats an
    earlier pair give the same outcome, so they are skipped; per-component
    results are memoised for the same reason.  The reported certificate is
    the one from the first successful pair.
    """
    start_time = time.perf_counter()
    if query.t == 0:
        return Answer(True, query.mu, {"pairs_tried": 0, "wall_time": time.perf_counter() - start_time})
    if families is None:
        families = build_families(query, mode, seed, max_sets)
    fv, fe = families.vertices.masks, families.edges.masks
    stats = {"family_vertices": len(fv), "family_edges": len(fe), "rounds_evaluated": 0}
    seen_g1: set[tuple[int, ...]] = set()
    memo: dict[tuple[int, int], ComponentProfile | None] = {}
    inside_cache: dict[int, int] = {}

    def inside(comp):
        if comp not in inside_cache:
            inside_cache[comp] = query.edges_inside(comp)
        return inside_cache[comp]

    for i, vmask in enumerate(fv):
        g1 = phase1(query, vmask)
        if not g1.components or g1.components in seen_g1:
            continue
        seen_g1.add(g1.components)
        g1_edges = 0
        for comp in g1.components:
            g1_edges |= inside(comp)
        seen_r: set[int] = set()
        for j, emask in enumerate(fe):
            r = emask & g1_edges
            if r in seen_r:
                continue
            seen_r.add(r)
            stats["rounds_evaluated"] += 1
            gstar, profiles = [], []
            for comp in g1.components:
                key = (comp, r & inside(comp))
                if key not in memo:
                    star = _star_component(query, comp, key[1])
                    memo[key] = None if star is None else _profile(query, 0, star, count_all)
                prof = memo[key]
                if prof is not None:
                    profiles.append(
                        ComponentProfile(len(gstar), prof.k, prof.q, prof.t, prof.structure, prof.component)
                    )
                    gstar.append(prof.component)
            if observer is not None:
                observer(query, tuple(gstar), profiles)
            selection = size_fitting(profiles, query.k, query.q, query.t)
            if selection is None:
                continue
            eta = assemble_eta(query, profiles, selection)
            stats["pairs_tried"] = i * len(fe) + j + 1
            stats["wall_time"] = time.perf_counter() - start_time
            return Answer(True, eta, stats)
    stats["pairs_tried"] = len(fv) * len(fe)
    stats["wall_time"] = time.perf_counter() - start_time
    return Answer(False, None, stats)
