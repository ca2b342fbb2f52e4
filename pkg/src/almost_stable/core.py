"""Preference instances, matchings, blocking edges and alternating structures.

Agents are addressed as ``(side, index)`` with ``side`` in ``{"A", "B"}`` and
1-based indices.  An edge is always written ``(a, b)``: the A-agent first.
Internally agents also get dense 0-based vertex ids (A agents first, then B
agents) which the solvers use for bit masks.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DuplicateEntry, IndexOutOfRange, InvalidMatching, NonMutualPreference

A = "A"
B = "B"
UNMATCHED = 0

Edge = tuple[int, int]
Agent = tuple[str, int]


class PreferenceInstance:
    """A validated two-sided instance with strict, incomplete preference lists.

    Build one with :func:`validate_instance`; the constructor assumes its
    input is already consistent.
    """

    def __init__(self, prefs_a: tuple[tuple[int, ...], ...], prefs_b: tuple[tuple[int, ...], ...]):
        self.prefs_a = prefs_a
        self.prefs_b = prefs_b
        self.n_a = len(prefs_a)
        self.n_b = len(prefs_b)
        self.rank_a = tuple({b: r for r, b in enumerate(lst)} for lst in prefs_a)
        self.rank_b = tuple({a: r for r, a in enumerate(lst)} for lst in prefs_b)
        self.max_degree = max((len(lst) for lst in prefs_a + prefs_b), default=0)
        # canonical edge order: A agents in order, each list in preference order
        self.edges: tuple[Edge, ...] = tuple((a, b) for a in range(1, self.n_a + 1) for b in prefs_a[a - 1])
        self.edge_index = {e: i for i, e in enumerate(self.edges)}

    def __repr__(self):
        return f"PreferenceInstance(n_a={self.n_a}, n_b={self.n_b}, m={len(self.edges)}, d={self.max_degree})"

    def __eq__(self, other):
        if not isinstance(other, PreferenceInstance):
            return NotImplemented
        return self.prefs_a == other.prefs_a and self.prefs_b == other.prefs_b

    def __hash__(self):
        return hash((self.prefs_a, self.prefs_b))

    @property
    def n_agents(self) -> int:
        return self.n_a + self.n_b

    @property
    def m(self) -> int:
        return len(self.edges)

    def prefs(self, side: str, i: int) -> tuple[int, ...]:
        return self.prefs_a[i - 1] if side == A else self.prefs_b[i - 1]

    def rank(self, side: str, i: int, j: int) -> int:
        """Position of ``j`` in the list of agent ``(side, i)``."""
        return self.rank_a[i - 1][j] if side == A else self.rank_b[i - 1][j]

    def prefers(self, side: str, i: int, j: int, than: int) -> bool:
        """True if ``(side, i)`` strictly prefers ``j`` to ``than``.

        ``than`` may be ``UNMATCHED``, which every acceptable partner beats.
        """
        ranks = self.rank_a[i - 1] if side == A else self.rank_b[i - 1]
        if than == UNMATCHED:
            return j in ranks
        return ranks[j] < ranks[than]

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.edge_index

    def vid(self, side: str, i: int) -> int:
        return i - 1 if side == A else self.n_a + i - 1

    def agent(self, vid: int) -> Agent:
        return (A, vid + 1) if vid < self.n_a else (B, vid - self.n_a + 1)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbour vertex ids of every vertex id, in preference order."""
        adj = [tuple(self.n_a + b - 1 for b in lst) for lst in self.prefs_a]
        adj += [tuple(a - 1 for a in lst) for lst in self.prefs_b]
        return tuple(adj)

    @cached_property
    def vrank(self) -> tuple[dict[int, int], ...]:
        return tuple({w: r for r, w in enumerate(nbrs)} for nbrs in self.adjacency)

    @cached_property
    def edge_vids(self) -> tuple[tuple[int, int], ...]:
        return tuple((a - 1, self.n_a + b - 1) for a, b in self.edges)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids touching each vertex id."""
        inc: list[list[int]] = [[] for _ in range(self.n_agents)]
        for eid, (u, v) in enumerate(self.edge_vids):
            inc[u].append(eid)
            inc[v].append(eid)
        return tuple(tuple(x) for x in inc)

    def edge_id(self, u: int, v: int) -> int:
        """Edge id between two vertex ids (either order)."""
        if u > v:
            u, v = v, u
        return self.edge_index[(u + 1, v - self.n_a + 1)]


def validate_instance(
    prefs_a: Sequence[Sequence[int]],
    prefs_b: Sequence[Sequence[int]],
    n_a: int | None = None,
    n_b: int | None = None,
) -> PreferenceInstance:
    """Check raw 1-based preference lists and build an instance.

    ``prefs_a[a - 1]`` is the list of agent A``a``.  Missing trailing lists
    (when ``n_a``/``n_b`` exceed the given lengths) are treated as empty.
    """
    n_a = len(prefs_a) if n_a is None else n_a
    n_b = len(prefs_b) if n_b is None else n_b
    if len(prefs_a) > n_a or len(prefs_b) > n_b:
        raise IndexOutOfRange("more preference lists than agents")
    la = [tuple(int(x) for x in lst) for lst in prefs_a] + [()] * (n_a - len(prefs_a))
    lb = [tuple(int(x) for x in lst) for lst in prefs_b] + [()] * (n_b - len(prefs_b))
    for side, lists, other in ((A, la, n_b), (B, lb, n_a)):
        for i, lst in enumerate(lists, 1):
            if len(set(lst)) != len(lst):
                raise DuplicateEntry(f"{side}{i} lists an agent twice")
            for j in lst:
                if not 1 <= j <= other:
                    raise IndexOutOfRange(f"{side}{i} lists {j}, outside 1..{other}")
    for a, lst in enumerate(la, 1):
        for b in lst:
            if a not in lb[b - 1]:
                raise NonMutualPreference(f"A{a} lists B{b} but B{b} does not list A{a}")
    for b, lst in enumerate(lb, 1):
        for a in lst:
            if b not in la[a - 1]:
                raise NonMutualPreference(f"B{b} lists A{a} but A{a} does not list B{b}")
    return PreferenceInstance(tuple(la), tuple(lb))


class Matching:
    """An immutable set of disjoint acceptable edges with partner lookup."""

    def __init__(self, instance: PreferenceInstance, edges: Iterable[Edge] = ()):
        edges = frozenset((int(a), int(b)) for a, b in edges)
        partner_a = [UNMATCHED] * (instance.n_a + 1)
        partner_b = [UNMATCHED] * (instance.n_b + 1)
        for a, b in edges:
            if not instance.has_edge(a, b):
                raise InvalidMatching(f"(A{a}, B{b}) is not an acceptable edge")
            if partner_a[a] or partner_b[b]:
                raise InvalidMatching(f"agent of edge (A{a}, B{b}) is matched twice")
            partner_a[a] = b
            partner_b[b] = a
        self.instance = instance
        self.edges = edges
        self.partner_a = tuple(partner_a)
        self.partner_b = tuple(partner_b)

    def partner(self, side: str, i: int) -> int:
        return self.partner_a[i] if side == A else self.partner_b[i]

    @cached_property
    def mate(self) -> tuple[int, ...]:
        """Partner vertex id per vertex id, -1 when unmatched."""
        n_a = self.instance.n_a
        out = [-1] * self.instance.n_agents
        for a, b in self.edges:
            out[a - 1] = n_a + b - 1
            out[n_a + b - 1] = a - 1
        return tuple(out)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.sorted_edges())

    def __contains__(self, edge):
        return edge in self.edges

    def __eq__(self, other):
        if isinstance(other, Matching):
            return self.edges == other.edges
        return NotImplemented

    def __hash__(self):
        return hash(self.edges)

    def __repr__(self):
        return f"Matching({self.sorted_edges()})"


def blocking_edges(instance: PreferenceInstance, matching: Matching) -> frozenset[Edge]:
    """Acceptable non-matching edges whose endpoints both prefer each other."""
    pa, pb = matching.partner_a, matching.partner_b
    out = []
    for a, b in instance.edges:
        if pa[a] == b:
            continue
        if instance.prefers(A, a, b, pa[a]) and instance.prefers(B, b, a, pb[b]):
            out.append((a, b))
    return frozenset(out)


def is_stable(instance: PreferenceInstance, matching: Matching) -> bool:
    return not blocking_edges(instance, matching)


@dataclass
class Answer:
    """Outcome of a decision procedure: a certified yes or a plain no."""

    yes: bool
    eta: Matching | None = None
    stats: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    def __bool__(self):
        return self.yes


def symmetric_difference(mu: Matching, eta: Matching) -> tuple[frozenset[Edge], int]:
    diff = mu.edges ^ eta.edges
    return diff, len(diff)


class StructureKind(enum.Enum):
    AUGMENTING_PATH = "AugmentingPath"
    ALTERNATING_PATH = "AlternatingPathNonAugmenting"
    ALTERNATING_CYCLE = "AlternatingCycle"
    INVALID = "Invalid"


@dataclass(frozen=True)
class AlternatingStructure:
    kind: StructureKind
    edge_count: int
    matched_edge_count: int

    @property
    def gain(self) -> int:
        """Size change of the matching when this structure is flipped."""
        return self.edge_count - 2 * self.matched_edge_count

    @property
    def valid(self) -> bool:
        return self.kind is not StructureKind.INVALID


@dataclass(frozen=True)
class Component:
    vertices: frozenset[Agent]
    edges: frozenset[Edge]
    structure: AlternatingStructure


def _classify(mu: Matching, vertices, edges) -> AlternatingStructure:
    n_mu = sum(1 for e in edges if e in mu.edges)
    q = len(edges)
    inc: dict[Agent, list[bool]] = {v: [] for v in vertices}
    for a, b in edges:
        in_mu = (a, b) in mu.edges
        inc[(A, a)].append(in_mu)
        inc[(B, b)].append(in_mu)

    def result(kind):
        return AlternatingStructure(kind, q, n_mu)

    ends = []
    for v, flags in inc.items():
        if len(flags) > 2 or (len(flags) == 2 and flags[0] == flags[1]):
            return result(StructureKind.INVALID)
        if len(flags) == 1:
            ends.append((v, flags[0]))
    if not ends:
        # connected, all degrees two: a cycle, alternating by the check above
        return result(StructureKind.ALTERNATING_CYCLE)
    if q != len(vertices) - 1:
        return result(StructureKind.INVALID)
    for (side, i), end_in_mu in ends:
        # a path may only end on a non-matching edge at a free agent
        if not end_in_mu and mu.partner(side, i) != UNMATCHED:
            return result(StructureKind.INVALID)
    if not any(flag for _, flag in ends):
        return result(StructureKind.AUGMENTING_PATH)
    return result(StructureKind.ALTERNATING_PATH)


def classify_components(instance: PreferenceInstance, mu: Matching, edge_subset: Iterable[Edge]) -> list[Component]:
    """Split ``edge_subset`` into connected components and classify each.

    Components are ordered by their first edge in canonical order.
    """
    edge_subset = sorted(set(edge_subset), key=instance.edge_index.__getitem__)
    parent: dict[Agent, Agent] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edge_subset:
        for v in ((A, a), (B, b)):
            parent.setdefault(v, v)
        ra, rb = find((A, a)), find((B, b))
        if ra != rb:
            parent[ra] = rb
    groups: dict[Agent, list[Edge]] = {}
    for a, b in edge_subset:
        groups.setdefault(find((A, a)), []).append((a, b))
    out = []
    for edges in groups.values():
        verts = frozenset(v for a, b in edges for v in ((A, a), (B, b)))
        out.append(Component(verts, frozenset(edges), _classify(mu, verts, edges)))
    return out
