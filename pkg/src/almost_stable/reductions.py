"""Gadget reductions from Multicolored Clique to ASM and LS-ASM.

Both generators name every gadget vertex with a readable string and keep
the name tables, so tests can talk about individual gadget rows:

=================  ==============================================
``u:<v>#<h>``      h-th vertex of the base path of source vertex v
``e:<e>``          edge vertex of source edge e
``et:<e>``         its partner vertex
``p:<i>#<l>``      (ASM) entry hub of part i; ``pt`` is the exit hub
``a:<i>#<j>,<l>``  (ASM) tree vertices over part i; also ``at``, ``b``, ``bt``
``q:<i>-<j>#<l>``  (ASM) entry hub of edge set E_ij; also ``qt``
``c:``/``d:``      (ASM) tree vertices over E_ij; also ``ct``, ``dt``
``p1:<i>``         (LS-ASM) hubs ``p1``, ``p2`` per part
``q1:<i>-<j>``     (LS-ASM) hubs ``q1``, ``q2`` per part pair
=================  ==============================================
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .core import A, B, Matching, PreferenceInstance, blocking_edges, symmetric_difference, validate_instance
from .errors import AlmostStableError, InputError, NotAClique, NotPadded, NotRegular, ParseError

PAD_PREFIX = "_pad"


@dataclass(frozen=True)
class McqEdge:
    """Edge between parts ``i < j``; padding edges have no endpoints."""

    name: str
    i: int
    j: int
    u: str | None
    v: str | None

    @property
    def padding(self) -> bool:
        return self.u is None


@dataclass(frozen=True)
class McqInstance:
    parts: tuple[tuple[str, ...], ...]
    edges: tuple[McqEdge, ...]
    r: int | None = None

    @property
    def k(self) -> int:
        return len(self.parts)

    @cached_property
    def part_of(self) -> dict[str, int]:
        return {v: i for i, part in enumerate(self.parts, 1) for v in part}

    @cached_property
    def position(self) -> dict[str, int]:
        """1-based position of a vertex inside its part."""
        return {v: pos for part in self.parts for pos, v in enumerate(part, 1)}

    @cached_property
    def edge_by_name(self) -> dict[str, McqEdge]:
        return {e.name: e for e in self.edges}

    def edges_between(self, i: int, j: int) -> list[McqEdge]:
        return [e for e in self.edges if (e.i, e.j) == (i, j)]

    @cached_property
    def incident(self) -> dict[str, list[McqEdge]]:
        """Edges at each vertex in canonical (input) order."""
        out: dict[str, list[McqEdge]] = {v: [] for v in self.part_of}
        for e in self.edges:
            if not e.padding:
                out[e.u].append(e)
                out[e.v].append(e)
        return out

    def degree(self, v: str) -> int:
        return len(self.incident[v])

    @property
    def vertices(self) -> list[str]:
        return [v for part in self.parts for v in part]

    @property
    def real_edges(self) -> list[McqEdge]:
        return [e for e in self.edges if not e.padding]

    def is_padding(self, v: str) -> bool:
        return v.startswith(PAD_PREFIX)

    @cached_property
    def _adjacent(self) -> set[frozenset[str]]:
        return {frozenset((e.u, e.v)) for e in self.real_edges}

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self._adjacent

    def edge_between(self, u: str, v: str) -> McqEdge | None:
        for e in self.incident.get(u, ()):
            if v in (e.u, e.v):
                return e
        return None


def make_mcq(parts: Sequence[Sequence[str]], edges: Iterable[Sequence[str]], r: int | None = None) -> McqInstance:
    """Validate and build an instance; edges are ``(u, v)`` name pairs."""
    parts = tuple(tuple(str(v) for v in part) for part in parts)
    part_of = {}
    for i, part in enumerate(parts, 1):
        for v in part:
            if v in part_of:
                raise InputError(f"vertex {v!r} appears twice")
            part_of[v] = i
    out = []
    seen = set()
    for pair in edges:
        u, v = (str(x) for x in pair)
        for x in (u, v):
            if x not in part_of:
                raise InputError(f"edge endpoint {x!r} is in no part")
        if part_of[u] == part_of[v]:
            raise InputError(f"edge {u}-{v} lies inside part {part_of[u]}")
        if part_of[u] > part_of[v]:
            u, v = v, u
        key = frozenset((u, v))
        if key in seen:
            raise InputError(f"edge {u}-{v} given twice")
        seen.add(key)
        out.append(McqEdge(f"{u}-{v}", part_of[u], part_of[v], u, v))
    if r is not None and r < 0:
        raise InputError("degree must be non-negative")
    return McqInstance(parts, tuple(out), r)


def parse_mcq(text: str) -> McqInstance:
    """``mcq <k>``, then ``part <i> : v ...`` lines, then ``edge u v`` lines.

    An optional ``degree <r>`` line sets the per-vertex slot count used by
    the ASM generator.
    """
    k = None
    parts: dict[int, list[str]] = {}
    edges = []
    r = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.replace(":", " : ").split()
        try:
            if k is None:
                if tokens[0] != "mcq" or len(tokens) != 2:
                    raise ParseError(f"line {lineno}: expected 'mcq <k>'")
                k = int(tokens[1])
            elif tokens[0] == "part":
                if len(tokens) < 3 or tokens[2] != ":":
                    raise ParseError(f"line {lineno}: expected 'part <i> : ...'")
                i = int(tokens[1])
                if i in parts or not 1 <= i <= k:
                    raise ParseError(f"line {lineno}: bad or repeated part index {i}")
                parts[i] = tokens[3:]
            elif tokens[0] == "edge":
                if len(tokens) != 3:
                    raise ParseError(f"line {lineno}: expected 'edge u v'")
                edges.append((tokens[1], tokens[2]))
            elif tokens[0] == "degree":
                r = int(tokens[1])
            else:
                raise ParseError(f"line {lineno}: unknown keyword {tokens[0]!r}")
        except ValueError:
            raise ParseError(f"line {lineno}: expected an integer") from None
    if k is None:
        raise ParseError("empty MCQ file")
    if sorted(parts) != list(range(1, k + 1)):
        raise ParseError(f"expected parts 1..{k}")
    return make_mcq([parts[i] for i in range(1, k + 1)], edges, r)


def format_mcq(mcq: McqInstance) -> str:
    out = [f"mcq {mcq.k}"]
    if mcq.r is not None:
        out.append(f"degree {mcq.r}")
    for i, part in enumerate(mcq.parts, 1):
        out.append(f"part {i} : {' '.join(part)}".rstrip())
    out += [f"edge {e.u} {e.v}" for e in mcq.real_edges]
    return "\n".join(out) + "\n"


def multicolored_cliques(mcq: McqInstance):
    """All cliques with one vertex per part, by brute force."""
    for choice in product(*mcq.parts):
        if all(mcq.adjacent(u, v) for x, u in enumerate(choice) for v in choice[x + 1 :]):
            yield choice


def find_clique(mcq: McqInstance) -> tuple[str, ...] | None:
    return next(multicolored_cliques(mcq), None)


def clique_edges(mcq: McqInstance, clique: Sequence[str]) -> list[McqEdge]:
    """Edges of G[X] in canonical order."""
    members = set(clique)
    return [e for e in mcq.real_edges if e.u in members and e.v in members]


def validate_clique(mcq: McqInstance, clique: Sequence[str]) -> tuple[str, ...]:
    """Order ``clique`` by part and check it; raises NotAClique."""
    by_part = {}
    for v in clique:
        if v not in mcq.part_of:
            raise NotAClique(f"{v!r} is not a vertex")
        i = mcq.part_of[v]
        if i in by_part:
            raise NotAClique(f"two vertices from part {i}")
        by_part[i] = v
    if sorted(by_part) != list(range(1, mcq.k + 1)):
        raise NotAClique("the set must hit every part exactly once")
    ordered = tuple(by_part[i] for i in range(1, mcq.k + 1))
    for x, u in enumerate(ordered):
        for v in ordered[x + 1 :]:
            if not mcq.adjacent(u, v):
                raise NotAClique(f"{u} and {v} are not adjacent")
    return ordered


def _next_power(x: int) -> int:
    p = 4
    while p < x:
        p *= 2
    return p


def pad_mcq(mcq: McqInstance, n_target: int | None = None, m_target: int | None = None) -> McqInstance:
    """Grow every part to n and every E_ij to m, powers of two and at least 4.

    Padding vertices are isolated; padding edges have no endpoints at all,
    so they touch no vertex gadget.  Both are appended after the input
    items.  ``n_target``/``m_target`` raise the minimum sizes.
    """
    n = _next_power(max([len(p) for p in mcq.parts] + [n_target or 0]))
    pairs = [(i, j) for i in range(1, mcq.k + 1) for j in range(i + 1, mcq.k + 1)]
    m = _next_power(max([len(mcq.edges_between(i, j)) for i, j in pairs] + [m_target or 0]))
    parts = tuple(
        part + tuple(f"{PAD_PREFIX}{i}.{s}" for s in range(len(part) + 1, n + 1))
        for i, part in enumerate(mcq.parts, 1)
    )
    edges = list(mcq.edges)
    for i, j in pairs:
        have = len(mcq.edges_between(i, j))
        edges += [McqEdge(f"{PAD_PREFIX}{i}-{j}.{s}", i, j, None, None) for s in range(have + 1, m + 1)]
    return McqInstance(parts, tuple(edges), mcq.r)


def padded_sizes(mcq: McqInstance) -> tuple[int, int] | None:
    """``(n, m)`` if the instance is already padded, else None."""
    sizes = {len(p) for p in mcq.parts}
    pairs = [(i, j) for i in range(1, mcq.k + 1) for j in range(i + 1, mcq.k + 1)]
    esizes = {len(mcq.edges_between(i, j)) for i, j in pairs} or {4}
    if len(sizes) != 1 or len(esizes) != 1:
        return None
    (n,), (m,) = sizes, esizes
    if n < 4 or m < 4 or n & (n - 1) or m & (m - 1):
        return None
    return n, m


class GadgetError(AlmostStableError):
    """A generated gadget violates its own construction rules."""


class _Builder:
    def __init__(self):
        self.side: dict[str, str] = {}
        self.prefs: dict[str, list[str]] = {}
        self.order: list[str] = []

    def add(self, name: str, side: str, prefs: Sequence[str] = ()):
        if name in self.side:
            raise GadgetError(f"duplicate gadget vertex {name}")
        self.side[name] = side
        self.prefs[name] = list(prefs)
        self.order.append(name)

    def set(self, name: str, prefs: Sequence[str]):
        self.prefs[name] = list(prefs)

    def build(self):
        index = {}
        counts = {A: 0, B: 0}
        for name in self.order:
            side = self.side[name]
            counts[side] += 1
            index[name] = (side, counts[side])
        lists = {A: [None] * counts[A], B: [None] * counts[B]}
        for name in self.order:
            side, i = index[name]
            row = []
            for other in self.prefs[name]:
                if other not in index:
                    raise GadgetError(f"{name} lists unknown vertex {other}")
                if index[other][0] == side:
                    raise GadgetError(f"{name} and {other} are on the same side")
                row.append(index[other][1])
            lists[side][i - 1] = row
        return validate_instance(lists[A], lists[B]), index


@dataclass
class ReductionArtifacts:
    """A generated instance together with its name tables."""

    kind: str
    mcq: McqInstance
    instance: PreferenceInstance
    mu: Matching
    k_prime: int
    q: int
    t: int
    index: dict[str, tuple[str, int]]
    vertex_map: dict[str, tuple[str, ...]]
    edge_map: dict[str, tuple[str, str]]
    roles: dict[str, str]
    r: int | None = None
    embedded_q: int | None = None
    name_of: dict[tuple[str, int], str] = field(init=False, repr=False)

    def __post_init__(self):
        self.name_of = {v: k for k, v in self.index.items()}

    def edge(self, x: str, y: str) -> tuple[int, int]:
        """Instance edge ``(a, b)`` between two named gadget vertices."""
        sx, ix = self.index[x]
        sy, iy = self.index[y]
        return (ix, iy) if sx == A else (iy, ix)

    def edge_names(self, edge: tuple[int, int]) -> tuple[str, str]:
        a, b = edge
        return self.name_of[(A, a)], self.name_of[(B, b)]

    def matching(self, pairs: Iterable[tuple[str, str]]) -> Matching:
        return Matching(self.instance, (self.edge(x, y) for x, y in pairs))

    @property
    def params(self) -> dict[str, int]:
        out = {"k_prime": self.k_prime, "q": self.q, "t": self.t}
        if self.embedded_q is not None:
            out["embedded_q"] = self.embedded_q
        return out


def _log2(x: int) -> int:
    return x.bit_length() - 1


def asm_closed_forms(k: int, n: int, m: int, r: int) -> dict[str, int]:
    """Vertex count, |mu|, t and the flip count of an embedded clique."""
    pairs = k * (k - 1) // 2
    verts = 2 * (r + 1) * k * n + 2 * k * (2 * n - 3) + 2 * m * pairs + 2 * pairs * (2 * m - 3)
    mu = k * n * (r + 1) + m * pairs + 2 * k * (n - 2) + 2 * pairs * (m - 2)
    t = k + pairs
    q = (2 * r + 3) * k + 3 * pairs + 4 * k * _log2(n // 2) + 4 * pairs * _log2(m // 2)
    return {"vertices": verts, "mu": mu, "t": t, "k_prime": t, "embedded_q": q}


def lsasm_closed_forms(k: int, n_vertices: int, n_edges: int) -> dict[str, int]:
    pairs = k * (k - 1) // 2
    return {
        "vertices": 4 * n_vertices + 2 * n_edges + 2 * k + 2 * pairs,
        "mu": 2 * n_vertices + n_edges,
        "t": k + pairs,
        "k_prime": k + pairs,
        "q": 5 * k + 3 * pairs,
    }


def _u(v, h):
    return f"u:{v}#{h}"


def _tree(b: _Builder, mu: list, roles: dict, prefix: str, key: str, size: int, leaves: list, first_side: str):
    """Hub/binary-tree gadget over ``size`` leaves (ASM special vertices).

    ``leaves`` are the leaf-level gadget vertices, two per hub.  Returns the
    hub names in order.  ``prefix`` is ``("p", "a", "b")`` or the tilde or
    edge-side variants.
    """
    hub, low, high = prefix
    levels = _log2(size // 2)
    other = B if first_side == A else A
    hubs = []
    for ell in range(1, size // 2 + 1):
        name = f"{hub}:{key}#{ell}"
        b.add(name, first_side, [leaves[2 * ell - 2], leaves[2 * ell - 1], f"{low}:{key}#1,{ell}"])
        hubs.append(name)
        roles[name] = "special"
    for j in range(1, levels + 1):
        for ell in range(1, size // 2**j + 1):
            name = f"{low}:{key}#{j},{ell}"
            first = f"{hub}:{key}#{ell}" if j == 1 else f"{high}:{key}#{j - 1},{ell}"
            b.add(name, other, [first, f"{high}:{key}#{j},{(ell + 1) // 2}"])
            mu.append((name, first))
            roles[name] = "special"
        for ell in range(1, size // 2 ** (j + 1) + 1):
            name = f"{high}:{key}#{j},{ell}"
            row = [f"{low}:{key}#{j},{2 * ell - 1}", f"{low}:{key}#{j},{2 * ell}"]
            if j < levels:
                row.append(f"{low}:{key}#{j + 1},{ell}")
            b.add(name, first_side, row)
            roles[name] = "special"
    return hubs


def build_asm_reduction(mcq: McqInstance, r: int | None = None, strict: bool = False) -> ReductionArtifacts:
    """ASM gadget over a padded MCQ instance.

    ``r`` is the number of edge slots on every base path; by default the
    instance's declared degree, else the largest real degree.  Every real
    vertex must have degree at most ``r`` (exactly ``r`` with ``strict``).
    """
    sizes = padded_sizes(mcq)
    if sizes is None:
        raise NotPadded("parts and edge sets must have equal power-of-two sizes >= 4; see pad_mcq")
    n, m = sizes
    if r is None:
        r = mcq.r if mcq.r is not None else max((mcq.degree(v) for v in mcq.vertices), default=0)
    for v in mcq.vertices:
        deg = mcq.degree(v)
        if deg > r or (strict and not mcq.is_padding(v) and deg != r):
            raise NotRegular(f"vertex {v} has degree {deg}, slot count is {r}")
    k = mcq.k
    b = _Builder()
    mu: list[tuple[str, str]] = []
    roles: dict[str, str] = {}
    slot = {}
    for v in mcq.vertices:
        for h, e in enumerate(mcq.incident[v], 1):
            slot[(v, e.name)] = h
    vertex_map = {}
    last = 2 * r + 2
    for i, part in enumerate(mcq.parts, 1):
        for ell, v in enumerate(part, 1):
            hub = (ell + 1) // 2
            names = tuple(_u(v, h) for h in range(1, last + 1))
            vertex_map[v] = names
            incident = mcq.incident[v]
            for h in range(1, last + 1):
                side = A if h % 2 else B
                if h == 1:
                    row = [_u(v, 2), f"p:{i}#{hub}"]
                elif h == last:
                    row = [_u(v, last - 1), f"pt:{i}#{hub}"]
                elif h % 2 == 0:
                    row = [_u(v, h - 1), _u(v, h + 1)]
                else:
                    s = (h - 1) // 2
                    mid = [f"e:{incident[s - 1].name}"] if s <= len(incident) else []
                    row = [_u(v, h - 1), *mid, _u(v, h + 1)]
                b.add(names[h - 1], side, row)
                roles[names[h - 1]] = "base"
                if h % 2 == 0:
                    mu.append((names[h - 2], names[h - 1]))
    edge_map = {}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for ell, e in enumerate(mcq.edges_between(i, j), 1):
                hub = (ell + 1) // 2
                ev, et = f"e:{e.name}", f"et:{e.name}"
                row = [et]
                if not e.padding:
                    row += [_u(e.u, 2 * slot[(e.u, e.name)] + 1), _u(e.v, 2 * slot[(e.v, e.name)] + 1)]
                b.add(ev, B, row + [f"q:{i}-{j}#{hub}"])
                b.add(et, A, [ev, f"qt:{i}-{j}#{hub}"])
                mu.append((ev, et))
                edge_map[e.name] = (ev, et)
                roles[ev] = roles[et] = "edge"
    for i, part in enumerate(mcq.parts, 1):
        _tree(b, mu, roles, ("p", "a", "b"), str(i), n, [_u(v, 1) for v in part], B)
        _tree(b, mu, roles, ("pt", "at", "bt"), str(i), n, [_u(v, last) for v in part], A)
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            es = mcq.edges_between(i, j)
            key = f"{i}-{j}"
            _tree(b, mu, roles, ("q", "c", "d"), key, m, [f"e:{e.name}" for e in es], A)
            _tree(b, mu, roles, ("qt", "ct", "dt"), key, m, [f"et:{e.name}" for e in es], B)
    instance, index = b.build()
    forms = asm_closed_forms(k, n, m, r)
    art = ReductionArtifacts(
        "asm", mcq, instance, Matching(instance, ()), forms["k_prime"], forms["embedded_q"], forms["t"],
        index, vertex_map, edge_map, roles, r, forms["embedded_q"],
    )
    art.mu = art.matching(mu)
    return art


def _swap(eta: set, remove: Iterable, add: Iterable):
    for x, y in remove:
        key = frozenset((x, y))
        if key not in eta:
            raise GadgetError(f"swap schedule expected {x}-{y} in the matching")
        eta.remove(key)
    for x, y in add:
        eta.add(frozenset((x, y)))


def _tree_swaps(eta, key, ell, size, names, leaf):
    """Re-route one hub tree so that ``leaf`` takes hub ceil(ell/2)."""
    hub, low, high = names
    levels = _log2(size // 2)
    s = (ell + 1) // 2
    remove = [(f"{low}:{key}#1,{s}", f"{hub}:{key}#{s}")]
    remove += [
        (f"{low}:{key}#{j},{-(-ell // 2**j)}", f"{high}:{key}#{j - 1},{-(-ell // 2**j)}") for j in range(2, levels + 1)
    ]
    add = [(leaf, f"{hub}:{key}#{s}")]
    add += [
        (f"{low}:{key}#{j},{-(-ell // 2**j)}", f"{high}:{key}#{j},{-(-ell // 2 ** (j + 1))}")
        for j in range(1, levels + 1)
    ]
    _swap(eta, remove, add)


def embed_clique_asm(art: ReductionArtifacts, clique: Sequence[str]) -> Matching:
    """Matching with t more edges and exactly k' blocking edges built from a
    multicolored clique."""
    mcq = art.mcq
    clique = validate_clique(mcq, clique)
    n, m = padded_sizes(mcq)
    r = art.r
    last = 2 * r + 2
    eta = {frozenset(p) for p in (art.edge_names(e) for e in art.mu.edges)}
    for v in clique:
        i, ell = mcq.part_of[v], mcq.position[v]
        _swap(
            eta,
            [(_u(v, 2 * h - 1), _u(v, 2 * h)) for h in range(1, r + 2)],
            [(_u(v, 2 * h), _u(v, 2 * h + 1)) for h in range(1, r + 1)],
        )
        _tree_swaps(eta, str(i), ell, n, ("p", "a", "b"), _u(v, 1))
        _tree_swaps(eta, str(i), ell, n, ("pt", "at", "bt"), _u(v, last))
    for e in clique_edges(mcq, clique):
        ell = mcq.edges_between(e.i, e.j).index(e) + 1
        key = f"{e.i}-{e.j}"
        _swap(eta, [(f"e:{e.name}", f"et:{e.name}")], [])
        _tree_swaps(eta, key, ell, m, ("q", "c", "d"), f"e:{e.name}")
        _tree_swaps(eta, key, ell, m, ("qt", "ct", "dt"), f"et:{e.name}")
    return art.matching(tuple(p) for p in eta)


def _extract(art: ReductionArtifacts, eta: Matching, first: int, second: int):
    blocking = blocking_edges(art.instance, eta)
    vertices = [
        v for v in art.mcq.vertices if art.edge(_u(v, first), _u(v, second)) in blocking
    ]
    edges = [e.name for e in art.mcq.edges if art.edge(*art.edge_map[e.name]) in blocking]
    return vertices, edges


def extract_clique_asm(art: ReductionArtifacts, eta: Matching) -> tuple[list[str], list[str]]:
    """Source vertices whose edge u1u2 blocks and source edges whose pair
    (e, et) blocks; the caller decides whether they form a clique."""
    return _extract(art, eta, 1, 2)


def build_lsasm_reduction(mcq: McqInstance) -> ReductionArtifacts:
    """LS-ASM gadget: 4-vertex paths per vertex, an edge pair per edge and
    two hubs per part and per part pair."""
    k = mcq.k
    b = _Builder()
    mu: list[tuple[str, str]] = []
    roles: dict[str, str] = {}
    vertex_map = {}
    for i, part in enumerate(mcq.parts, 1):
        for v in part:
            names = tuple(_u(v, h) for h in range(1, 5))
            vertex_map[v] = names
            u1, u2, u3, u4 = names
            b.add(u1, A, [u2, f"p1:{i}"])
            b.add(u2, B, [u1, u3])
            b.add(u3, A, [u2, *(f"e:{e.name}" for e in mcq.incident[v]), u4])
            b.add(u4, B, [u3, f"p2:{i}"])
            mu += [(u1, u2), (u3, u4)]
            for x in names:
                roles[x] = "base"
    edge_map = {}
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for e in mcq.edges_between(i, j):
                ev, et = f"e:{e.name}", f"et:{e.name}"
                row = [et] if e.padding else [et, _u(e.u, 3), _u(e.v, 3)]
                b.add(ev, B, row + [f"q1:{i}-{j}"])
                b.add(et, A, [ev, f"q2:{i}-{j}"])
                mu.append((ev, et))
                edge_map[e.name] = (ev, et)
                roles[ev] = roles[et] = "edge"
    for i, part in enumerate(mcq.parts, 1):
        b.add(f"p1:{i}", B, [_u(v, 1) for v in part])
        b.add(f"p2:{i}", A, [_u(v, 4) for v in part])
        roles[f"p1:{i}"] = roles[f"p2:{i}"] = "special"
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            es = mcq.edges_between(i, j)
            b.add(f"q1:{i}-{j}", A, [f"e:{e.name}" for e in es])
            b.add(f"q2:{i}-{j}", B, [f"et:{e.name}" for e in es])
            roles[f"q1:{i}-{j}"] = roles[f"q2:{i}-{j}"] = "special"
    instance, index = b.build()
    forms = lsasm_closed_forms(k, len(mcq.vertices), len(mcq.edges))
    art = ReductionArtifacts(
        "lsasm", mcq, instance, Matching(instance, ()), forms["k_prime"], forms["q"], forms["t"],
        index, vertex_map, edge_map, roles,
    )
    art.mu = art.matching(mu)
    return art


def embed_clique_lsasm(art: ReductionArtifacts, clique: Sequence[str]) -> Matching:
    mcq = art.mcq
    clique = validate_clique(mcq, clique)
    eta = {frozenset(p) for p in (art.edge_names(e) for e in art.mu.edges)}
    for v in clique:
        i = mcq.part_of[v]
        u1, u2, u3, u4 = art.vertex_map[v]
        _swap(eta, [(u1, u2), (u3, u4)], [(u1, f"p1:{i}"), (u2, u3), (u4, f"p2:{i}")])
    for e in clique_edges(mcq, clique):
        ev, et = art.edge_map[e.name]
        _swap(eta, [(ev, et)], [(ev, f"q1:{e.i}-{e.j}"), (et, f"q2:{e.i}-{e.j}")])
    return art.matching(tuple(p) for p in eta)


def extract_clique_lsasm(art: ReductionArtifacts, eta: Matching) -> tuple[list[str], list[str]]:
    return _extract(art, eta, 1, 2)


def two_coloring(instance: PreferenceInstance) -> dict[int, int] | None:
    """Breadth-first 2-colouring of the acceptability graph, ignoring the
    A/B labels; None if an odd cycle exists."""
    adj = instance.adjacency
    color: dict[int, int] = {}
    for start in range(instance.n_agents):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    queue.append(y)
                elif color[y] == color[x]:
                    return None
    return color


def check_artifacts(art: ReductionArtifacts, clique: Sequence[str] | None = None) -> list[str]:
    """Re-check the structural properties of a generated reduction.

    Returns human-readable failures; an empty list means every check passes.
    """
    failures = []
    inst, mu, mcq = art.instance, art.mu, art.mcq
    if two_coloring(inst) is None:
        failures.append("gadget graph is not bipartite")
    if blocking_edges(inst, mu):
        failures.append("reference matching is not stable")
    if art.kind == "asm":
        n, m = padded_sizes(mcq)
        forms = asm_closed_forms(mcq.k, n, m, art.r)
    else:
        forms = lsasm_closed_forms(mcq.k, len(mcq.vertices), len(mcq.edges))
    if inst.n_agents != forms["vertices"]:
        failures.append(f"vertex count {inst.n_agents} != {forms['vertices']}")
    if len(mu) != forms["mu"]:
        failures.append(f"|mu| = {len(mu)} != {forms['mu']}")
    if art.t != forms["t"] or art.k_prime != forms["k_prime"]:
        failures.append("parameters disagree with closed forms")
    if clique is None:
        return failures
    embed, extract = (
        (embed_clique_asm, extract_clique_asm) if art.kind == "asm" else (embed_clique_lsasm, extract_clique_lsasm)
    )
    ordered = validate_clique(mcq, clique)
    eta = embed(art, ordered)
    blocking = blocking_edges(inst, eta)
    if len(eta) != len(mu) + art.t:
        failures.append(f"|eta| = {len(eta)} != |mu| + t = {len(mu) + art.t}")
    if len(blocking) != art.k_prime:
        failures.append(f"{len(blocking)} blocking edges, expected {art.k_prime}")
    sd = symmetric_difference(mu, eta)[1]
    if sd != art.q:
        failures.append(f"|mu - eta| = {sd} != {art.q}")
    verts, edges = extract(art, eta)
    if sorted(verts) != sorted(ordered) or sorted(edges) != sorted(e.name for e in clique_edges(mcq, ordered)):
        failures.append("extracting from the embedded matching does not return the clique")
    return failures
