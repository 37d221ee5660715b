"""Finite graphs with an edge involution, edge paths, trees, and loop constructions.

Edges are dense integer ids.  A graph built with :meth:`Graph.from_edges`
uses the positive orientation ``E⁺ = {0, 2, 4, ...}`` with ``inv(e) = e ^ 1``.
The raw constructor accepts arbitrary ``o``/``t``/``inv`` tables so that
:func:`validate` can report broken input instead of refusing it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _seq
from .freegroup import FreeMap, Word, extend_to_basis, reduce as reduce_word


class GraphError(ValueError):
    pass


class DisconnectedError(GraphError):
    pass


class Graph:
    def __init__(
        self,
        n_vertices: int,
        origin: Sequence[int],
        terminus: Sequence[int],
        inverse: Sequence[int],
        names: Sequence[str] | None = None,
    ):
        self.n_vertices = n_vertices
        self.origin = tuple(origin)
        self.terminus = tuple(terminus)
        self.inverse = tuple(inverse)
        n_pos = (len(self.origin) + 1) // 2
        self.names = tuple(names) if names is not None else tuple(f"e{k}" for k in range(n_pos))
        self._star: list[list[int]] | None = None

    @classmethod
    def from_edges(
        cls, n_vertices: int, edges: Sequence[tuple[int, int]], names: Sequence[str] | None = None
    ) -> "Graph":
        o, t, inv = [], [], []
        for k, (a, b) in enumerate(edges):
            o += [a, b]
            t += [b, a]
            inv += [2 * k + 1, 2 * k]
        return cls(n_vertices, o, t, inv, names)

    @classmethod
    def rose(cls, n: int, names: Sequence[str] | None = None) -> "Graph":
        return cls.from_edges(1, [(0, 0)] * n, names)

    # -- basic structure --

    @property
    def n_edges(self) -> int:
        """Number of directed edges (twice the number of geometric edges)."""
        return len(self.origin)

    @property
    def positive_edges(self) -> range:
        return range(0, self.n_edges, 2)

    def o(self, e: int) -> int:
        return self.origin[e]

    def t(self, e: int) -> int:
        return self.terminus[e]

    def inv(self, e: int) -> int:
        return self.inverse[e]

    def star(self, v: int) -> list[int]:
        if self._star is None:
            star: list[list[int]] = [[] for _ in range(self.n_vertices)]
            for e, v0 in enumerate(self.origin):
                star[v0].append(e)
            self._star = star
        return self._star[v]

    def valence(self, v: int) -> int:
        return len(self.star(v))

    def rank(self) -> int:
        """Rank of π₁ for a connected graph: |E⁺| - |V| + 1."""
        return self.n_edges // 2 - self.n_vertices + 1

    def positive(self, e: int) -> int:
        return e - (e & 1)

    def name(self, e: int, unicode: bool = False) -> str:
        base = self.names[e // 2]
        if e % 2 == 0:
            return base
        return base + ("̄" if unicode and len(base) == 1 else "-")

    def edge_id(self, name: str) -> int:
        try:
            return 2 * self.names.index(name)
        except ValueError:
            raise GraphError(f"unknown edge {name!r}") from None

    def __repr__(self):
        return f"Graph(V={self.n_vertices}, E+={self.n_edges // 2})"

    # -- paths --

    def parse_path(self, text: str) -> tuple[int, ...]:
        """Parse ``"e y e-"`` (or ``"eyē"`` when all names are single characters)."""
        out: list[int] = []
        single = all(len(n) == 1 for n in self.names)
        for token in text.split():
            if token in ("1", "."):
                continue
            pieces = [token]
            if single and _strip_inverse(token)[0] not in self.names:
                pieces = _split_compact(token)
            for p in pieces:
                base, inverted = _strip_inverse(p)
                e = self.edge_id(base)
                out.append(self.inv(e) if inverted else e)
        self.check_chain(out)
        return tuple(out)

    def format_path(self, edges: Iterable[int], unicode: bool = False) -> str:
        edges = list(edges)
        if not edges:
            return "1"
        return " ".join(self.name(e, unicode) for e in edges)

    def check_chain(self, edges: Sequence[int], closed: bool = False) -> None:
        for a, b in zip(edges, edges[1:]):
            if self.t(a) != self.o(b):
                raise GraphError(f"path breaks between {self.name(a)} and {self.name(b)}")
        if closed and edges and self.t(edges[-1]) != self.o(edges[0]):
            raise GraphError("path is not closed")

    def reduce_path(self, edges: Sequence[int]) -> tuple[int, ...]:
        return tuple(_seq.free_reduce(edges, self.inverse.__getitem__))

    def inverse_path(self, edges: Sequence[int]) -> tuple[int, ...]:
        return tuple(_seq.inverse_seq(edges, self.inverse.__getitem__))

    def cyclic_reduce(self, edges: Sequence[int]) -> "CyclicEdgePath":
        red = _seq.free_reduce(edges, self.inverse.__getitem__)
        i, j = _seq.cyclic_strip(red, self.inverse.__getitem__)
        return CyclicEdgePath.of(red[i:j])

    def is_reduced(self, edges: Sequence[int]) -> bool:
        return all(edges[i + 1] != self.inv(edges[i]) for i in range(len(edges) - 1))

    def crossings(self, edges: Iterable[int]) -> list[int]:
        """Per positive edge count of traversals in either direction."""
        counts = [0] * (self.n_edges // 2)
        for e in edges:
            counts[e >> 1] += 1
        return counts


def _strip_inverse(token: str) -> tuple[str, bool]:
    for suffix in ("⁻¹", "-", "̄", "'"):
        if token.endswith(suffix) and len(token) > len(suffix):
            return token[: -len(suffix)], True
    return token, False


def _split_compact(token: str) -> list[str]:
    out: list[str] = []
    for ch in token:
        if ch in "-̄" and out:
            out[-1] += ch
        elif ch in "⁻¹" and out:
            out[-1] += "-" if ch == "⁻" else ""
        else:
            out.append(ch)
    return out


@dataclass(frozen=True)
class EdgePath:
    """A path; ``start`` matters only for the degenerate (empty) path."""

    edges: tuple[int, ...]
    start: int

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class CyclicEdgePath:
    """A cyclically reduced closed path in its least rotation (by edge id)."""

    edges: tuple[int, ...]

    @classmethod
    def of(cls, edges: Sequence[int]) -> "CyclicEdgePath":
        k = _seq.least_rotation(list(edges))
        return cls(_seq.rotate(edges, k))

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)


# -- validation --------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    valences: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(g: Graph) -> ValidationReport:
    rep = ValidationReport()
    E = g.n_edges
    if not (len(g.terminus) == len(g.inverse) == E):
        rep.violations.append("origin/terminus/inverse tables differ in length")
        return rep
    for e in range(E):
        i = g.inverse[e]
        if not 0 <= i < E:
            rep.violations.append(f"edge {e}: inverse {i} is not an edge")
            continue
        if i == e:
            rep.violations.append(f"edge {e}: self-inverse edge")
        if g.inverse[i] != e:
            rep.violations.append(f"edge {e}: inverse is not an involution")
        if g.origin[e] != g.terminus[i]:
            rep.violations.append(f"edge {e}: o(e) != t(inv(e))")
        if e % 2 == 0 and i % 2 == 0:
            rep.violations.append(f"edge {e}: e and inv(e) both in the positive orientation")
        for v in (g.origin[e], g.terminus[e]):
            if not 0 <= v < g.n_vertices:
                rep.violations.append(f"edge {e}: endpoint {v} is not a vertex")
    if rep.violations:
        return rep
    val = tuple(g.valence(v) for v in range(g.n_vertices))
    rep.valences = val
    for v, k in enumerate(val):
        if k == 0:
            rep.violations.append(f"vertex {v}: valence 0")
    return rep


# -- trees -------------------------------------------------------------------

@dataclass(frozen=True)
class SpanningTree:
    """A spanning forest given by parent pointers.

    ``parent[v]`` is the directed edge from the parent into ``v`` (``None``
    at roots); ``comp[v]`` names the root of ``v``'s component.
    """

    graph: Graph
    edges: frozenset[int]
    parent: tuple[int | None, ...]
    depth: tuple[int, ...]
    comp: tuple[int, ...]

    def contains(self, v: int) -> bool:
        return self.comp[v] >= 0


def _bfs_forest(
    g: Graph,
    allowed: set[int] | None = None,
    roots: Sequence[int] | None = None,
    vertices: set[int] | None = None,
) -> SpanningTree:
    """Deterministic BFS forest over positive edges in ``allowed``.

    Components are grown from ``roots`` first, then from remaining vertices
    in ascending order; star edges are scanned by ascending id.
    """
    n = g.n_vertices
    parent: list[int | None] = [None] * n
    depth = [0] * n
    comp = [-1] * n
    tree: set[int] = set()
    order = list(roots or []) + [v for v in range(n) if vertices is None or v in vertices]
    for r in order:
        if comp[r] >= 0 or (vertices is not None and r not in vertices):
            continue
        comp[r] = r
        queue = deque([r])
        while queue:
            u = queue.popleft()
            for e in sorted(g.star(u)):
                if allowed is not None and g.positive(e) not in allowed:
                    continue
                w = g.t(e)
                if comp[w] >= 0 or (vertices is not None and w not in vertices):
                    continue
                comp[w] = r
                parent[w] = e
                depth[w] = depth[u] + 1
                tree.add(g.positive(e))
                queue.append(w)
    return SpanningTree(g, frozenset(tree), tuple(parent), tuple(depth), tuple(comp))


def spanning_tree(g: Graph, excluded: Iterable[int] = (), root: int = 0) -> SpanningTree:
    """BFS spanning tree of ``g`` avoiding ``excluded`` (positive edge ids)."""
    banned = {g.positive(e) for e in excluded}
    allowed = set(g.positive_edges) - banned
    tree = _bfs_forest(g, allowed, roots=[root])
    if any(c != root for c in tree.comp):
        raise DisconnectedError("graph minus the excluded edges is disconnected")
    return tree


def tree_geodesic(T: SpanningTree, u: int, v: int) -> EdgePath:
    """The unique reduced path from ``u`` to ``v`` inside ``T``."""
    g = T.graph
    if not (T.contains(u) and T.contains(v)) or T.comp[u] != T.comp[v]:
        raise GraphError(f"vertices {u}, {v} are not in one tree component")
    up: list[int] = []    # edges climbing from u
    down: list[int] = []  # edges descending to v, collected bottom-up
    a, b = u, v
    while T.depth[a] > T.depth[b]:
        e = T.parent[a]
        up.append(g.inv(e))
        a = g.o(e)
    while T.depth[b] > T.depth[a]:
        e = T.parent[b]
        down.append(e)
        b = g.o(e)
    while a != b:
        ea, eb = T.parent[a], T.parent[b]
        up.append(g.inv(ea))
        down.append(eb)
        a, b = g.o(ea), g.o(eb)
    return EdgePath(tuple(up) + tuple(reversed(down)), u)


def components(g: Graph, allowed: set[int]) -> list[set[int]]:
    """Vertex sets of the components of the subgraph spanned by ``allowed`` edges.

    Every vertex belongs to some component; vertices touched by no allowed
    edge are singletons.
    """
    forest = _bfs_forest(g, allowed)
    groups: dict[int, set[int]] = {}
    for v, r in enumerate(forest.comp):
        groups.setdefault(r, set()).add(v)
    return [groups[r] for r in sorted(groups)]


def is_connected(g: Graph, allowed: set[int] | None = None) -> bool:
    forest = _bfs_forest(g, allowed)
    return len(set(forest.comp)) <= 1


def diameter(g: Graph, allowed: set[int] | None = None, vertices: set[int] | None = None) -> int:
    """Largest unweighted BFS distance between vertices of one component."""
    verts = range(g.n_vertices) if vertices is None else sorted(vertices)
    best = 0
    for s in verts:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in g.star(u):
                if allowed is not None and g.positive(e) not in allowed:
                    continue
                w = g.t(e)
                if w not in dist and (vertices is None or w in vertices):
                    dist[w] = dist[u] + 1
                    queue.append(w)
        best = max(best, max(dist.values()))
    return best


def collapse_word(T: SpanningTree, edges: Iterable[int]) -> Word:
    """Image of a closed path under the collapse ``G → G/T``.

    Generators of the collapse rose are the positive non-tree edges in
    ascending id order.  Reduced on output.
    """
    g = T.graph
    index = {e: i for i, e in enumerate(e for e in g.positive_edges if e not in T.edges)}
    out = []
    for e in edges:
        p = g.positive(e)
        if p in T.edges:
            continue
        out.append((index[p] + 1) * (1 if e == p else -1))
    return reduce_word(out)


def loop_at(T: SpanningTree, v: int, e: int) -> tuple[int, ...]:
    """``[v, o(e)]_T e [t(e), v]_T``."""
    g = T.graph
    return tree_geodesic(T, v, g.o(e)).edges + (e,) + tree_geodesic(T, g.t(e), v).edges


# -- graph maps --------------------------------------------------------------

class GraphMap:
    """A map of graphs given on vertices and positive edges.

    ``edge_images[k]`` is the image path of positive edge ``2k``; images of
    inverse edges are the reversed paths.  Images may be degenerate.
    """

    def __init__(
        self,
        source: Graph,
        target: Graph,
        edge_images: Sequence[Sequence[int]],
        vertex_map: Sequence[int] | None = None,
    ):
        self.source, self.target = source, target
        imgs = [tuple(p) for p in edge_images]
        if len(imgs) != source.n_edges // 2:
            raise GraphError("need one image per positive edge")
        self._img: list[tuple[int, ...]] = [()] * source.n_edges
        for k, p in enumerate(imgs):
            target.check_chain(p)
            self._img[2 * k] = p
            self._img[2 * k + 1] = target.inverse_path(p)
        self.vertex_map = tuple(vertex_map) if vertex_map is not None else self._infer_vertices()
        for e in range(source.n_edges):
            p = self._img[e]
            vo = self.vertex_map[source.o(e)]
            if p and target.o(p[0]) != vo:
                raise GraphError(f"image of {source.name(e)} does not start at f(o(e))")
            if p and target.t(p[-1]) != self.vertex_map[source.t(e)]:
                raise GraphError(f"image of {source.name(e)} does not end at f(t(e))")

    def _infer_vertices(self) -> tuple[int, ...]:
        vm: list[int | None] = [None] * self.source.n_vertices
        for e in range(self.source.n_edges):
            p = self._img[e]
            if p:
                vm[self.source.o(e)] = self.target.o(p[0])
        if any(v is None for v in vm):
            if self.target.n_vertices == 1:
                return tuple(0 if v is None else v for v in vm)
            raise GraphError("cannot infer vertex images; give vertex_map")
        return tuple(vm)

    @property
    def edge_images(self) -> tuple[tuple[int, ...], ...]:
        return tuple(self._img[e] for e in self.source.positive_edges)

    def image(self, e: int) -> tuple[int, ...]:
        return self._img[e]

    def apply(self, edges: Iterable[int]) -> list[int]:
        """Unreduced image ``f(e_0) f(e_1) ⋯``."""
        out: list[int] = []
        img = self._img
        for e in edges:
            out.extend(img[e])
        return out

    def apply_reduced(self, edges: Iterable[int]) -> tuple[int, ...]:
        out: list[int] = []
        img = self._img
        inv = self.target.inverse
        for e in edges:
            for x in img[e]:
                if out and out[-1] == inv[x]:
                    out.pop()
                else:
                    out.append(x)
        return tuple(out)

    def apply_cyclic(self, edges: Iterable[int]) -> CyclicEdgePath:
        return self.target.cyclic_reduce(self.apply_reduced(edges))


# -- loop constructions ------------------------------------------------------

@dataclass
class LoopConstruction:
    """A primitive loop crossing a chosen edge many times."""

    loop: CyclicEdgePath
    raw: tuple[int, ...]
    case: str
    crossings: int
    base: int
    tree: SpanningTree
    certificate_edge: int | None = None
    nielsen: FreeMap | None = None
    nielsen_word: Word | None = None
    nielsen_power: int = 0
    basis: FreeMap | None = None


def is_separating(g: Graph, e: int) -> bool:
    allowed = set(g.positive_edges) - {g.positive(e)}
    forest = _bfs_forest(g, allowed)
    return forest.comp[g.o(e)] != forest.comp[g.t(e)]


def _component_rank(g: Graph, verts: set[int], allowed: set[int]) -> int:
    n_e = sum(1 for e in allowed if g.o(e) in verts)
    return n_e - len(verts) + 1


def primitive_loop_crossing(g: Graph, H: Iterable[int], e0: int, M: int) -> LoopConstruction:
    """Cyclically reduced primitive loop crossing ``e0`` at least ``M`` times.

    ``e0`` is a positive edge of the subgraph ``H``.  The three cases are
    a non-separating ``e0``; a separating ``e0`` with a side of rank >= 2;
    and a separating ``e0`` between two rank-1 sides, where a Nielsen
    automorphism is iterated until the crossing count reaches ``M``.
    """
    H = {g.positive(e) for e in H}
    e0 = g.positive(e0)
    if e0 not in H:
        raise GraphError("e0 must be an edge of H")
    if not is_connected(g):
        raise GraphError("graph must be connected")
    if g.rank() < 2:
        raise GraphError("need rank >= 2")
    if any(g.valence(v) == 1 for v in range(g.n_vertices)):
        raise GraphError("graph has a valence-one vertex")
    M = max(M, 1)
    if not is_separating(g, e0):
        return _plc_nonseparating(g, e0, M)
    rest = set(g.positive_edges) - {e0}
    forest = _bfs_forest(g, rest, roots=[g.o(e0), g.t(e0)])
    side_o = {v for v in range(g.n_vertices) if forest.comp[v] == forest.comp[g.o(e0)]}
    side_t = {v for v in range(g.n_vertices) if forest.comp[v] == forest.comp[g.t(e0)]}
    r_o = _component_rank(g, side_o, rest)
    r_t = _component_rank(g, side_t, rest)
    if r_o >= 2 or r_t >= 2:
        edge = e0 if r_o >= 2 else g.inv(e0)
        return _plc_big_side(g, edge, forest, M)
    return _plc_nielsen(g, e0, forest, M)


def _certify_once(g: Graph, loop: CyclicEdgePath) -> tuple[int | None, FreeMap | None, SpanningTree | None]:
    """Find an edge crossed once and certify primitivity in a collapse basis."""
    counts = g.crossings(loop.edges)
    for p in g.positive_edges:
        if counts[p >> 1] == 1:
            T = spanning_tree(g, excluded=[p], root=g.o(loop.edges[0]))
            basis = extend_to_basis(collapse_word(T, loop.edges), g.rank())
            return p, basis, T
    return None, None, None


def _plc_nonseparating(g, e0, M):
    T = spanning_tree(g, excluded=[e0], root=g.o(e0))
    v = g.o(e0)
    e = next(p for p in g.positive_edges if p != e0 and p not in T.edges)
    raw = loop_at(T, v, e0) * M + loop_at(T, v, e)
    loop = g.cyclic_reduce(raw)
    cert, basis, T2 = _certify_once(g, loop)
    return LoopConstruction(
        loop, raw, "non-separating", g.crossings(loop.edges)[e0 >> 1], v, T2 or T,
        certificate_edge=cert, basis=basis,
    )


def _plc_big_side(g, e0, forest, M):
    # e0 is oriented so that its origin side has rank >= 2
    side_o = {v for v in range(g.n_vertices) if forest.comp[v] == forest.comp[g.o(e0)]}
    side_t = set(range(g.n_vertices)) - side_o
    rest = set(g.positive_edges) - {g.positive(e0)}
    T = _bfs_forest(g, rest, roots=[g.o(e0), g.t(e0)])
    extra_o = [p for p in g.positive_edges if p in rest and p not in T.edges and g.o(p) in side_o]
    extra_t = [p for p in g.positive_edges if p in rest and p not in T.edges and g.o(p) in side_t]
    e1, e2 = extra_o[0], extra_o[1]
    ep = extra_t[0]
    v = g.o(e0)
    geo = lambda a, b: tree_geodesic(T, a, b).edges
    block = (
        geo(v, g.o(e1)) + (e1,) + geo(g.t(e1), g.o(e0)) + (e0,)
        + geo(g.t(e0), g.o(ep)) + (ep,) + geo(g.t(ep), g.t(e0))
        + (g.inv(e0),) + geo(g.o(e0), v)
    )
    raw = block * -(-M // 2) + geo(v, g.o(e2)) + (e2,) + geo(g.t(e2), v)
    loop = g.cyclic_reduce(raw)
    cert, basis, T2 = _certify_once(g, loop)
    return LoopConstruction(
        loop, raw, "separating, rank>=2 side", g.crossings(loop.edges)[g.positive(e0) >> 1], v,
        T2, certificate_edge=cert, basis=basis,
    )


def _plc_nielsen(g, e0, forest, M):
    side_o = {v for v in range(g.n_vertices) if forest.comp[v] == forest.comp[g.o(e0)]}
    rest = set(g.positive_edges) - {e0}
    T = forest
    extra = [p for p in g.positive_edges if p in rest and p not in T.edges]
    e1 = next(p for p in extra if g.o(p) in side_o)
    ep = next(p for p in extra if g.o(p) not in side_o)
    v = g.o(e0)
    geo = lambda a, b: tree_geodesic(T, a, b).edges
    l1 = geo(v, g.o(e1)) + (e1,) + geo(g.t(e1), v)
    lp = (
        geo(v, g.o(e0)) + (e0,) + geo(g.t(e0), g.o(ep)) + (ep,)
        + geo(g.t(ep), g.t(e0)) + (g.inv(e0),) + geo(g.o(e0), v)
    )
    # F(l1, l'): generator 0 = l1, generator 1 = l'
    eta1 = FreeMap.parse(["a b", "b"], ["a b-", "b"])
    eta_p = FreeMap.parse(["a", "b a"], ["a", "b a-"])
    step = eta_p.compose(eta1)
    pieces = {1: l1, -1: g.inverse_path(l1), 2: lp, -2: g.inverse_path(lp)}
    word = Word.generator(0)
    power = 0
    auto = FreeMap.identity(2)
    while True:
        power += 1
        auto = step.compose(auto)
        word = auto(Word.generator(0))
        raw = tuple(x for y in word for x in pieces[y])
        loop = g.cyclic_reduce(raw)
        count = g.crossings(loop.edges)[e0 >> 1]
        if count >= M:
            break
    full_tree = _bfs_forest(g, T.edges | {e0}, roots=[v])
    return LoopConstruction(
        loop, raw, "separating, two rank-1 sides", count, v, full_tree,
        nielsen=auto, nielsen_word=word, nielsen_power=power,
    )


@dataclass
class CrossingExtension:
    """Result of extending a loop off ``H`` to one that crosses ``H``."""

    eta: tuple[int, ...]
    alpha: tuple[int, ...]       # the input loop, rotated to start at the base vertex
    alpha_prime: tuple[int, ...]  # η·α, unreduced
    reduced: CyclicEdgePath      # [[α′]]
    case: str
    h_in_eta: int
    h_in_result: int
    reduction: int
    bound: int
    certificate_edge: int | None
    basis: FreeMap | None
    tried: list[str] = field(default_factory=list)

    @property
    def all_h_survive(self) -> bool:
        return self.h_in_result == self.h_in_eta

    @property
    def within_bound(self) -> bool:
        return self.reduction <= self.bound


def extend_to_cross(g: Graph, H: Iterable[int], alpha: Sequence[int]) -> CrossingExtension:
    """Prefix a loop ``α`` lying off ``H`` by a loop ``η`` so the result crosses ``H``.

    Cases are tried in order (both ends of an H-edge in α's component; an
    H-edge into a component that is not a tree once its internal H-edges
    are added; an H-edge joining two tree components; two H-edges into
    one tree component; then any non-tree edge of a BFS tree grown from
    α's component).  A case is accepted only if every H-edge of ``[η]``
    survives cyclic reduction and the result crosses some edge once.
    """
    H = {g.positive(e) for e in H}
    alpha = tuple(alpha)
    if not alpha:
        raise GraphError("α must be a nontrivial loop")
    g.check_chain(alpha, closed=True)
    if not g.is_reduced(alpha + alpha[:1]):
        raise GraphError("α must be cyclically reduced")
    if any(g.positive(e) in H for e in alpha):
        raise GraphError("α must avoid H")
    if any(g.valence(v) == 1 for v in range(g.n_vertices)) or not is_connected(g):
        raise GraphError("graph must be connected without valence-one vertices")
    off_h = set(g.positive_edges) - H
    v = g.o(alpha[0])
    forest = _bfs_forest(g, off_h, roots=[v])
    comp = forest.comp
    gamma1 = {u for u in range(g.n_vertices) if comp[u] == v}
    bound = 2 * diameter(g, off_h, gamma1)
    geo = lambda a, b: tree_geodesic(forest, a, b).edges
    h_dir = sorted(e for p in sorted(H) for e in (p, g.inv(p)))
    tried: list[str] = []

    def candidates():
        # case 1: an H-edge with both ends in Γ1
        for e0 in h_dir:
            if g.o(e0) in gamma1 and g.t(e0) in gamma1:
                yield "both ends in α's component", geo(v, g.o(e0)) + (e0,) + geo(g.t(e0), v)
        # case 2: H-edge into Γj where Γj plus its internal H-edges is not a tree
        for e0 in h_dir:
            if g.o(e0) not in gamma1 or g.t(e0) in gamma1:
                continue
            gj = {u for u in range(g.n_vertices) if comp[u] == comp[g.t(e0)]}
            inner = {p for p in g.positive_edges if g.o(p) in gj and g.t(p) in gj}
            Tj = _bfs_forest(g, inner, roots=[g.t(e0)], vertices=gj)
            spare = [p for p in sorted(inner) if p not in Tj.edges]
            if not spare:
                continue
            ej = spare[0]
            gj_geo = lambda a, b: tree_geodesic(Tj, a, b).edges
            yield "H-edge into a non-tree component", (
                geo(v, g.o(e0)) + (e0,) + gj_geo(g.t(e0), g.o(ej)) + (ej,)
                + gj_geo(g.t(ej), g.t(e0)) + (g.inv(e0),) + geo(g.o(e0), v)
            )
        # cases 3a/3b: the reachable components are trees
        into = [e for e in h_dir if g.o(e) in gamma1 and g.t(e) not in gamma1]
        by_comp: dict[int, list[int]] = {}
        for e in into:
            by_comp.setdefault(comp[g.t(e)], []).append(e)
        for es in h_dir:
            ci, cj = comp[g.o(es)], comp[g.t(es)]
            if ci == cj or ci not in by_comp or cj not in by_comp:
                continue
            ei, ej = by_comp[ci][0], by_comp[cj][0]
            yield "H-edge between two tree components", (
                geo(v, g.o(ei)) + (ei,) + geo(g.t(ei), g.o(es)) + (es,)
                + geo(g.t(es), g.t(ej)) + (g.inv(ej),) + geo(g.o(ej), v)
            )
        for c, es in sorted(by_comp.items()):
            if len(es) >= 2:
                e0, e1 = es[0], es[1]
                yield "two H-edges into one tree component", (
                    geo(v, g.o(e0)) + (e0,) + geo(g.t(e0), g.t(e1)) + (g.inv(e1),)
                    + geo(g.o(e1), v)
                )
        # fallback: a non-tree edge of a BFS tree grown from Γ1
        full = _bfs_forest(g, set(g.positive_edges), roots=[v])
        full_geo = lambda a, b: tree_geodesic(full, a, b).edges
        for p in g.positive_edges:
            if p in full.edges or p in off_h and g.o(p) in gamma1:
                continue
            yield "generic non-tree edge", full_geo(v, g.o(p)) + (p,) + full_geo(g.t(p), v)

    for case, eta in candidates():
        tried.append(case)
        red_eta = g.reduce_path(eta)
        h_eta = sum(1 for e in red_eta if g.positive(e) in H)
        if h_eta == 0:
            continue
        result = g.cyclic_reduce(red_eta + alpha)
        h_res = sum(1 for e in result.edges if g.positive(e) in H)
        if h_res != h_eta:
            continue
        cert, basis, _ = _certify_once(g, result)
        if cert is None:
            continue
        reduction = (len(red_eta) + len(alpha) - len(result)) // 2
        return CrossingExtension(
            eta, alpha, eta + alpha, result, case, h_eta, h_res, reduction, bound,
            cert, basis, tried,
        )
    raise GraphError("no construction produced a loop crossing H")
