"""Marked metric graphs, translation lengths and marking changes.

A point of unprojectivized outer space is stored as a graph, a marking
(one closed edge path at a base vertex per generator of F_N) and exact
rational edge lengths.  Translation lengths are crossing vectors dotted
with the lengths, so every comparison is exact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .freegroup import FreeMap, Word, reduce as reduce_word
from ._seq import cyclic_strip
from .graph import (
    CyclicEdgePath,
    Graph,
    GraphMap,
    collapse_word,
    spanning_tree,
    validate,
)


class MarkingError(ValueError):
    pass


# -- Stallings folding with bookkeeping ---------------------------------------

@dataclass
class FoldResult:
    """Outcome of folding the wedge of loops spelling ``words``.

    ``generates`` says whether the words generate the whole free group;
    ``injective_so_far`` turns False when a fold exposed a nontrivial
    relation among the words.  When the words form a basis,
    ``inverse_images[j]`` expresses generator ``j`` in terms of the words.
    """

    generates: bool
    injective_so_far: bool
    inverse_images: list[Word] | None
    n_vertices: int

    @property
    def is_basis(self) -> bool:
        return self.generates and self.injective_so_far


def fold_words(words: Sequence[Word], rank: int) -> FoldResult:
    """Fold the wedge of loops labelled by ``words`` into a core graph.

    Vertices carry label paths ``P(v)`` from the base (``P(base) = 1``) and
    each edge ``u → v`` labelled ``x`` carries a tag ``τ`` in the free group
    on the words with ``τ(words) = P(u) x P(v)⁻¹``.  Merged vertices live in
    a union-find whose links store offsets ``D`` with
    ``P(parent) = D(words) P(child)``, so tags never need rewriting.  In a
    folded rose the tag on the ``a_j`` petal spells ``a_j`` in the words.
    """
    parent: list[int] = [0]
    offset: list[Word] = [Word()]
    edges: list[list] = []  # [u, x, v, tag, alive]
    injective = True
    for i, w in enumerate(words):
        w = reduce_word(w)
        if not w.letters:
            injective = False
            continue
        u = 0
        for pos, x in enumerate(w.letters):
            if pos == len(w) - 1:
                v, tag = 0, Word.generator(i)
            else:
                v, tag = len(parent), Word()
                parent.append(v)
                offset.append(Word())
            edges.append([u, x, v, tag, True])
            u = v

    def find(v: int) -> tuple[int, Word]:
        chain = []
        while parent[v] != v:
            chain.append(v)
            v = parent[v]
        root = v
        # recompute offsets from the root down and compress
        acc = Word()
        for c in reversed(chain):
            acc = acc * offset[c]
            parent[c], offset[c] = root, acc
        return root, (offset[chain[0]] if chain else Word())

    def oriented(idx: int, forward: bool):
        u, x, v, tag, _ = edges[idx]
        ru, du = find(u)
        rv, dv = find(v)
        eff = du * tag * dv.inverse()
        return (ru, x, rv, eff) if forward else (rv, -x, ru, eff.inverse())

    incident: dict[int, list[int]] = {}
    for idx, (u, _, v, _, _) in enumerate(edges):
        incident.setdefault(u, []).append(idx)
        incident.setdefault(v, []).append(idx)

    def merge(b: int, t: Word, b2: int, t2: Word) -> None:
        # the base stays a root; otherwise the vertex with more edges does
        if b == 0 or (b2 != 0 and len(incident.get(b, ())) > len(incident.get(b2, ()))):
            parent[b2], offset[b2] = b, t.inverse() * t2
            child, root = b2, b
        else:
            parent[b], offset[b] = b2, t2.inverse() * t
            child, root = b, b2
        moved = incident.pop(child, [])
        incident.setdefault(root, []).extend(moved)
        queue.extend(moved)

    # (root, label) -> (edge, orientation); entries go stale when a root is
    # absorbed, and are re-checked on lookup
    registry: dict[tuple[int, int], tuple[int, bool]] = {}
    queue = deque(range(len(edges)))
    while queue:
        idx = queue.popleft()
        if not edges[idx][4]:
            continue
        for forward in (True, False):
            a, lab, b, t = oriented(idx, forward)
            prev = registry.get((a, lab))
            if prev is not None and prev[0] != idx and edges[prev[0]][4]:
                a2, lab2, b2, t2 = oriented(*prev)
                if (a2, lab2) == (a, lab):
                    if b2 == b:
                        if t2 != t:
                            injective = False
                    else:
                        merge(b, t, b2, t2)
                    edges[idx][4] = False
                    break
            registry[(a, lab)] = (idx, forward)

    roots = {find(v)[0] for v in range(len(parent))}
    at_base = {}
    for u, x, v, tag, alive in edges:
        if not alive:
            continue
        ru, du = find(u)
        rv, dv = find(v)
        eff = du * tag * dv.inverse()
        if ru == 0:
            at_base[x] = eff
        if rv == 0:
            at_base[-x] = eff.inverse()
    generates = roots == {0} and all(x in at_base for i in range(rank) for x in (i + 1, -(i + 1)))
    inverse_images = [at_base[i + 1] for i in range(rank)] if generates else None
    return FoldResult(generates, injective and generates and len(words) == rank, inverse_images, len(roots))


def certify_basis(words: Sequence[Word], rank: int) -> FreeMap | None:
    """Automorphism ``a_i ↦ words[i]`` with a checked inverse, or None if not a basis."""
    if len(words) != rank:
        return None
    res = fold_words(words, rank)
    if not res.is_basis:
        return None
    phi = FreeMap(list(words), res.inverse_images)
    return phi if phi.is_certified() else None


# -- marked metric graphs ------------------------------------------------------

def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class MarkedMetricGraph:
    """A triple (graph, marking, lengths) with exact rational lengths.

    ``marking[i]`` is a closed edge path at ``base`` realizing generator i.
    The marking is certified on construction: collapsing a spanning tree
    turns the petal paths into words, which must form a free basis.
    """

    def __init__(
        self,
        graph: Graph,
        marking: Sequence[Sequence[int]],
        lengths: Sequence,
        base: int = 0,
        name: str = "",
        min_valence: int = 3,
    ):
        self.graph = graph
        self.base = base
        self.name = name
        self.marking = tuple(graph.reduce_path(p) for p in marking)
        self.lengths = tuple(_as_fraction(x) for x in lengths)
        self.rank = len(self.marking)
        rep = validate(graph)
        if not rep.ok:
            raise MarkingError("; ".join(rep.violations))
        if len(self.lengths) != graph.n_edges // 2:
            raise MarkingError("need one length per positive edge")
        if any(x <= 0 for x in self.lengths):
            raise MarkingError("edge lengths must be positive")
        for v, k in enumerate(rep.valences):
            if k < min_valence:
                raise MarkingError(f"vertex {v} has valence {k} < {min_valence}")
        if graph.rank() != self.rank:
            raise MarkingError(f"graph has rank {graph.rank()} but the marking has {self.rank} petals")
        for i, p in enumerate(self.marking):
            if not p:
                raise MarkingError(f"petal {i} is trivial")
            graph.check_chain(p, closed=True)
            if graph.o(p[0]) != base:
                raise MarkingError(f"petal {i} is not based at vertex {base}")
        self.tree = spanning_tree(graph, root=base)
        words = [collapse_word(self.tree, p) for p in self.marking]
        self.marking_map = certify_basis(words, self.rank)
        if self.marking_map is None:
            raise MarkingError("petal paths do not form a basis of the fundamental group")
        self._inv = graph.inverse

    def __repr__(self):
        ls = ", ".join(str(x) for x in self.lengths)
        return f"MarkedMetricGraph({self.name or self.graph!r}; lengths=({ls}))"

    def with_lengths(self, lengths: Sequence) -> "MarkedMetricGraph":
        return MarkedMetricGraph(self.graph, self.marking, lengths, self.base, self.name)

    @property
    def volume(self) -> Fraction:
        return sum(self.lengths, Fraction(0))

    def same_marking(self, other: "MarkedMetricGraph") -> bool:
        return (
            self.graph.origin == other.graph.origin
            and self.graph.terminus == other.graph.terminus
            and self.marking == other.marking
            and self.base == other.base
        )

    def petal_paths(self) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
        pos = self.marking
        neg = tuple(self.graph.inverse_path(p) for p in pos)
        return pos, neg


def _reduced_path(T: MarkedMetricGraph, g: Word | Iterable[int]) -> list[int]:
    letters = g.letters if isinstance(g, Word) else tuple(g)
    if letters and max(abs(x) for x in letters) > T.rank:
        raise MarkingError("word uses a generator outside the marking's rank")
    pos, neg = T.petal_paths()
    inv = T._inv
    out: list[int] = []
    for x in letters:
        for e in (pos[x - 1] if x > 0 else neg[-x - 1]):
            if out and out[-1] == inv[e]:
                out.pop()
            else:
                out.append(e)
    return out


def realize(T: MarkedMetricGraph, g: Word | Iterable[int]) -> CyclicEdgePath:
    """``[[τ(g)]]``: the cyclically reduced loop in the class of ``g``."""
    return T.graph.cyclic_reduce(_reduced_path(T, g))


def crossing_vector(T: MarkedMetricGraph, g: Word | Iterable[int]) -> tuple[int, ...]:
    # crossings do not depend on the rotation, so skip canonicalizing it
    path = _reduced_path(T, g)
    i, j = cyclic_strip(path, T._inv.__getitem__)
    return tuple(T.graph.crossings(path[i:j]))


def translation_length(T: MarkedMetricGraph, g: Word | Iterable[int]) -> Fraction:
    return dot(crossing_vector(T, g), T.lengths)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def scale(T: MarkedMetricGraph, lam) -> MarkedMetricGraph:
    lam = _as_fraction(lam)
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    return T.with_lengths([x * lam for x in T.lengths])


def normalize(T: MarkedMetricGraph) -> MarkedMetricGraph:
    """Volume-one representative of the projective class."""
    return scale(T, 1 / T.volume)


def rebase(T: MarkedMetricGraph, path: Sequence[int]) -> MarkedMetricGraph:
    """Move the base vertex along ``path``, conjugating every petal."""
    g = T.graph
    path = tuple(path)
    g.check_chain(path)
    if path and g.o(path[0]) != T.base:
        raise MarkingError("path must start at the base vertex")
    back = g.inverse_path(path)
    marking = [g.reduce_path(back + p + path) for p in T.marking]
    new_base = g.t(path[-1]) if path else T.base
    return MarkedMetricGraph(g, marking, T.lengths, new_base, T.name)


def marking_change(T: MarkedMetricGraph, T_prime: MarkedMetricGraph) -> GraphMap:
    """A graph map ``υ: G′ → G`` carrying the marking of ``T′`` to that of ``T``.

    Every vertex of ``G′`` goes to the base of ``G``; tree edges of ``G′``
    collapse; a non-tree edge, which is a generator ``c_k`` of the collapse
    basis, goes to ``τ(u_k)`` where ``u_k`` writes ``c_k`` in the marking
    basis of ``T′``.  The result is checked on every generator.
    """
    if T.rank != T_prime.rank:
        raise MarkingError("markings have different ranks")
    G, Gp = T.graph, T_prime.graph
    if T.same_marking(T_prime):
        return GraphMap(Gp, G, [(e,) for e in Gp.positive_edges], list(range(Gp.n_vertices)))
    back = T_prime.marking_map.inverse()
    non_tree = [e for e in Gp.positive_edges if e not in T_prime.tree.edges]
    pos, neg = T.petal_paths()
    images = []
    k = 0
    for e in Gp.positive_edges:
        if e in T_prime.tree.edges:
            images.append(())
            continue
        u = back.images[k]
        k += 1
        path: list[int] = []
        for x in u:
            path.extend(pos[x - 1] if x > 0 else neg[-x - 1])
        images.append(G.reduce_path(path))
    assert k == len(non_tree)
    ups = GraphMap(Gp, G, images, [T.base] * Gp.n_vertices)
    for i in range(T.rank):
        got = G.cyclic_reduce(ups.apply_reduced(T_prime.marking[i]))
        want = G.cyclic_reduce(T.marking[i])
        if got != want:
            raise MarkingError(f"marking change fails on generator {i}")
    return ups
