"""Topological representatives: turns, train tracks, relative train tracks.

A :class:`TopRep` is a tight graph self-map with a filtration by invariant
subgraphs.  The verifiers here never construct train tracks; they check
supplied ones and return reports with concrete witnesses.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from . import _seq
from .freegroup import FreeMap
from .graph import CyclicEdgePath, EdgePath, Graph, GraphError, GraphMap

MEMO_CAP = 10**6
DEFAULT_LETTER_CAP = 10**7


class TruncationError(RuntimeError):
    """An iterate grew past the letter cap."""

    def __init__(self, n: int, length: int):
        super().__init__(f"iterate {n} exceeds the letter cap ({length} letters)")
        self.n = n
        self.length = length


class ReducibleMatrixError(ValueError):
    def __init__(self, invariant: list[int]):
        super().__init__(f"matrix is reducible; invariant index set {invariant}")
        self.invariant = invariant


def _edge_names(n: int) -> list[str]:
    if n <= 4:
        return list("xyzw"[:n])
    return [f"x{i}" for i in range(n)]


class TopRep:
    """A tight graph map ``f: G → G`` with a filtration ``G_1 ⊂ ... ⊂ G_m = G``.

    ``filtration`` is a list of ascending sets of positive edge ids.  When
    omitted the filtration is trivial (``G_1 = G``).
    """

    def __init__(
        self,
        graph: Graph,
        edge_images: Sequence[Sequence[int]],
        filtration: Sequence[Iterable[int]] | None = None,
        vertex_map: Sequence[int] | None = None,
    ):
        self.graph = graph
        self.map = GraphMap(graph, graph, edge_images, vertex_map)
        all_edges = frozenset(graph.positive_edges)
        if filtration is None:
            filtration = [all_edges]
        self.filtration = tuple(frozenset(graph.positive(e) for e in G) for G in filtration)
        self._memo: dict[tuple[int, int], tuple[int, ...]] = {}
        self._lock = threading.Lock()
        self._check()

    def _check(self):
        g = self.graph
        for e in g.positive_edges:
            img = self.map.image(e)
            if not img:
                raise GraphError(f"image of {g.name(e)} is degenerate")
            if not g.is_reduced(img):
                raise GraphError(f"image of {g.name(e)} is not reduced (map is not tight)")
        prev: frozenset[int] = frozenset()
        for i, G in enumerate(self.filtration):
            if not prev < G:
                raise GraphError(f"filtration level {i + 1} does not strictly contain level {i}")
            prev = G
        if prev != frozenset(g.positive_edges):
            raise GraphError("top filtration level must be the whole graph")

    # -- structure --

    @property
    def images(self) -> tuple[tuple[int, ...], ...]:
        return self.map.edge_images

    def image(self, e: int) -> tuple[int, ...]:
        return self.map.image(e)

    @property
    def vertex_map(self) -> tuple[int, ...]:
        return self.map.vertex_map

    def strata(self) -> list[frozenset[int]]:
        out, prev = [], frozenset()
        for G in self.filtration:
            out.append(G - prev)
            prev = G
        return out

    def level_of(self, e: int) -> int:
        """Index ``i`` (0-based) of the stratum containing edge ``e``."""
        p = self.graph.positive(e)
        for i, H in enumerate(self.strata()):
            if p in H:
                return i
        raise GraphError(f"edge {e} is in no stratum")

    def format_image(self, e: int) -> str:
        return self.graph.format_path(self.image(e))

    def Df(self, e: int) -> int:
        return self.image(e)[0]

    def apply(self, path: Iterable[int]) -> list[int]:
        return self.map.apply(path)

    def apply_reduced(self, path: Iterable[int]) -> tuple[int, ...]:
        return self.map.apply_reduced(path)

    def with_filtration(self, filtration) -> "TopRep":
        return TopRep(self.graph, self.images, filtration, self.vertex_map)

    def power(self, k: int) -> "TopRep":
        """``f^k`` with images tightened; keeps the filtration."""
        imgs = [iterate_reduced(self, (e,), k).edges for e in self.graph.positive_edges]
        vm = list(range(self.graph.n_vertices))
        for _ in range(k):
            vm = [self.vertex_map[v] for v in vm]
        return TopRep(self.graph, imgs, self.filtration, vm)

    # -- memoized edge iterates --

    def edge_iterate(self, e: int, n: int, letter_cap: int = DEFAULT_LETTER_CAP) -> tuple[int, ...]:
        """``[f^n(e)]`` for a single directed edge."""
        if n == 0:
            return (e,)
        key = (e, n)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        # find the deepest memoized ancestor, then step forward
        m = n - 1
        with self._lock:
            while m > 0 and (e, m) not in self._memo:
                m -= 1
            cur = self._memo[(e, m)] if m > 0 else (e,)
        for j in range(m + 1, n + 1):
            cur = self.apply_reduced(cur)
            if len(cur) > letter_cap:
                raise TruncationError(j, len(cur))
            if len(cur) <= MEMO_CAP:
                with self._lock:
                    self._memo.setdefault((e, j), cur)
        return cur


def rose_representative(phi: FreeMap, names: Sequence[str] | None = None) -> TopRep:
    """The map on the rose R_N sending petal i to the word image of generator i."""
    phi.require_certified()
    g = Graph.rose(phi.rank, names or _edge_names(phi.rank))
    imgs = []
    for w in phi.images:
        imgs.append(tuple(2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1 for x in w))
    return TopRep(g, imgs)


def occurrence_digraph(f: TopRep) -> dict[int, set[int]]:
    """``e_j → e_i`` whenever ``e_i`` or its inverse occurs in ``f(e_j)``."""
    g = f.graph
    return {e: {g.positive(x) for x in f.image(e)} for e in g.positive_edges}


def stratify(f: TopRep) -> TopRep:
    """Replace the filtration by the finest one read off the occurrence digraph.

    Strata are the strongly connected components, ordered so that each
    level is invariant; ties go to the component with the smallest edge id.
    """
    succ = occurrence_digraph(f)
    digraph = nx.DiGraph()
    digraph.add_nodes_from(succ)
    digraph.add_edges_from((e, x) for e, xs in succ.items() for x in xs)
    comps = sorted(sorted(c) for c in nx.strongly_connected_components(digraph))
    comp_of = {e: i for i, c in enumerate(comps) for e in c}
    deps = {i: {comp_of[x] for e in c for x in succ[e]} - {i} for i, c in enumerate(comps)}
    placed: set[int] = set()
    levels: list[frozenset[int]] = []
    current: set[int] = set()
    while len(placed) < len(comps):
        ready = [i for i in range(len(comps)) if i not in placed and deps[i] <= placed]
        i = min(ready, key=lambda i: comps[i][0])
        placed.add(i)
        current |= set(comps[i])
        levels.append(frozenset(current))
    return f.with_filtration(levels)


# -- turns -------------------------------------------------------------------

def Tf(f: TopRep, turn: tuple[int, int]) -> tuple[int, int]:
    return (f.Df(turn[0]), f.Df(turn[1]))


@dataclass
class TurnLegality:
    turn: tuple[int, int]
    legal: bool
    orbit: list[tuple[int, int]]  # (Tf)^n(turn) for n = 0, 1, ... until a repeat or degeneration
    preperiod: int = 0
    period: int = 0

    def format(self, g: Graph) -> str:
        return " -> ".join("{" + f"{g.name(a)},{g.name(b)}" + "}" for a, b in self.orbit)


def turn_legality(f: TopRep, turn: tuple[int, int]) -> TurnLegality:
    """Follow the ``Tf`` orbit until it degenerates or repeats."""
    g = f.graph
    a, b = turn
    if g.o(a) != g.o(b):
        raise GraphError("edges of a turn must share their origin")
    orbit = [turn]
    seen = {frozenset(turn) if a != b else (a,): 0}
    cur = turn
    while cur[0] != cur[1]:
        cur = Tf(f, cur)
        orbit.append(cur)
        if cur[0] == cur[1]:
            break
        key = frozenset(cur)
        if key in seen:
            first = seen[key]
            orbit.pop()
            return TurnLegality(turn, True, orbit, first, len(orbit) - first)
        seen[key] = len(orbit) - 1
    return TurnLegality(turn, False, orbit)


def _is_legal_turn(f: TopRep, a: int, b: int, cache: dict) -> bool:
    key = frozenset((a, b)) if a != b else (a,)
    if key not in cache:
        cache[key] = turn_legality(f, (a, b)).legal
    return cache[key]


def path_turns(g: Graph, path: Sequence[int]) -> list[tuple[int, int]]:
    """Turns ``{ē_i, e_{i+1}}`` taken by a path."""
    return [(g.inv(path[i]), path[i + 1]) for i in range(len(path) - 1)]


def illegal_turns(f: TopRep, path: Sequence[int], cache: dict | None = None) -> list[int]:
    """Positions ``i`` whose turn ``{ē_i, e_{i+1}}`` is illegal."""
    cache = {} if cache is None else cache
    return [i for i, (a, b) in enumerate(path_turns(f.graph, path)) if not _is_legal_turn(f, a, b, cache)]


# -- train tracks ------------------------------------------------------------

@dataclass
class CancellationWitness:
    edge: int
    n: int
    position: int                 # index i with p[i+1] = inv(p[i]) in the unreduced iterate
    unreduced: tuple[int, ...]    # f^n(edge) before reduction (may be truncated)


@dataclass
class TrainTrackReport:
    is_train_track: bool
    illegal: list[tuple[int, int, TurnLegality]] = field(default_factory=list)  # (edge, position, orbit)
    cancellation: CancellationWitness | None = None
    check_depth: int = 0
    depth_reached: int = 0


def verify_train_track(f: TopRep, check_depth: int = 8, letter_cap: int = 10**6) -> TrainTrackReport:
    """Check every edge image is legal and cross-check that iterates never cancel."""
    g = f.graph
    cache: dict = {}
    rep = TrainTrackReport(True, check_depth=check_depth)
    for e in g.positive_edges:
        img = f.image(e)
        for i in illegal_turns(f, img, cache):
            a, b = path_turns(g, img)[i]
            rep.illegal.append((e, i, turn_legality(f, (a, b))))
    rep.is_train_track = not rep.illegal
    # unreduced iterates f^n(e); the first cancellation is the witness
    cur = {e: (e,) for e in g.positive_edges}
    for n in range(1, check_depth + 1):
        for e in g.positive_edges:
            nxt = tuple(f.apply(cur[e]))
            if len(nxt) > letter_cap:
                return rep
            cur[e] = nxt
            for i in range(len(nxt) - 1):
                if nxt[i + 1] == g.inv(nxt[i]):
                    if rep.cancellation is None:
                        rep.cancellation = CancellationWitness(e, n, i, nxt)
                    break
        rep.depth_reached = n
        if rep.cancellation is not None:
            break
    return rep


# -- matrices ----------------------------------------------------------------

def transition_matrix(f: TopRep, stratum: int | None = None) -> list[list[int]]:
    """``M[i][j]`` counts occurrences of ``e_i`` or ``ē_i`` in ``f(e_j)``.

    With ``stratum`` given, rows and columns are restricted to that
    stratum's positive edges (ascending id).
    """
    g = f.graph
    edges = sorted(f.strata()[stratum]) if stratum is not None else list(g.positive_edges)
    pos = {e: k for k, e in enumerate(edges)}
    M = [[0] * len(edges) for _ in edges]
    for j, e in enumerate(edges):
        for x in f.image(e):
            i = pos.get(g.positive(x))
            if i is not None:
                M[i][j] += 1
    return M


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum(A[i][k] * B[k][j] for k in range(m)) for j in range(p)] for i in range(n)]


def reducing_subset(M: Sequence[Sequence[int]]) -> list[int] | None:
    """A proper nonempty index set closed under ``i → j`` when ``M[j][i] > 0``, or None.

    Such a set spans an invariant sub-block, witnessing reducibility.
    """
    n = len(M)
    succ = {i: {j for j in range(n) if M[j][i] > 0} for i in range(n)}
    for s in range(n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in succ[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) < n:
            return sorted(seen)
    return None


def is_irreducible(M) -> bool:
    return reducing_subset(M) is None and (len(M) > 1 or M[0][0] > 0)


@dataclass
class PFResult:
    kind: str                      # "Zero", "NEG", "EG"
    value: float
    lower: float
    upper: float
    certificate: str
    certificate_power: int = 0
    iterations: int = 0


def pf_classify(M: Sequence[Sequence[int]], tol: float = 1e-9, max_iter: int = 10**5) -> PFResult:
    """Classify a non-negative integer matrix by its Perron–Frobenius eigenvalue.

    The EG/NEG verdict is exact: λ = 1 iff the irreducible matrix is a
    permutation matrix; λ > 1 is certified by a power ``M^k`` whose every
    row sums to at least 2 (so λ^k ≥ 2).  The float value comes from power
    iteration on ``M + I`` with Collatz–Wielandt bounds.
    """
    M = [list(map(int, row)) for row in M]
    n = len(M)
    if n == 0 or all(x == 0 for row in M for x in row):
        return PFResult("Zero", 0.0, 0.0, 0.0, "zero matrix")
    if any(x < 0 for row in M for x in row):
        raise ValueError("matrix has negative entries")
    bad = reducing_subset(M)
    if bad is not None:
        raise ReducibleMatrixError(bad)
    perm = all(sum(row) == 1 for row in M) and all(sum(M[i][j] for i in range(n)) == 1 for j in range(n))
    if perm:
        return PFResult("NEG", 1.0, 1.0, 1.0, "permutation matrix")
    P = M
    k = 1
    while min(sum(row) for row in P) < 2:
        P = _matmul(P, M)
        k += 1
    value, lo, hi, it = _power_iteration(M, tol, max_iter)
    return PFResult("EG", value, lo, hi, f"every row of M^{k} sums to >= 2", k, it)


def _power_iteration(M, tol, max_iter):
    A = np.asarray(M, dtype=float) + np.eye(len(M))
    x = np.ones(len(M))
    lo, hi = 0.0, float("inf")
    it = 0
    for it in range(1, max_iter + 1):
        y = A @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        x = y / y.max()
        if hi - lo < tol * 1e-3:
            break
    return (lo + hi) / 2 - 1, lo - 1, hi - 1, it


def aperiodicity_power(M: Sequence[Sequence[int]]) -> int | None:
    """Smallest k with every entry of M^k positive, or None (k ≤ (n-1)² + 1 suffices)."""
    n = len(M)
    bound = (n - 1) ** 2 + 1
    B = [[1 if x > 0 else 0 for x in row] for row in M]
    P = B
    for k in range(1, bound + 1):
        if all(x > 0 for row in P for x in row):
            return k
        P = [[1 if x else 0 for x in row] for row in _matmul(P, B)]
    return None


# -- relative train tracks ---------------------------------------------------

@dataclass
class StratumInfo:
    index: int                     # 1-based, as in G_1 ⊂ G_2 ⊂ ...
    edges: tuple[int, ...]
    matrix: list[list[int]]
    kind: str                      # Zero / NEG / EG / reducible
    pf: PFResult | None = None
    invariant_subset: list[int] | None = None


def classify_strata(f: TopRep) -> list[StratumInfo]:
    out = []
    for i, H in enumerate(f.strata()):
        M = transition_matrix(f, i)
        try:
            pf = pf_classify(M)
            out.append(StratumInfo(i + 1, tuple(sorted(H)), M, pf.kind, pf))
        except ReducibleMatrixError as err:
            edges = sorted(H)
            out.append(StratumInfo(i + 1, tuple(edges), M, "reducible",
                                   invariant_subset=[edges[k] for k in err.invariant]))
    return out


@dataclass
class ConditionResult:
    name: str
    passed: bool
    detail: list[str] = field(default_factory=list)


@dataclass
class RTTReport:
    strata: list[StratumInfo]
    conditions: list[ConditionResult]
    paths_checked: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        return next(c for c in self.conditions if c.name == name)


def reduced_paths(g: Graph, max_len: int, allowed: set[int] | None = None, min_len: int = 1):
    """All reduced edge paths of length ``min_len..max_len`` inside ``allowed``."""
    edges = [e for e in range(g.n_edges) if allowed is None or g.positive(e) in allowed]

    def grow(path):
        if len(path) >= min_len:
            yield tuple(path)
        if len(path) == max_len:
            return
        for e in (edges if not path else g.star(g.t(path[-1]))):
            if allowed is not None and g.positive(e) not in allowed:
                continue
            if path and e == g.inv(path[-1]):
                continue
            path.append(e)
            yield from grow(path)
            path.pop()

    for e in sorted(edges):
        yield from grow([e])


def _vertices_of(g: Graph, edges: Iterable[int]) -> set[int]:
    return {v for e in edges for v in (g.o(e), g.t(e))}


def is_r_legal(f: TopRep, path: Sequence[int], lower: frozenset[int], cache: dict) -> bool:
    """Only illegal turns of ``path`` lie in ``G_{r-1}`` (both edges in ``lower``)."""
    g = f.graph
    for a, b in path_turns(g, path):
        if g.positive(a) in lower and g.positive(b) in lower:
            continue
        if not _is_legal_turn(f, a, b, cache):
            return False
    return True


def split_by_stratum(g: Graph, path: Sequence[int], H: frozenset[int]) -> list[tuple[bool, tuple[int, ...]]]:
    """Maximal runs of a path alternately inside ``H`` (True) and outside it."""
    out: list[tuple[bool, list[int]]] = []
    for e in path:
        inside = g.positive(e) in H
        if out and out[-1][0] == inside:
            out[-1][1].append(e)
        else:
            out.append((inside, [e]))
    return [(k, tuple(p)) for k, p in out]


@dataclass
class SplittingCheck:
    path: tuple[int, ...]
    ok: bool
    r_legal_image: bool
    reduced_image: tuple[int, ...]
    spliced: tuple[int, ...]


def check_splitting(f: TopRep, r: int, sigma: Sequence[int], cache: dict | None = None) -> SplittingCheck:
    """Compare ``[f(σ)]`` with ``f(a_1)[f(b_1)]f(a_2)⋯`` for the stratum-``r`` split of σ."""
    g = f.graph
    cache = {} if cache is None else cache
    H = f.strata()[r]
    lower = f.filtration[r - 1] if r > 0 else frozenset()
    spliced: list[int] = []
    for inside, piece in split_by_stratum(g, sigma, H):
        spliced.extend(f.apply(piece) if inside else f.apply_reduced(piece))
    red = f.apply_reduced(sigma)
    return SplittingCheck(tuple(sigma), tuple(spliced) == red, is_r_legal(f, red, lower, cache), red, tuple(spliced))


def verify_rtt(
    f: TopRep,
    test_paths: Iterable[Sequence[int]] = (),
    path_len: int = 4,
) -> RTTReport:
    """Check the relative train track conditions against the filtration.

    Conditions 3(b), 3(c) and the splitting property are checked on every
    reduced path up to ``path_len`` edges plus any ``test_paths``.
    """
    g = f.graph
    strata = classify_strata(f)
    conds: list[ConditionResult] = []
    cache: dict = {}
    extra = [tuple(p) for p in test_paths]

    c = ConditionResult("invariant filtration", True)
    for i, G in enumerate(f.filtration):
        for e in sorted(G):
            stray = [x for x in f.image(e) if g.positive(x) not in G]
            if stray:
                c.passed = False
                c.detail.append(f"G_{i + 1}: f({g.name(e)}) leaves the level through {g.name(stray[0])}")
    conds.append(c)

    c = ConditionResult("1 no valence-one vertices", True)
    for v in range(g.n_vertices):
        if g.valence(v) <= 1:
            c.passed = False
            c.detail.append(f"vertex {v} has valence {g.valence(v)}")
    conds.append(c)

    c = ConditionResult("2 irreducible strata", True)
    for s in strata:
        if s.kind == "reducible":
            c.passed = False
            names = ", ".join(g.name(e) for e in s.invariant_subset)
            c.detail.append(f"H_{s.index}: invariant edge subset {{{names}}}")
    conds.append(c)

    c3a = ConditionResult("3a Df preserves EG strata", True)
    c3b = ConditionResult("3b lower paths stay nontrivial", True)
    c3c = ConditionResult("3c legal paths map to i-legal paths", True)
    csp = ConditionResult("splitting of r-legal paths", True)
    checked = 0
    for s in strata:
        if s.kind != "EG":
            continue
        i = s.index - 1
        H = f.strata()[i]
        lower = f.filtration[i - 1] if i > 0 else frozenset()
        level = f.filtration[i]
        for e in sorted(H):
            for d in (e, g.inv(e)):
                if g.positive(f.Df(d)) not in H:
                    c3a.passed = False
                    c3a.detail.append(f"Df({g.name(d)}) = {g.name(f.Df(d))} not in H_{s.index}")
        hv = _vertices_of(g, H)
        for p in itertools.chain(reduced_paths(g, path_len, set(lower)), (p for p in extra if _within(g, p, lower))):
            if g.o(p[0]) in hv and g.t(p[-1]) in hv:
                checked += 1
                if not f.apply_reduced(p):
                    c3b.passed = False
                    c3b.detail.append(f"H_{s.index}: [f({g.format_path(p)})] is trivial")
        for p in itertools.chain(reduced_paths(g, path_len, set(H)), (p for p in extra if _within(g, p, H))):
            if illegal_turns(f, p, cache):
                continue
            checked += 1
            img = f.apply(p)
            if not is_r_legal(f, img, lower, cache):
                c3c.passed = False
                c3c.detail.append(f"H_{s.index}: f({g.format_path(p)}) is not {s.index}-legal")
        for p in itertools.chain(reduced_paths(g, path_len, set(level)), (p for p in extra if _within(g, p, level))):
            if not is_r_legal(f, p, lower, cache):
                continue
            checked += 1
            res = check_splitting(f, i, p, cache)
            if not (res.ok and res.r_legal_image):
                csp.passed = False
                csp.detail.append(f"H_{s.index}: splitting fails on {g.format_path(p)}")
    for cond in (c3a, c3b, c3c, csp):
        cond.detail = cond.detail[:20]
    conds += [c3a, c3b, c3c, csp]
    return RTTReport(strata, conds, checked)


def _within(g: Graph, p: Sequence[int], edges: frozenset[int]) -> bool:
    return bool(p) and all(g.positive(e) in edges for e in p)


@dataclass
class GoodRTTReport:
    rtt: RTTReport
    conditions: list[ConditionResult]
    convention_power: int | None = None   # smallest k with M_t^k > 0, EG top only
    neg_forms: dict[int, tuple[int, tuple[int, ...]]] = field(default_factory=dict)  # stratum -> (e0, u)

    @property
    def passed(self) -> bool:
        return self.rtt.passed and all(c.passed for c in self.conditions)


def verify_good_rtt(f: TopRep, rtt: RTTReport | None = None) -> GoodRTTReport:
    """Aperiodic EG strata, no zero top stratum, NEG strata of the form ``f(e_0) = e_0 u``."""
    g = f.graph
    rtt = rtt or verify_rtt(f)
    strata = rtt.strata
    ap = ConditionResult("1 EG strata aperiodic", True)
    zero = ConditionResult("2 zero stratum not on top", True)
    neg = ConditionResult("3 NEG strata are single edges e0 -> e0 u", True)
    rep = GoodRTTReport(rtt, [ap, zero, neg])
    for s in strata:
        i = s.index - 1
        if s.kind == "EG":
            k = aperiodicity_power(s.matrix)
            if k is None:
                ap.passed = False
                ap.detail.append(f"H_{s.index}: no positive power")
            else:
                ap.detail.append(f"H_{s.index}: M^{k} > 0")
        elif s.kind == "Zero" and i == len(strata) - 1:
            zero.passed = False
            zero.detail.append(f"H_{s.index} is a zero top stratum")
        elif s.kind == "NEG":
            form = _neg_form(f, i)
            if isinstance(form, str):
                neg.passed = False
                neg.detail.append(f"H_{s.index}: {form}")
            else:
                rep.neg_forms[s.index] = form
                e0, u = form
                neg.detail.append(f"H_{s.index}: f({g.name(e0)}) = {g.name(e0)} . {g.format_path(u)}")
    top = strata[-1]
    if top.kind == "EG":
        rep.convention_power = aperiodicity_power(top.matrix)
    return rep


def _neg_form(f: TopRep, i: int):
    g = f.graph
    H = sorted(f.strata()[i])
    if len(H) != 1:
        return f"{len(H)} edges in an NEG stratum"
    lower = f.filtration[i - 1] if i > 0 else frozenset()
    for e0 in (H[0], g.inv(H[0])):
        img = f.image(e0)
        if img[0] != e0:
            continue
        u = img[1:]
        if any(g.positive(x) not in lower for x in u):
            continue
        v = g.t(e0)
        if u and (g.o(u[0]) != v or g.t(u[-1]) != v):
            continue
        if f.vertex_map[v] != v:
            continue
        return e0, tuple(u)
    return f"f({g.name(H[0])}) = {f.format_image(H[0])} has no form e0 u with u closed in G_{i} at a fixed vertex"


# -- iteration and diagnostics -----------------------------------------------

def iterate_reduced(
    f: TopRep,
    p: EdgePath | CyclicEdgePath | Sequence[int],
    n: int,
    letter_cap: int = DEFAULT_LETTER_CAP,
):
    """``[f^n(p)]`` for a path, or ``[[f^n(p)]]`` for a cyclic path.

    Per-edge iterates are memoized, which is legitimate because
    ``[f^n(e_0 e_1 ⋯)] = [[f^n(e_0)] [f^n(e_1)] ⋯]``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    g = f.graph
    cyclic = isinstance(p, CyclicEdgePath)
    if isinstance(p, EdgePath):
        start = p.start
        edges = p.edges
    else:
        edges = tuple(p)
        start = g.o(edges[0]) if edges else 0
    inv = g.inverse
    out: list[int] = []
    for e in edges:
        for x in f.edge_iterate(e, n, letter_cap):
            if out and out[-1] == inv[x]:
                out.pop()
            else:
                out.append(x)
        if len(out) > letter_cap:
            raise TruncationError(n, len(out))
    if cyclic:
        return g.cyclic_reduce(out)
    v = start
    for _ in range(n):
        v = f.vertex_map[v]
    return EdgePath(tuple(out), v)


def window_constant(f: TopRep) -> tuple[int, int]:
    """``(K, L)`` with K the largest top-stratum letter count of an edge image, L = 2K."""
    strata = classify_strata(f)
    if strata[-1].kind != "EG":
        raise GraphError("top stratum is not exponentially growing")
    g = f.graph
    H = f.strata()[-1]
    K = max(sum(1 for x in f.image(e) if g.positive(x) in H) for e in H)
    return K, 2 * K


def windows_cover(g: Graph, path: Sequence[int], L: int, edges: Iterable[int]) -> bool:
    """Every length-``L`` window of ``path`` crosses each of ``edges``."""
    need = {g.positive(e) for e in edges}
    return all(
        need <= {g.positive(x) for x in path[i:i + L]} for i in range(len(path) - L + 1)
    )


@dataclass
class PowerScan:
    k: int
    argmax: int
    per_n: list[int]
    stabilized: bool


def stabilized(values: Sequence[int]) -> bool:
    """Running maximum unchanged over the final quarter of the values."""
    if not values:
        return True
    cut = len(values) - max(1, len(values) // 4)
    running = max(values[:cut]) if cut > 0 else values[0]
    return running == max(values)


def max_cyclic_power_in_iterates(
    f: TopRep,
    alpha: CyclicEdgePath | Sequence[int],
    source: int | CyclicEdgePath,
    horizon: int,
    letter_cap: int = DEFAULT_LETTER_CAP,
) -> PowerScan:
    """Largest k with ``α^k`` a subpath of ``[f^n(source)]``, ``0 ≤ n ≤ horizon``."""
    g = f.graph
    block = tuple(alpha)
    cyclic = isinstance(source, CyclicEdgePath)
    per_n = []
    for n in range(horizon + 1):
        if cyclic:
            img = iterate_reduced(f, source, n, letter_cap).edges
        else:
            img = iterate_reduced(f, (source,), n, letter_cap).edges
        per_n.append(_seq.max_block_power(img, block, g.inverse.__getitem__, cyclic=cyclic))
    k = max(per_n)
    return PowerScan(k, per_n.index(k), per_n, stabilized(per_n))


def cancellation(f: TopRep, a: Sequence[int], b: Sequence[int]) -> int:
    """Edges cancelled between ``[f(a)]`` and ``[f(b)]`` when forming ``[f(ab)]``."""
    fa, fb = f.apply_reduced(a), f.apply_reduced(b)
    return (len(fa) + len(fb) - len(f.apply_reduced(tuple(a) + tuple(b)))) // 2


def bcc_estimate(f: TopRep, len_cap: int) -> tuple[int, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Largest cancellation seen in ``[f(α)][f(β)]`` over reduced ``αβ``, ``|α|, |β| ≤ len_cap``.

    A lower bound for the bounded cancellation constant.  Returns the
    constant and a pair attaining it.
    """
    g = f.graph
    paths = list(reduced_paths(g, len_cap))
    images = {p: f.apply_reduced(p) for p in paths}
    by_origin: dict[int, list[tuple[int, ...]]] = {}
    for p in paths:
        by_origin.setdefault(g.o(p[0]), []).append(p)
    best, pair = 0, None
    inv = g.inverse
    for a in paths:
        fa = images[a]
        for b in by_origin.get(g.t(a[-1]), ()):
            if b[0] == inv[a[-1]]:
                continue
            fb = images[b]
            c = 0
            while c < min(len(fa), len(fb)) and fa[len(fa) - 1 - c] == inv[fb[c]]:
                c += 1
            if c > best:
                best, pair = c, (a, b)
    return best, pair
