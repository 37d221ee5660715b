"""Non-rigidity witnesses: two marked metric graphs with equal lengths on a sample.

For a fixed graph and marking the translation length of every σ is the
dot product of its crossing vector with the edge lengths.  Any nonzero δ
orthogonal to all sampled crossing vectors therefore moves the lengths
without changing ‖σ‖ for sampled σ; a distinguishing word certifies that
the two points differ.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .freegroup import CyclicWord, FreeMap, Word, all_cyclic_words, cyclic_reduce, max_power, orbit
from .graph import Graph
from .outerspace import MarkedMetricGraph, crossing_vector, dot, translation_length

log = logging.getLogger(__name__)

LOOP_NAMES = "xyzwuvst"


def _loop_names(n: int) -> list[str]:
    return list(LOOP_NAMES[:n]) if n <= len(LOOP_NAMES) else [f"x{i}" for i in range(n)]


# -- candidate graphs --------------------------------------------------------

def rose(N: int) -> MarkedMetricGraph:
    g = Graph.rose(N, _loop_names(N))
    return MarkedMetricGraph(g, [(2 * i,) for i in range(N)], [1] * N, name="rose")


def hung_loops(N: int, hung: Sequence[int], twist: tuple[int, int] | None = None) -> MarkedMetricGraph:
    """Loops for the other generators at v0, loops for ``hung`` at v1, connector ``e``.

    Edge order: v0 loops (generator order), v1 loops, then ``e``.  A hung
    generator ``j`` is marked ``e z_j ē``.  With ``twist = (i, k)`` the
    marking of each hung generator becomes ``e z_j ē x_i^{-k}``, i.e. the
    loop ``z_j`` represents ``a_j a_i^k`` rather than ``a_j``.
    """
    hung = list(hung)
    rest = [i for i in range(N) if i not in hung]
    names = _loop_names(N)
    edges = [(0, 0)] * len(rest) + [(1, 1)] * len(hung) + [(0, 1)]
    g = Graph.from_edges(2, edges, names + ["e"])
    conn = 2 * N
    marking: list[tuple[int, ...]] = [()] * N
    for pos, i in enumerate(rest):
        marking[i] = (2 * pos,)
    for pos, j in enumerate(hung):
        loop = 2 * (len(rest) + pos)
        marking[j] = (conn, loop, conn + 1)
    label = ",".join(chr(ord("a") + j) for j in hung)
    if twist is not None:
        i, k = twist
        xi = marking[i][0] ^ 1
        for j in hung:
            marking[j] = marking[j] + (xi,) * k
        label += f"; {chr(ord('a') + i)}^{k}"
    kind = "barbell" if N == 2 else "hung-loop" if len(hung) == 1 else "barbell"
    return MarkedMetricGraph(g, marking, [1] * (N + 1), name=f"{kind}[{label}]")


def theta(N: int) -> MarkedMetricGraph:
    """Three edges p, q, r from v0 to v1, plus loops at v0 for generators past b."""
    extra = N - 2
    g = Graph.from_edges(2, [(0, 1)] * 3 + [(0, 0)] * extra, ["p", "q", "r"] + _loop_names(extra))
    marking = [(0, 3), (0, 5)] + [(6 + 2 * i,) for i in range(extra)]
    return MarkedMetricGraph(g, marking, [1] * (3 + extra), name="theta")


def candidate_graphs(
    N: int, twists: Iterable[tuple[int, int]] = (), family: str = "default"
) -> list[MarkedMetricGraph]:
    """Deterministic family of marked graphs with unit lengths.

    Order: rose; one hung loop for each generator (last generator first);
    twisted hung loops for each ``(letter, k)`` in ``twists``; theta;
    barbells with several hung loops (N ≥ 4).
    """
    if N < 2:
        raise ValueError("need rank >= 2")
    out = [rose(N)]
    if family == "rose-only":
        return out
    hung = [hung_loops(N, [j]) for j in reversed(range(N))]
    twisted = [
        hung_loops(N, [j], (i, k)) for i, k in twists for j in reversed(range(N)) if j != i
    ]
    if family in ("hung", "barbell"):
        return out + hung
    if family == "twisted":
        return out + twisted
    multi = [hung_loops(N, list(range(N - m, N))) for m in range(2, N - 1)]
    if family == "theta":
        return out + [theta(N)]
    if family != "default":
        raise ValueError(f"unknown graph family {family!r}")
    return out + hung + twisted + [theta(N)] + multi


GRAPH_FAMILIES = ("default", "rose-only", "hung", "barbell", "twisted", "theta")


# -- exact linear algebra ------------------------------------------------------

@dataclass
class CrossingMatrix:
    graph: MarkedMetricGraph
    labels: list
    rows: list[tuple[int, ...]]

    @property
    def n_cols(self) -> int:
        return len(self.graph.lengths)


def crossing_matrix(T: MarkedMetricGraph, sample: Sequence[tuple[object, Word]]) -> CrossingMatrix:
    if not sample:
        raise ValueError("sample is empty")
    labels, rows = [], []
    for label, w in sample:
        labels.append(label)
        rows.append(crossing_vector(T, w))
    return CrossingMatrix(T, labels, rows)


def rref(rows: Iterable[Sequence[int]], n_cols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    R: list[list[Fraction]] = []
    pivots: list[int] = []
    for raw in dict.fromkeys(tuple(r) for r in rows):
        v = [Fraction(x) for x in raw]
        for r, p in zip(R, pivots):
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, r)]
        lead = next((j for j, x in enumerate(v) if x), None)
        if lead is None:
            continue
        v = [x / v[lead] for x in v]
        for idx, r in enumerate(R):
            if r[lead]:
                c = r[lead]
                R[idx] = [a - c * b for a, b in zip(r, v)]
        R.append(v)
        pivots.append(lead)
        if len(pivots) == n_cols:
            break
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [R[i] for i in order], [pivots[i] for i in order]


def nullspace_basis(rows: Iterable[Sequence[int]], n_cols: int) -> list[tuple[int, ...]]:
    """Integer basis of the right nullspace, one vector per free column (ascending)."""
    R, pivots = rref(rows, n_cols)
    out = []
    for f in (j for j in range(n_cols) if j not in pivots):
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, p in zip(R, pivots):
            v[p] = -r[f]
        out.append(_primitive_integer(v))
    return out


def _primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def max_step(delta: Sequence[int], lengths: Sequence[Fraction], rho: Fraction) -> Fraction | None:
    """Largest t ≥ 0 with ``l + tδ ≥ ρ·l`` componentwise; None if unbounded."""
    steps = [(1 - rho) * l / -d for d, l in zip(delta, lengths) if d < 0]
    return min(steps) if steps else None


def nullspace_direction(
    M: CrossingMatrix | Sequence[Sequence[int]],
    lengths: Sequence[Fraction],
    rho: Fraction = Fraction(1, 2),
) -> tuple[tuple[int, ...], Fraction | None] | None:
    """First nullspace vector δ (scaled to coprime integers) and its step bound t*."""
    rho = Fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("need 0 < rho < 1")
    rows = M.rows if isinstance(M, CrossingMatrix) else M
    basis = nullspace_basis(rows, len(lengths))
    if not basis:
        return None
    delta = basis[0]
    if any(sum(a * b for a, b in zip(r, delta)) for r in rows):
        raise ArithmeticError("nullspace vector fails to annihilate a row")
    return delta, max_step(delta, lengths, rho)


# -- witnesses -------------------------------------------------------------

@dataclass
class GraphAttempt:
    name: str
    rank: int | None         # None when the graph was never evaluated
    distinct_rows: int | None
    success: bool
    note: str = ""


@dataclass
class WitnessPair:
    T1: MarkedMetricGraph
    T2: MarkedMetricGraph
    delta: tuple[int, ...]
    t: Fraction
    t_star: Fraction | None
    w_star: CyclicWord
    w_star_lengths: tuple[Fraction, Fraction]
    sample: str
    transcript: list[tuple[object, int, Fraction, Fraction]]
    identity: str
    attempts: list[GraphAttempt] = field(default_factory=list)

    def verify(self) -> list[str]:
        """Re-check every invariant; returns a list of failures (empty if valid)."""
        bad = []
        if any(x <= 0 for x in self.T2.lengths):
            bad.append("non-positive length in T2")
        for label, _, l1, l2 in self.transcript:
            if l1 != l2:
                bad.append(f"lengths differ on {label}")
        a, b = self.w_star_lengths
        if a == b:
            bad.append("certificate word does not distinguish")
        return bad


def orbit_sample(
    phi: FreeMap, g: Word, horizon: int, forward_only: bool = False, letter_cap: int = 10**7
) -> list[tuple[int, CyclicWord]]:
    """``[[Φⁿ(g)]]`` for ``|n| ≤ horizon`` (or ``0 ≤ n``); n = 0 is g itself."""
    lo = 0 if forward_only else -horizon
    orb = orbit(phi, g, lo, horizon, letter_cap)
    out = sorted(orb, key=lambda item: item[0])
    for tr in orb.truncations:
        log.warning("orbit truncated in direction %+d after n=%d", tr.direction, tr.last_n)
    return out


def twists_for(sample: Sequence[tuple[object, Word]], N: int) -> list[tuple[int, int]]:
    """``(letter, M+1)`` per generator, letters with smaller observed M first."""
    Ms = [max((max_power(cyclic_reduce(w), i) for _, w in sample), default=0) for i in range(N)]
    return [(i, Ms[i] + 1) for i in sorted(range(N), key=lambda i: (Ms[i], i))]


def distinguishing_word(
    T1: MarkedMetricGraph, T2: MarkedMetricGraph, max_len: int = 6
) -> CyclicWord | None:
    """Shortest cyclic word (first in enumeration order) with different lengths."""
    if not T1.same_marking(T2):
        raise ValueError("T1 and T2 must share graph and marking")
    diff = [b - a for a, b in zip(T1.lengths, T2.lengths)]
    if not any(diff):
        return None
    for n in range(1, max_len + 1):
        for w in all_cyclic_words(T1.rank, n):
            if dot(crossing_vector(T1, w), diff) != 0:
                return w
    return None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CVN_RIGIDITY_THREADS", "1")))
    except ValueError:
        return 1


def _identity_note(T: MarkedMetricGraph, delta: Sequence[int]) -> str:
    g = T.graph
    terms = []
    for k, d in enumerate(delta):
        if d:
            coef = "" if abs(d) == 1 else f"{abs(d)}*"
            terms.append(("- " if d < 0 else "+ ") + f"{coef}#{g.names[k]}")
    body = " ".join(terms).lstrip("+ ")
    return f"{body} = 0 on every sampled crossing row"


def build_witness(
    phi: FreeMap | None,
    g: Word | None,
    horizon: int = 10,
    graphs: Sequence[MarkedMetricGraph] | str | None = None,
    rho: Fraction = Fraction(1, 2),
    forward_only: bool = False,
    max_word_len: int = 6,
    sample: Sequence[tuple[object, Word]] | None = None,
    letter_cap: int = 10**7,
) -> tuple[WitnessPair | None, list[GraphAttempt]]:
    """Search the candidate family for a length-preserving direction on the sample.

    The sample is the orbit of ``g`` (both directions unless
    ``forward_only``), or the explicit ``sample`` of ``(label, word)``
    pairs.  Returns the first verified witness in family order together
    with a per-graph attempt report.
    """
    if sample is None:
        phi.require_certified()
        sample = orbit_sample(phi, g, horizon, forward_only, letter_cap)
        desc = f"[[Phi^n(g)]] for {'0' if forward_only else -horizon} <= n <= {horizon}"
    else:
        desc = f"explicit sample of {len(sample)} words"
    N = phi.rank if phi is not None else max(w.max_index() for _, w in sample) + 1
    if graphs is None or isinstance(graphs, str):
        graphs = candidate_graphs(N, twists_for(sample, N), graphs or "default")

    def search(T: MarkedMetricGraph):
        M = crossing_matrix(T, sample)
        R, piv = rref(M.rows, M.n_cols)
        found = nullspace_direction(M, T.lengths, rho) if len(piv) < M.n_cols else None
        return M, len(piv), found

    def settle(T: MarkedMetricGraph, M: CrossingMatrix, rank: int, found) -> tuple[GraphAttempt, WitnessPair | None]:
        distinct = len(set(M.rows))
        if found is None:
            return GraphAttempt(T.name, rank, distinct, False, "full column rank"), None
        delta, t_star = found
        t = t_star / 2 if t_star is not None else Fraction(1)
        T2 = T.with_lengths([l + t * d for l, d in zip(T.lengths, delta)])
        w_star = distinguishing_word(T, T2, max_word_len)
        if w_star is None:
            return GraphAttempt(T.name, rank, distinct, False, "no distinguishing word"), None
        transcript = []
        for (label, w), row in zip(sample, M.rows):
            transcript.append((label, len(w), dot(row, T.lengths), dot(row, T2.lengths)))
        pair = WitnessPair(
            T, T2, delta, t, t_star, w_star,
            (translation_length(T, w_star), translation_length(T2, w_star)),
            desc, transcript, _identity_note(T, delta),
        )
        bad = pair.verify()
        if bad:
            raise AssertionError("; ".join(bad))
        return GraphAttempt(T.name, rank, distinct, True), pair

    # graphs are searched in family-order batches of one per worker; the
    # first success in family order wins and later batches are skipped
    attempts: list[GraphAttempt] = []
    witness = None
    threads = _threads()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, len(graphs), threads):
            batch = graphs[start:start + threads]
            for T, (M, rank, found) in zip(batch, pool.map(search, batch)):
                if witness is not None:
                    attempts.append(GraphAttempt(T.name, rank, len(set(M.rows)), False, "not needed"))
                    continue
                attempt, witness = settle(T, M, rank, found)
                attempts.append(attempt)
            if witness is not None:
                break
    for T in graphs[len(attempts):]:
        attempts.append(GraphAttempt(T.name, None, None, False, "not evaluated"))
    if witness is not None:
        witness.attempts = attempts
    return witness, attempts
