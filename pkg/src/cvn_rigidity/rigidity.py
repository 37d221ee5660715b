"""Horizon-bounded checks of the bounded-power properties W, W* and P.

Everything here reports evidence on a finite sample: the largest power
seen, whether that maximum stopped moving over the last quarter of the
sample, and any truncation.  Nothing claims a property for an infinite set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .freegroup import (
    CyclicWord,
    FreeMap,
    RankMismatchError,
    Truncation,
    Word,
    cyclic_reduce,
    extend_to_basis,
    from_basis_a_bak,
    max_power,
    orbit,
    to_basis_a_bak,
)
from .graph import diameter, primitive_loop_crossing, extend_to_cross
from .trainmap import TopRep, bcc_estimate, classify_strata, stabilized

DIRECTIONS = ("fwd", "bwd", "both")


@dataclass
class PropertyWReport:
    letter: int
    horizon: tuple[int, int]
    M: int
    stabilized: bool
    per_n: list[tuple[int, int]]
    basis: str = "standard"
    truncations: list[Truncation] = field(default_factory=list)

    @property
    def argmax(self) -> int | None:
        return next((n for n, k in self.per_n if k == self.M), None)


def check_property_W(
    sigma: Iterable[CyclicWord | Word | tuple[int, Word]],
    letter: int,
    basis: str = "standard",
) -> PropertyWReport:
    """Largest |k| with ``a^k`` a cyclic subword of some σ, in stream order.

    ``sigma`` yields words or ``(n, word)`` pairs; plain words are numbered
    0, 1, 2, ...
    """
    per_n: list[tuple[int, int]] = []
    for i, item in enumerate(sigma):
        n, w = item if isinstance(item, tuple) else (i, item)
        per_n.append((n, max_power(cyclic_reduce(w), letter)))
    values = [k for _, k in per_n]
    ns = [n for n, _ in per_n] or [0]
    trunc = list(getattr(sigma, "truncations", []))
    return PropertyWReport(
        letter, (min(ns), max(ns)), max(values, default=0), stabilized(values), per_n, basis, trunc
    )


@dataclass
class PropertyPReport:
    letter: int
    horizon: int
    by_direction: dict[str, PropertyWReport]

    @property
    def M(self) -> int:
        return max(r.M for r in self.by_direction.values())

    @property
    def stabilized(self) -> bool:
        return all(r.stabilized for r in self.by_direction.values())

    @property
    def truncated(self) -> bool:
        return any(r.truncations for r in self.by_direction.values())


def check_property_P(
    phi: FreeMap,
    g: Word,
    letter: int,
    horizon: int,
    direction: str = "both",
    letter_cap: int = 10**7,
) -> PropertyPReport:
    """Bounded powers of ``a`` along ``[[Φⁿ(g)]]`` for ``n`` in ``[0, h]`` and/or ``[-h, 0]``."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    phi.require_certified()
    out = {}
    if direction in ("fwd", "both"):
        out["fwd"] = check_property_W(orbit(phi, g, 0, horizon, letter_cap), letter)
    if direction in ("bwd", "both"):
        # the backward stream starts with n = 0 and then walks n = -1, -2, ...
        out["bwd"] = check_property_W(orbit(phi, g, -horizon, 0, letter_cap), letter)
    return PropertyPReport(letter, horizon, out)


# -- W -> W* ---------------------------------------------------------------

@dataclass
class WStarEntry:
    sigma: CyclicWord
    rewritten: CyclicWord
    in_cyclic_subgroup: bool
    max_t: int


@dataclass
class PropertyWStarReport:
    k: int
    letter: int
    condition1: list[WStarEntry] = field(default_factory=list)
    condition2: list[WStarEntry] = field(default_factory=list)
    entries: list[WStarEntry] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.condition1 and not self.condition2


def _swap(w: Word) -> Word:
    return Word((3 - abs(x)) * (1 if x > 0 else -1) for x in w)


def w_to_wstar(
    sigma: Iterable[Word], M: int, letter: int = 0, k: int | None = None
) -> PropertyWStarReport:
    """Rewrite Σ over ``{a, b′ = b aᵏ}`` and check both W* conditions.

    ``letter`` is the basis letter playing the role of ``a`` (0 or 1); with
    ``letter=1`` the generators are swapped first.  ``k`` defaults to M + 1.
    Condition 1 fails when the rewritten class is a nontrivial power of b′;
    condition 2 fails when some ``b′^t`` with |t| ≥ 2 is a cyclic subword.
    """
    if letter not in (0, 1):
        raise RankMismatchError("W* is a rank-2 property")
    k = M + 1 if k is None else k
    rep = PropertyWStarReport(k, letter)
    for w in sigma:
        if w.max_index() > 1:
            raise RankMismatchError("W* is a rank-2 property")
        base = _swap(w) if letter == 1 else w
        r = to_basis_a_bak(base, k)
        only_bprime = bool(r.letters) and all(abs(x) == 2 for x in r.letters)
        t = max_power(r, 1)
        entry = WStarEntry(cyclic_reduce(w), r, only_bprime, t)
        rep.entries.append(entry)
        if only_bprime:
            rep.condition1.append(entry)
        if t >= 2:
            rep.condition2.append(entry)
    return rep


def wstar_roundtrip(entry: WStarEntry, k: int, letter: int = 0) -> CyclicWord:
    back = from_basis_a_bak(entry.rewritten, k)
    return cyclic_reduce(_swap(back)) if letter == 1 else back


# -- iterates ---------------------------------------------------------------

@dataclass
class PtpCheck:
    l: int
    h: int
    direct: int
    per_r: list[int]

    @property
    def agrees(self) -> bool:
        return self.direct == max(self.per_r)


def ptp_factorization(phi: FreeMap, g: Word, letter: int, l: int, h: int) -> PtpCheck:
    """Compare the forward bound for Φ with the bounds for Φˡ started at Φʳ(g).

    Φ is run for ``n ≤ l·h + l − 1``, which is exactly the set of
    ``q·l + r`` with ``q ≤ h`` and ``0 ≤ r < l``.
    """
    direct = check_property_P(phi, g, letter, l * h + l - 1, "fwd").M
    psi = phi.power(l)
    per_r = []
    start = cyclic_reduce(g)
    for r in range(l):
        per_r.append(check_property_P(psi, start, letter, h, "fwd").M)
        start = cyclic_reduce(phi(start))
    return PtpCheck(l, h, direct, per_r)


# -- choosing (basis, letter) -----------------------------------------------

@dataclass
class Candidate:
    word: Word
    basis: FreeMap | None
    reason: str
    crossings: int = 0
    M_required: int | None = None
    inequality_verified: bool | None = None


def _path_word(f: TopRep, path: Sequence[int]) -> Word:
    # rose edges 2i / 2i+1 are the generator i and its inverse
    return Word((e // 2 + 1) * (1 if e % 2 == 0 else -1) for e in path)


def suggest_pair(
    phi: FreeMap,
    f: TopRep,
    f_inverse: TopRep | None = None,
    bcc_bound: int | None = None,
    bcc_len: int = 3,
) -> list[Candidate]:
    """Propose letters ``a`` (as primitive words) worth testing for property P.

    ``f`` (and ``f_inverse``) must be stratified representatives on roses
    with the standard marking.  NEG top stratum: the top edge's letter.  EG
    top stratum equal to the whole graph: every basis letter.  Otherwise a
    primitive loop crossing the top stratum at least ``M`` times with
    ``M > 2(diam G + BCC)``.
    """
    g = f.graph
    if g.n_vertices != 1:
        raise ValueError("suggest_pair works with representatives on the rose")
    strata = classify_strata(f)
    top = strata[-1]
    out: list[Candidate] = []
    if top.kind == "NEG":
        e0 = top.edges[0]
        w = Word.generator(e0 // 2)
        out.append(Candidate(w, extend_to_basis(w, phi.rank), "NEG top edge"))
        return out
    if top.kind != "EG":
        raise ValueError(f"top stratum is {top.kind}; need EG or NEG")
    if len(strata) == 1:
        for i in range(phi.rank):
            w = Word.generator(i)
            out.append(Candidate(w, extend_to_basis(w, phi.rank), "single EG stratum: any basis letter"))
        return out
    verified = bcc_bound is not None
    bcc = bcc_bound if verified else bcc_estimate(f, bcc_len)[0]
    M = 2 * (diameter(g) + bcc) + 1
    H = set(top.edges)
    loop = primitive_loop_crossing(g, H, top.edges[0], M)
    w = _path_word(f, loop.loop.edges)
    out.append(Candidate(
        w, loop.basis or extend_to_basis(w, phi.rank), f"primitive loop ({loop.case})",
        loop.crossings, M, verified,
    ))
    if f_inverse is not None:
        top_inv = classify_strata(f_inverse)[-1]
        H2 = set(top_inv.edges)
        if not any(g.positive(e) in H2 for e in loop.loop.edges):
            ext = extend_to_cross(f_inverse.graph, H2, loop.loop.edges)
            w2 = _path_word(f_inverse, ext.reduced.edges)
            out.append(Candidate(
                w2, extend_to_basis(w2, phi.rank), f"extended to cross the inverse top stratum ({ext.case})",
                loop.crossings, M, verified,
            ))
    return out
