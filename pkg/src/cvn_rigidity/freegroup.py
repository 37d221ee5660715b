"""Words, cyclic words and endomorphisms of a free group F_N.

A letter is a nonzero integer: generator ``i`` (0-based) is ``i + 1`` and
its inverse is ``-(i + 1)``.  Generators print as ``a, b, c, ...``; the
inverse of ``a`` prints as ``a-`` in ASCII form and ``a⁻¹`` in unicode
form.  Parsing accepts both, plus uppercase-for-inverse (``aB``).
"""

from __future__ import annotations

import operator
import re
import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import _seq

NAMES = string.ascii_lowercase
_neg = operator.neg


class RankMismatchError(ValueError):
    pass


class CertificateError(ValueError):
    """An inverse certificate fails to invert the map."""


# -- letters ----------------------------------------------------------------

def letter(index: int, sign: int = 1) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign * (index + 1)


def gen_index(x: int) -> int:
    return abs(x) - 1


def letter_key(x: int) -> int:
    """Total order a < a⁻¹ < b < b⁻¹ < ... used for canonical rotations."""
    return 2 * (abs(x) - 1) + (x < 0)


def letter_name(x: int, unicode: bool = False, names: Sequence[str] = NAMES) -> str:
    base = names[abs(x) - 1]
    if x > 0:
        return base
    return base + ("⁻¹" if unicode else "-")


_TOKEN = re.compile(r"([A-Za-z])('*)(\^\(?-?\d+\)?|⁻¹|⁻|-)?")


def parse_letters(text: str, rank: int | None = None) -> list[int]:
    """Parse ``"a b- a"``, ``"ab⁻¹a"``, ``"aBa"`` or ``"a^3 b^-2"``."""
    out: list[int] = []
    pos = 0
    text = text.strip()
    if text in ("", "1", "e", "()"):
        return out
    while pos < len(text):
        if text[pos].isspace() or text[pos] in "·*":
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        ch, _, suffix = m.groups()
        idx = ord(ch.lower()) - ord("a")
        sign = -1 if ch.isupper() else 1
        power = 1
        if suffix in ("⁻¹", "⁻", "-"):
            sign = -sign
        elif suffix:
            power = int(suffix.lstrip("^").strip("()"))
            if power < 0:
                sign, power = -sign, -power
        if rank is not None and idx >= rank:
            raise RankMismatchError(f"generator {ch!r} outside rank {rank}")
        out.extend([letter(idx, sign)] * power)
        pos = m.end()
    return out


# -- words ------------------------------------------------------------------

class Word:
    """An element of F_N written as a sequence of letters.

    Construction does not reduce; use :func:`reduce` (or ``w.reduced()``).
    Multiplication reduces at the junction only, so products of reduced
    words stay reduced.
    """

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        letters = tuple(letters)
        if any(x == 0 for x in letters):
            raise ValueError("0 is not a letter")
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        return cls(parse_letters(text, rank))

    @classmethod
    def generator(cls, index: int, sign: int = 1) -> "Word":
        return cls((letter(index, sign),))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __eq__(self, other):
        if isinstance(other, Word) and not isinstance(other, CyclicWord):
            return self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        return hash(("Word", self.letters))

    def __mul__(self, other: "Word") -> "Word":
        a, b = self.letters, other.letters
        i = 0
        while i < min(len(a), len(b)) and a[len(a) - 1 - i] == -b[i]:
            i += 1
        return Word(a[:len(a) - i] + b[i:])

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** -n
        return reduce(Word(self.letters * n))

    def inverse(self) -> "Word":
        return Word(-x for x in reversed(self.letters))

    @property
    def is_reduced(self) -> bool:
        a = self.letters
        return all(a[i] != -a[i + 1] for i in range(len(a) - 1))

    def reduced(self) -> "Word":
        return reduce(self)

    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0) - 1

    def format(self, unicode: bool = False, names: Sequence[str] = NAMES) -> str:
        if not self.letters:
            return "1"
        sep = "" if unicode else " "
        return sep.join(letter_name(x, unicode, names) for x in self.letters)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"{type(self).__name__}({self.format()!r})"


class CyclicWord(Word):
    """A cyclically reduced word stored in its least rotation.

    Two cyclic words are equal iff they represent conjugate elements.
    """

    __slots__ = ()

    def __init__(self, letters: Iterable[int] = ()):
        letters = tuple(letters)
        k = _seq.least_rotation([letter_key(x) for x in letters])
        super().__init__(_seq.rotate(letters, k))

    def __eq__(self, other):
        if isinstance(other, CyclicWord):
            return self.letters == other.letters
        return NotImplemented

    def __hash__(self):
        return hash(("CyclicWord", self.letters))

    def as_word(self) -> Word:
        return Word(self.letters)

    def inverse(self) -> "CyclicWord":
        return CyclicWord(-x for x in reversed(self.letters))


def reduce(w: Word | Iterable[int]) -> Word:
    letters = w.letters if isinstance(w, Word) else tuple(w)
    return Word(_seq.free_reduce(letters, _neg))


def cyclic_reduce(w: Word | Iterable[int]) -> CyclicWord:
    if isinstance(w, CyclicWord):
        return w
    red = _seq.free_reduce(w.letters if isinstance(w, Word) else tuple(w), _neg)
    i, j = _seq.cyclic_strip(red, _neg)
    return CyclicWord(red[i:j])


# -- maps -------------------------------------------------------------------

class FreeMap:
    """An endomorphism of F_N given by the images of the generators.

    ``inverse_images``, when given, is checked on demand by
    :meth:`is_certified`; a certified map is an automorphism.
    """

    def __init__(self, images: Sequence[Word], inverse_images: Sequence[Word] | None = None):
        self.rank = len(images)
        if self.rank < 1:
            raise ValueError("a free map needs at least one generator")
        self.images = tuple(reduce(w) for w in images)
        self.inverse_images = (
            None if inverse_images is None else tuple(reduce(w) for w in inverse_images)
        )
        if self.inverse_images is not None and len(self.inverse_images) != self.rank:
            raise RankMismatchError("inverse_images has the wrong length")
        for w in self.images + (self.inverse_images or ()):
            if w.max_index() >= self.rank:
                raise RankMismatchError(f"image {w} uses a generator outside rank {self.rank}")
        self._certified: bool | None = None

    @classmethod
    def identity(cls, rank: int) -> "FreeMap":
        gens = [Word.generator(i) for i in range(rank)]
        return cls(gens, gens)

    @classmethod
    def parse(cls, images: Sequence[str], inverse_images: Sequence[str] | None = None) -> "FreeMap":
        rank = len(images)
        return cls(
            [Word.parse(s, rank) for s in images],
            None if inverse_images is None else [Word.parse(s, rank) for s in inverse_images],
        )

    def __call__(self, w: Word | Iterable[int]) -> Word:
        return apply(self, w)

    def __eq__(self, other):
        return isinstance(other, FreeMap) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        body = ", ".join(f"{NAMES[i]}->{w}" for i, w in enumerate(self.images))
        return f"FreeMap({body})"

    def is_certified(self) -> bool:
        if self._certified is None:
            self._certified = self.inverse_images is not None and _check_inverse(self)
        return self._certified

    def require_certified(self) -> None:
        if not self.is_certified():
            raise CertificateError(f"{self!r} carries no valid inverse certificate")

    def inverse(self) -> "FreeMap":
        self.require_certified()
        return FreeMap(self.inverse_images, self.images)

    def compose(self, other: "FreeMap") -> "FreeMap":
        """``self ∘ other``: apply ``other`` first."""
        if other.rank != self.rank:
            raise RankMismatchError("ranks differ")
        images = [apply(self, w) for w in other.images]
        inv = None
        if self.inverse_images is not None and other.inverse_images is not None:
            inv = [apply(FreeMap(other.inverse_images), w) for w in self.inverse_images]
        return FreeMap(images, inv)

    def power(self, n: int) -> "FreeMap":
        if n < 0:
            return self.inverse().power(-n)
        out = FreeMap.identity(self.rank)
        if self.inverse_images is None:
            out = FreeMap(out.images)
        for _ in range(n):
            out = self.compose(out)
        return out


def _check_inverse(phi: FreeMap) -> bool:
    fwd = FreeMap(phi.images)
    bwd = FreeMap(phi.inverse_images)
    for i in range(phi.rank):
        g = Word.generator(i)
        if apply(fwd, apply(bwd, g)) != g or apply(bwd, apply(fwd, g)) != g:
            return False
    return True


def apply(phi: FreeMap, w: Word | Iterable[int]) -> Word:
    letters = w.letters if isinstance(w, Word) else tuple(w)
    if letters and max(abs(x) for x in letters) > phi.rank:
        raise RankMismatchError(f"word uses a generator outside rank {phi.rank}")
    imgs = phi.images
    pos = [img.letters for img in imgs]
    neg = [img.inverse().letters for img in imgs]
    out: list[int] = []
    for x in letters:
        piece = pos[x - 1] if x > 0 else neg[-x - 1]
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(out)


# -- orbits -----------------------------------------------------------------

@dataclass(frozen=True)
class Truncation:
    direction: int  # +1 forward, -1 backward
    last_n: int     # last exponent actually produced
    length: int     # word length that exceeded the cap


class Orbit:
    """Stream of ``(n, [[Φⁿ(g)]])`` for ``n_lo ≤ n ≤ n_hi``.

    Yields ``n = 0, 1, ..., n_hi`` and then ``-1, ..., n_lo``.  Each step
    applies Φ (or Φ⁻¹) to the previous cyclic word, which is a conjugate
    of the true iterate and so has the same cyclic reduction.  A direction
    stops early once a word exceeds ``letter_cap``; the stop is recorded in
    :attr:`truncations`.
    """

    def __init__(self, phi: FreeMap, g: Word, n_lo: int, n_hi: int, letter_cap: int = 10**7):
        if not n_lo <= 0 <= n_hi:
            raise ValueError("need n_lo <= 0 <= n_hi")
        if n_lo < 0:
            phi.require_certified()
        self.phi, self.g = phi, g
        self.n_lo, self.n_hi = n_lo, n_hi
        self.letter_cap = letter_cap
        self.truncations: list[Truncation] = []

    def __iter__(self) -> Iterator[tuple[int, CyclicWord]]:
        self.truncations = []
        start = cyclic_reduce(self.g)
        yield 0, start
        yield from self._direction(start, self.phi, 1, self.n_hi)
        if self.n_lo < 0:
            yield from self._direction(start, self.phi.inverse(), -1, -self.n_lo)

    def _direction(self, start, phi, sign, steps):
        w = start
        for n in range(1, steps + 1):
            w = cyclic_reduce(apply(phi, w))
            if len(w) > self.letter_cap:
                self.truncations.append(Truncation(sign, sign * (n - 1), len(w)))
                return
            yield sign * n, w


def orbit(phi: FreeMap, g: Word, n_lo: int, n_hi: int, letter_cap: int = 10**7) -> Orbit:
    return Orbit(phi, g, n_lo, n_hi, letter_cap)


# -- combinatorics on cyclic words -----------------------------------------

def max_power(w: CyclicWord | Word, i: int) -> int:
    """Largest |k| with a_i^k a cyclic subword of ``w`` (generator index ``i``)."""
    x = i + 1
    return _seq.max_letter_run(w.letters, {x, -x}, cyclic=True)


def to_basis_a_bak(w: Word, k: int) -> CyclicWord:
    """Rewrite a rank-2 word over the basis {a, b′ = b aᵏ}.

    In the result generator 0 is ``a`` and generator 1 is ``b′``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if w.max_index() > 1:
        raise RankMismatchError("to_basis_a_bak needs a rank-2 word")
    a = Word.generator(0)
    sub = FreeMap([a, Word.generator(1) * a ** -k])
    return cyclic_reduce(apply(sub, w))


def from_basis_a_bak(w: Word, k: int) -> CyclicWord:
    a = Word.generator(0)
    sub = FreeMap([a, Word.generator(1) * a ** k])
    return cyclic_reduce(apply(sub, w))


def extend_to_basis(w: Word, rank: int | None = None) -> FreeMap | None:
    """Certify ``w`` primitive when some generator occurs in it exactly once.

    Writes ``[w] = α a_j^{±1} β`` with ``a_j`` absent from ``α, β`` and
    returns the automorphism ``a_j ↦ w`` (other generators fixed), which is
    a product of left transvections by ``α`` and right transvections by
    ``β``.  The highest such ``j`` is used.  Returns ``None`` when no
    generator occurs exactly once; that says nothing about primitivity.
    """
    w = reduce(w)
    if not w.letters:
        return None
    rank = max(rank or 0, w.max_index() + 1)
    counts = [0] * rank
    for x in w.letters:
        counts[abs(x) - 1] += 1
    singles = [j for j in range(rank) if counts[j] == 1]
    if not singles:
        return None
    j = singles[-1]
    pos = next(p for p, x in enumerate(w.letters) if abs(x) == j + 1)
    alpha, beta = w[:pos], w[pos + 1:]
    gen = Word.generator(j)
    if w.letters[pos] > 0:
        back = alpha.inverse() * gen * beta.inverse()
    else:
        back = beta * gen.inverse() * alpha
    return _transvection_map(rank, j, w, back)


def _transvection_map(rank: int, j: int, image: Word, back: Word) -> FreeMap:
    images = [Word.generator(i) for i in range(rank)]
    inverse = list(images)
    images[j] = image
    inverse[j] = back
    phi = FreeMap(images, inverse)
    phi.require_certified()
    return phi


def widen(phi: FreeMap, rank: int) -> FreeMap:
    """Extend ``phi`` by fixing the extra generators up to ``rank``."""
    extra = [Word.generator(i) for i in range(phi.rank, rank)]
    inv = None if phi.inverse_images is None else list(phi.inverse_images) + extra
    return FreeMap(list(phi.images) + extra, inv)


def all_cyclic_words(rank: int, length: int) -> Iterator[CyclicWord]:
    """Every cyclic word of the given length, once, in a fixed order."""
    alphabet = sorted((x for i in range(rank) for x in (i + 1, -(i + 1))), key=letter_key)
    seen: set[tuple[int, ...]] = set()

    def rec(prefix: list[int]):
        if len(prefix) == length:
            if length > 1 and prefix[0] == -prefix[-1]:
                return
            cw = CyclicWord(prefix)
            if cw.letters not in seen:
                seen.add(cw.letters)
                yield cw
            return
        for x in alphabet:
            if prefix and prefix[-1] == -x:
                continue
            prefix.append(x)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])
