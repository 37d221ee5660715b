"""Sequence kernels shared by words and edge paths.

Everything here works on plain integer sequences together with an
involution ``inv`` (negation for words, edge reversal for paths), so the
same code reduces words in F_N and paths in a graph.
"""

from __future__ import annotations

from typing import Callable, Sequence

Inv = Callable[[int], int]


def free_reduce(seq: Sequence[int], inv: Inv) -> list[int]:
    """Single-pass stack reduction: cancel every adjacent ``x inv(x)``."""
    out: list[int] = []
    push = out.append
    pop = out.pop
    for x in seq:
        if out and out[-1] == inv(x):
            pop()
        else:
            push(x)
    return out


def cyclic_strip(seq: Sequence[int], inv: Inv) -> tuple[int, int]:
    """For a reduced ``seq`` return ``(i, j)`` with ``seq[i:j]`` cyclically reduced.

    The stripped prefix ``seq[:i]`` is the inverse of the stripped suffix,
    so ``seq`` is the conjugate of ``seq[i:j]`` by ``seq[:i]``.
    """
    i, j = 0, len(seq)
    while j - i >= 2 and seq[i] == inv(seq[j - 1]):
        i += 1
        j -= 1
    return i, j


def least_rotation(keys: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) * 2
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:  # i == -1
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % n


def rotate(seq: Sequence[int], k: int) -> tuple[int, ...]:
    return tuple(seq[k:]) + tuple(seq[:k])


def inverse_seq(seq: Sequence[int], inv: Inv) -> list[int]:
    return [inv(x) for x in reversed(seq)]


def max_letter_run(seq: Sequence[int], letters: set[int], cyclic: bool) -> int:
    """Longest run of consecutive entries drawn from ``letters``.

    With ``cyclic=True`` runs merge across the seam; a sequence made
    entirely of such entries reports its full length.
    """
    n = len(seq)
    if n == 0:
        return 0
    best = run = 0
    prev = None
    for x in seq:
        if x in letters and (run == 0 or x == prev):
            run += 1
        elif x in letters:
            run = 1
        else:
            run = 0
        prev = x
        best = max(best, run)
    if not cyclic or best == 0:
        return best
    if best == n and all(x == seq[0] for x in seq):
        return n
    # merge the leading and trailing runs of the same letter
    head = 0
    while head < n and seq[head] == seq[0] and seq[0] in letters:
        head += 1
    tail = 0
    while tail < n and seq[n - 1 - tail] == seq[-1] and seq[-1] in letters:
        tail += 1
    if head and tail and seq[0] == seq[-1]:
        best = max(best, head + tail)
    return best


def max_block_power(
    seq: Sequence[int], block: Sequence[int], inv: Inv, cyclic: bool = False
) -> int:
    """Largest k such that ``rho^k`` is a subword of ``seq``.

    ``rho`` ranges over all rotations of ``block`` and of its inverse, so
    the count is insensitive to where the cyclic block is cut and to
    direction.  For ``cyclic=True`` subwords may wrap, but never exceed the
    length of ``seq`` itself.
    """
    m = len(block)
    n = len(seq)
    if m == 0 or n == 0:
        return 0
    rotations = {rotate(block, r) for r in range(m)}
    iblock = inverse_seq(block, inv)
    rotations.update(rotate(iblock, r) for r in range(m))
    if cyclic:
        ext = list(seq) * 3
        cap = n // m
    else:
        ext = list(seq)
        cap = None
    total = len(ext)
    if total < m:
        return 0
    best = 0
    s = 0
    last_start = total - m
    while s <= last_start:
        # grow the maximal stretch where ext has period m starting at s
        run = 0
        j = s
        while j + m < total and ext[j] == ext[j + m]:
            run += 1
            j += 1
        if tuple(ext[s:s + m]) in rotations:
            best = max(best, (run + m) // m)
        s += run + 1
    if cap is not None:
        best = min(best, cap)
    return best
