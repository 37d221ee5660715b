"""Compare crossing rows of freely reduced loops with cyclically reduced ones.

Translation length counts crossings of the cyclically reduced loop.  Counting
on the freely reduced (but not cyclically reduced) petal path instead keeps
the connector edge of a conjugated petal such as ``e y e-``.  This script
shows which witness directions and certificate lengths each convention gives.
"""
from fractions import Fraction

from cvn_rigidity.freegroup import Word
from cvn_rigidity.outerspace import crossing_vector, dot
from cvn_rigidity.witness import hung_loops, nullspace_direction


def petal_row(T, w):
    """Crossings of the freely reduced petal concatenation (no cyclic reduction)."""
    pos, neg = T.petal_paths()
    path = []
    for x in w.letters:
        path.extend(pos[x - 1] if x > 0 else neg[-x - 1])
    return tuple(T.graph.crossings(T.graph.reduce_path(path)))


def compare(T, words, probe, lengths2):
    print(f"graph {T.name}, T2 lengths {[str(x) for x in lengths2]}")
    for convention, row_of in (("cyclic", crossing_vector), ("petal", petal_row)):
        rows = [row_of(T, Word.parse(s)) for s in words]
        found = nullspace_direction(rows, T.lengths, Fraction(1, 2))
        p = row_of(T, Word.parse(probe))
        print(f"  {convention:>6}: rows {rows} -> delta {found[0] if found else None}; "
              f"{probe}: {dot(p, T.lengths)} vs {dot(p, lengths2)}")


def main():
    barbell = hung_loops(2, [1])
    compare(barbell, ["a", "b a"], "b b", [1, Fraction(3, 2), Fraction(3, 4)])
    hung = hung_loops(3, [2])
    compare(hung, ["a", "b", "c"], "c c", [1, 1, Fraction(3, 2), Fraction(3, 4)])


if __name__ == "__main__":
    main()
