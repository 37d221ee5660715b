from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cvn_rigidity.freegroup import Word, cyclic_reduce
from cvn_rigidity.outerspace import crossing_vector, translation_length
from cvn_rigidity.witness import (
    build_witness,
    candidate_graphs,
    crossing_matrix,
    distinguishing_word,
    hung_loops,
    max_step,
    nullspace_basis,
    nullspace_direction,
    rose,
    rref,
    theta,
)

F = Fraction


def W(s):
    return Word.parse(s)


def names(Ts):
    return [T.name for T in Ts]


# -- graph family ----------------------------------------------------------------------

def test_family_rank2():
    fam = candidate_graphs(2)
    assert names(fam)[:3] == ["rose", "barbell[b]", "barbell[a]"]
    bb = fam[1]
    g = bb.graph
    assert [g.format_path(p) for p in bb.marking] == ["x", "e y e-"]
    assert names(candidate_graphs(2, family="rose-only")) == ["rose"]


def test_family_rank3_hung_loop():
    T = hung_loops(3, [2])
    g = T.graph
    assert T.name == "hung-loop[c]"
    assert [g.format_path(p) for p in T.marking] == ["x", "y", "e z e-"]


def test_twisted_hung_loop_marking():
    T = hung_loops(2, [0], (1, 2))
    g = T.graph
    assert T.name == "barbell[a; b^2]"
    assert [g.format_path(p) for p in T.marking] == ["e y e- x- x-", "x"]


def test_theta_marking_is_certified():
    T = theta(3)
    assert T.marking_map.is_certified()
    assert T.graph.valence(0) == 5


def test_unknown_family():
    with pytest.raises(ValueError):
        candidate_graphs(2, family="spiral")


# -- linear algebra ----------------------------------------------------------------------

def test_crossing_matrix_barbell():
    T = hung_loops(2, [1])
    M = crossing_matrix(T, [("a", W("a")), ("b a", W("b a")), ("b a a a", W("b a a a"))])
    assert M.labels == ["a", "b a", "b a a a"]
    assert M.rows == [(1, 0, 0), (1, 1, 2), (3, 1, 2)]


def test_nullspace_examples():
    delta, t_star = nullspace_direction([(1, 0, 0), (0, 1, 2)], [F(1)] * 3, F(1, 2))
    assert delta == (0, 2, -1)
    assert t_star == F(1, 2)
    assert nullspace_direction([(1, 0), (0, 1)], [F(1)] * 2, F(1, 2)) is None


def test_nullspace_rank3_rows():
    delta, _ = nullspace_direction([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 2)], [F(1)] * 4, F(1, 2))
    assert delta == (0, 0, 2, -1)


def test_max_step_margin():
    assert max_step((0, 2, -1), [F(1)] * 3, F(1, 2)) == F(1, 2)
    assert max_step((1, 1), [F(1)] * 2, F(1, 2)) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n + 1, max_size=n + 1), min_size=1, max_size=n + 1)
))
def test_nullspace_matches_sympy(rows):
    n = len(rows[0])
    ours = nullspace_basis(rows, n)
    theirs = sympy.Matrix(rows).nullspace()
    assert len(ours) == len(theirs)
    for v in ours:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    _, piv = rref(rows, n)
    assert len(piv) == sympy.Matrix(rows).rank()


# -- witnesses ---------------------------------------------------------------------------

def test_neg_witness(neg):
    pair, attempts = build_witness(neg, W("b"), horizon=20)
    assert pair is not None
    assert not pair.verify()
    assert pair.delta == (0, 2, -1)
    assert pair.t == F(1, 4)
    assert pair.T2.lengths == (F(1), F(3, 2), F(3, 4))
    assert attempts[0].name == "rose" and not attempts[0].success
    a, b = pair.w_star_lengths
    assert a != b


def test_fibonacci_forward_witness(fib):
    pair, _ = build_witness(fib, W("a"), horizon=12, forward_only=True)
    assert pair is not None and not pair.verify()
    assert pair.delta == (0, 2, -1)
    for label, _, l1, l2 in pair.transcript:
        assert l1 == l2


def test_explicit_rank3_sample():
    sample = [("a", W("a")), ("b", W("b")), ("c", W("c"))]
    pair, _ = build_witness(None, None, sample=sample)
    assert pair is not None and not pair.verify()
    assert pair.T1.name == "hung-loop[c]"
    for _, w in sample:
        assert translation_length(pair.T1, w) == translation_length(pair.T2, w)


def test_rose_alone_is_full_rank():
    sample = [("a", W("a")), ("b", W("b"))]
    pair, attempts = build_witness(None, None, graphs="rose-only", sample=sample)
    assert pair is None
    assert attempts[0].note == "full column rank"


def test_distinguishing_word_none_for_equal_points():
    T = rose(2)
    assert distinguishing_word(T, T) is None


def test_distinguishing_word_is_shortest():
    T = hung_loops(2, [1])
    T2 = T.with_lengths([1, F(3, 2), F(3, 4)])
    w = distinguishing_word(T, T2)
    assert w == cyclic_reduce(W("b"))
    assert translation_length(T, w) != translation_length(T2, w)
    assert crossing_vector(T, w) == (0, 1, 0)


def test_threads_env_does_not_change_result(neg, monkeypatch):
    monkeypatch.setenv("CVN_RIGIDITY_THREADS", "1")
    p1, _ = build_witness(neg, W("b"), horizon=10)
    monkeypatch.setenv("CVN_RIGIDITY_THREADS", "4")
    p2, _ = build_witness(neg, W("b"), horizon=10)
    assert (p1.T1.name, p1.delta, p1.t, p1.w_star) == (p2.T1.name, p2.delta, p2.t, p2.w_star)


def test_search_stops_after_first_success(neg):
    _, attempts = build_witness(neg, W("b"), horizon=6)
    won = [a.success for a in attempts].index(True)
    assert all(a.note == "not evaluated" and a.rank is None for a in attempts[won + 1:])
