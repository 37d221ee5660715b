import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvn_rigidity.freegroup import FreeMap, RankMismatchError, Word, cyclic_reduce, max_power
from cvn_rigidity.rigidity import (
    check_property_P,
    check_property_W,
    ptp_factorization,
    suggest_pair,
    w_to_wstar,
    wstar_roundtrip,
)
from cvn_rigidity.trainmap import rose_representative, stratify

from conftest import raw_words


def W(s):
    return Word.parse(s)


def test_property_W_on_explicit_sample():
    rep = check_property_W([W("a a b"), W("b a a a"), W("a b a b")], 0)
    assert rep.M == 3
    assert rep.argmax == 1
    assert [k for _, k in rep.per_n] == [2, 3, 1]


def test_property_P_neg(neg):
    rep = check_property_P(neg, W("b"), 1, 20)
    assert rep.by_direction["fwd"].M == 1
    assert rep.by_direction["bwd"].M == 1
    assert rep.stabilized


def test_property_P_neg_fixed_letter_grows(neg):
    # the orbit b a^n carries unbounded powers of the fixed letter
    rep = check_property_P(neg, W("b"), 0, 20, "fwd")
    assert rep.M == 20
    assert not rep.stabilized


@pytest.mark.parametrize("h", [8, 12])
def test_property_P_fibonacci_forward(fib, h):
    rep = check_property_P(fib, W("a"), 0, h, "fwd")
    assert rep.M == 2
    assert rep.stabilized


def test_property_P_direction_validation(fib):
    with pytest.raises(ValueError):
        check_property_P(fib, W("a"), 0, 3, "sideways")


def test_property_P_reports_truncation(fib):
    rep = check_property_P(fib, W("a"), 0, 40, "fwd", letter_cap=50)
    assert rep.truncated


# -- W -> W* -----------------------------------------------------------------------

def test_wstar_adversarial_power():
    rep = w_to_wstar([W("b a a") ** 3], 2, k=2)
    assert not rep.holds
    assert rep.condition2[0].max_t == 3


def test_wstar_trivial_word_is_not_a_violation():
    rep = w_to_wstar([Word()], 1)
    assert rep.holds


def test_wstar_rank_guard():
    with pytest.raises(RankMismatchError):
        w_to_wstar([W("c")], 1)


def test_wstar_letter_swap():
    # with b as the bounded letter the roles of a and b are exchanged
    rep = w_to_wstar([W("a b b")], 2, letter=1)
    assert rep.holds
    assert wstar_roundtrip(rep.entries[0], rep.k, letter=1) == cyclic_reduce(W("a b b"))


@settings(max_examples=200, deadline=None)
@given(raw_words(2, 24), st.integers(1, 3))
def test_wstar_holds_under_bounded_powers(w, M):
    c = cyclic_reduce(w)
    if not len(c) or max_power(c, 0) > M:
        return
    rep = w_to_wstar([c], M)
    assert rep.holds
    assert wstar_roundtrip(rep.entries[0], rep.k) == c


def test_wstar_rejection_sample_seeded():
    rng = random.Random(7)
    kept = []
    while len(kept) < 200:
        w = cyclic_reduce(Word(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(1, 20))))
        if len(w) and max_power(w, 0) <= 2:
            kept.append(w)
    assert w_to_wstar(kept, 2).holds


# -- iterates ------------------------------------------------------------------------

@pytest.mark.parametrize("l,h", [(1, 6), (2, 5), (3, 3), (4, 2)])
def test_ptp_factorization_fibonacci(fib, l, h):
    chk = ptp_factorization(fib, W("a"), 0, l, h)
    assert chk.agrees


@pytest.mark.parametrize("l,h", [(2, 5), (3, 4)])
def test_ptp_factorization_neg(neg, l, h):
    chk = ptp_factorization(neg, W("b"), 1, l, h)
    assert chk.agrees and chk.direct == 1


# -- suggestions -------------------------------------------------------------------------

def test_suggest_neg_top(neg):
    c = suggest_pair(neg, stratify(rose_representative(neg)))
    assert [x.word for x in c] == [W("b")]


def test_suggest_single_eg_stratum(fib):
    c = suggest_pair(fib, stratify(rose_representative(fib)))
    assert [x.word for x in c] == [W("a"), W("b")]


def test_suggest_reducible_eg_top():
    phi = FreeMap.parse(["a", "c a", "b c"], ["a", "c a b-", "b a-"])
    f = stratify(rose_representative(phi))
    f_inv = stratify(rose_representative(phi.inverse()))
    (cand, *_rest) = suggest_pair(phi, f, f_inv)
    assert cand.crossings >= cand.M_required
    assert cand.basis.is_certified()
    assert cand.word in cand.basis.images
    assert cand.inequality_verified is False
