import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilmetric.core import (
    GroupElement,
    HeisenbergForm,
    Word,
    evaluate_word,
    generator,
    heisenberg_to_matrix,
    normal_form,
    random_element,
)
from nilmetric.errors import InvalidArgument, InvalidSpan, ResourceLimit
from nilmetric.quasimetric import estimate_H, estimate_T
from nilmetric.synthesis import (
    commutator_length,
    commutator_word,
    four_squares,
    hilbert_waring_g,
    length_constant,
    reduced_decompose,
    short_word,
    short_word_H,
    waring_decompose,
)

from oracles import brute_min_powers, dense_entries, dense_word


def brute_four_squares(p):
    """Lexicographically largest fewest-squares representation by exhaustive search."""
    if p == 0:
        return ()
    r = math.isqrt(p)
    for count in range(1, 5):
        for parts in itertools.combinations_with_replacement(range(r, 0, -1), count):
            if sum(q * q for q in parts) == p:
                return parts
    raise AssertionError("Lagrange says this cannot happen")


# ------------------------------------------------------------ decompositions

def test_four_squares_examples():
    assert four_squares(7).parts == (2, 1, 1, 1)
    assert four_squares(4).parts == (2,)
    assert four_squares(0).parts == ()


def test_four_squares_matches_exhaustive_search():
    for p in range(0, 600):
        assert four_squares(p).parts == brute_four_squares(p), p


@given(st.integers(0, 10 ** 12))
def test_four_squares_exact(p):
    d = four_squares(p)
    assert d.total() == p
    assert len(d.parts) <= 4
    assert all(1 <= q <= math.isqrt(p) for q in d.parts)


def test_four_squares_rejects_negative():
    with pytest.raises(InvalidArgument):
        four_squares(-1)


def test_waring_examples():
    assert waring_decompose(23, 3).parts == (2, 2, 1, 1, 1, 1, 1, 1, 1)
    assert waring_decompose(57, 1).parts == (57,)
    assert waring_decompose(16, 4).parts == (2,)


def test_waring_minimal_against_brute_force():
    for k in (3, 4, 5):
        for m in range(0, 400):
            d = waring_decompose(m, k)
            assert d.total() == m
            assert len(d.parts) == brute_min_powers(m, k)


@given(st.integers(0, 200_000), st.integers(1, 6))
def test_waring_within_g(m, k):
    d = waring_decompose(m, k)
    assert d.total() == m
    assert len(d.parts) <= max(hilbert_waring_g(k), 1 if k == 1 else 0)
    assert all(q ** k <= m for q in d.parts)


def test_waring_cap():
    with pytest.raises(ResourceLimit):
        waring_decompose(10 ** 7 + 1, 3)
    with pytest.raises(ResourceLimit):
        waring_decompose(1000, 3, cap=999)


def test_hilbert_waring_g_values():
    assert [hilbert_waring_g(k) for k in range(1, 7)] == [1, 4, 9, 19, 37, 73]


# ------------------------------------------------------------ commutators

def test_commutator_word_examples():
    w = commutator_word(1, 3, 2, 1, 3)
    assert w == Word([((1, 2), -2), ((2, 3), -2), ((1, 2), 2), ((2, 3), 2)])
    assert w.length == 8
    assert evaluate_word(w, 3).entries == {(1, 3): 4}
    assert evaluate_word(commutator_word(1, 3, 1, 1, 3), 3) == generator(3, (1, 3))
    assert evaluate_word(commutator_word(1, 4, 2, 1, 4), 4).entries == {(1, 4): 8}


def test_commutator_identity_all_spans():
    for d in range(2, 6):
        n = d + 2
        for i in (1, 2):
            j = i + d
            if j > n:
                continue
            for q in range(1, 31):
                for s in (1, -1):
                    w = commutator_word(i, j, q, s, n)
                    assert dense_entries(dense_word(w, n)) == {(i, j): s * q ** d}
                    assert w.length == commutator_length(d) * q


def test_commutator_word_rejects_span_one():
    with pytest.raises(InvalidSpan):
        commutator_word(1, 2, 3)
    with pytest.raises(InvalidArgument):
        commutator_word(2, 5, 1, 1, dim=4)


def test_commutator_length_values():
    assert [commutator_length(d) for d in range(1, 7)] == [1, 4, 10, 22, 46, 94]


# ------------------------------------------------------------ short words

def test_short_word_examples():
    w = short_word(GroupElement(3, {(1, 3): 100}))
    assert w.length == 40
    assert evaluate_word(w, 3) == GroupElement(3, {(1, 3): 100})
    assert short_word(generator(4, (2, 4))) == Word.single(2, 4, 1)
    assert short_word(GroupElement(3)) == Word()


def test_short_word_sound_many():
    rng = random.Random(12)
    for n in range(2, 7):
        for _ in range(1000 if n <= 4 else 300):
            x = random_element(n, rng, bound=rng.choice((5, 500, 50_000)))
            assert evaluate_word(short_word(x), n) == x


@given(st.integers(2, 6), st.data())
def test_short_word_length_bound(n, data):
    size = n * (n - 1) // 2
    x = GroupElement(n, data.draw(st.lists(st.integers(-10 ** 6, 10 ** 6), min_size=size, max_size=size)))
    w = short_word(x)
    K = length_constant(n)
    assert w.length <= K * estimate_T(normal_form(x)).value + K


def test_short_word_ratio_does_not_grow():
    rng = random.Random(4)
    for n in (3, 4):
        worst = []
        for mag in (10 ** 2, 10 ** 4, 10 ** 6):
            r = 0.0
            for _ in range(100):
                x = random_element(n, rng, bound=mag)
                r = max(r, short_word(x).length / (estimate_T(normal_form(x)).value + 1))
            worst.append(r)
        assert max(worst) <= length_constant(n)
        assert worst[-1] <= 1.5 * worst[0] + 1


def test_short_word_H_examples():
    w = short_word_H(HeisenbergForm(1, (0,), (0,), 4))
    assert w == Word([((1, 2), -2), ((2, 3), -2), ((1, 2), 2), ((2, 3), 2)])
    assert w.length == 8 <= 16 * 2
    assert short_word_H(HeisenbergForm.zero(2)) == Word()
    h = HeisenbergForm(2, (3, 0), (0, 0), 7)
    w = short_word_H(h)
    assert evaluate_word(w, 4) == heisenberg_to_matrix(h)
    assert w.length <= 3 + 16 * math.sqrt(7)


def test_short_word_H_uses_only_a_and_b_for_c():
    w = short_word_H(HeisenbergForm(3, (0, 0, 0), (0, 0, 0), -1234))
    assert all(l.gen != (1, 5) for l in w)


@given(st.integers(1, 4), st.data())
def test_short_word_H_sound_and_bounded(k, data):
    ints = st.integers(-10 ** 6, 10 ** 6)
    h = HeisenbergForm(k, data.draw(st.lists(ints, min_size=k, max_size=k)),
                       data.draw(st.lists(ints, min_size=k, max_size=k)), data.draw(ints))
    w = short_word_H(h)
    assert evaluate_word(w, k + 2) == heisenberg_to_matrix(h)
    lin = sum(map(abs, h.a_exps)) + sum(map(abs, h.b_exps))
    assert w.length <= lin + 16 * math.sqrt(abs(h.c_exp))
    assert w.length <= 16 * estimate_H(h).value


def test_reduced_decompose_beyond_cap():
    for k in (3, 4, 5):
        for m in (10 ** 7 + 12345, 10 ** 18 + 7, 3 ** 60 + 1):
            d = reduced_decompose(m, k)
            assert d.total() == m
            assert len(d.parts) <= hilbert_waring_g(k) + 8


def test_short_word_strict_raises_beyond_cap():
    x = GroupElement(4, {(1, 4): 10 ** 8})
    with pytest.raises(ResourceLimit):
        short_word(x, strict=True)
    assert evaluate_word(short_word(x), 4) == x
