import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilmetric import kernels
from nilmetric.collection import collect, log_log_slope, verify_lemma_bound
from nilmetric.core import GroupElement, Word, decreasing_generators, evaluate_word, normal_form, random_word
from nilmetric.errors import InvalidArgument, InvalidGenerator

from oracles import dense_entries, dense_word, literal_collect

BACKENDS = sorted(kernels.backends())


@st.composite
def words(draw, min_dim=2, max_dim=6, max_letters=25, max_exp=4):
    n = draw(st.integers(min_dim, max_dim))
    gens = decreasing_generators(n)
    letters = draw(st.lists(st.tuples(st.sampled_from(gens), st.integers(-max_exp, max_exp)), max_size=max_letters))
    return n, Word(letters)


def test_collect_examples():
    tr = collect(Word([((1, 2), 1), ((2, 3), 1)]), 3)
    assert tr.result.nonzero() == {(1, 2): 1, (2, 3): 1, (1, 3): 1}
    # a12 a23 -> a23 a12 a13 -> a23 a13 a12 -> a13 a23 a12
    assert tr.swap_count == 3
    tr = collect(Word([((2, 3), 1), ((1, 2), 1)]), 3)
    assert tr.result.nonzero() == {(1, 2): 1, (2, 3): 1}
    assert tr.swap_count == 0


def test_collect_fixed_point_on_normal_words():
    rng = random.Random(4)
    for n in range(2, 7):
        nf = normal_form(GroupElement(n, [rng.randint(-5, 5) for _ in range(n * (n - 1) // 2)]))
        tr = collect(nf.word(), n)
        assert tr.result == nf
        assert tr.swap_count == 0


def test_collect_invalid_letter():
    with pytest.raises(InvalidGenerator):
        collect(Word.single(1, 5), 4)


@pytest.mark.parametrize("backend", BACKENDS)
@given(words())
def test_collect_matches_matrix_and_dense_oracle(backend, nw):
    n, w = nw
    tr = collect(w, n, backend=backend)
    x = evaluate_word(w, n)
    assert tr.result == normal_form(x)
    assert dense_entries(dense_word(tr.result.word(), n)) == dense_entries(dense_word(w, n))
    assert tr.input_length == w.length
    for g, m in tr.result.exponents.items():
        assert tr.max_counts[g] >= abs(m)


@pytest.mark.parametrize("backend", BACKENDS)
def test_collect_matches_literal_rewriter(backend):
    rng = random.Random(17)
    for _ in range(400):
        n = rng.randint(3, 6)
        w = random_word(n, rng.randint(1, 30), rng)
        exps, peak, swaps, first_history = literal_collect(w)
        tr = collect(w, n, backend=backend)
        assert {g: e for g, e in tr.result.nonzero().items()} == {g: e for g, e in exps.items() if e}
        assert {g: c for g, c in tr.max_counts.items() if c} == {g: c for g, c in peak.items() if c}
        assert tr.swap_count == swaps
        assert tr.peak_first_diagonal == max(first_history)


def test_first_diagonal_count_never_exceeds_length():
    rng = random.Random(8)
    for _ in range(200):
        n = rng.randint(3, 5)
        w = random_word(n, rng.randint(1, 25), rng)
        _, _, _, history = literal_collect(w)
        assert max(history) <= w.length
        assert collect(w, n).peak_first_diagonal <= w.length


@pytest.mark.slow
def test_terminates_on_long_words():
    rng = random.Random(1)
    for n in (3, 4, 5):
        w = random_word(n, 10_000, rng)
        assert collect(w, n).result == normal_form(evaluate_word(w, n))


def test_soundness_long_words_dim6():
    rng = random.Random(2)
    for _ in range(20):
        w = random_word(6, 500, rng)
        assert collect(w, 6).result.to_element() == evaluate_word(w, 6)


def test_lemma_single_generator_words():
    samples = [Word.single(1, 2, L) for L in (5, 10, 20)] + [Word.single(2, 3, -L) for L in (5, 10, 20)]
    rep = verify_lemma_bound(samples, 3)
    assert rep.constants[(1, 2)] == 1.0
    assert rep.constants[(2, 3)] == 1.0
    assert rep.constants[(1, 3)] == 0.0


def test_lemma_random_words_dim4():
    rng = random.Random(3)
    samples = [random_word(4, L, rng) for L in (10, 20, 50, 100, 200) for _ in range(10)]
    rep = verify_lemma_bound(samples, 4)
    assert rep.slopes[(1, 4)] <= 3.2
    assert not rep.violations


def test_lemma_quadratic_growth_of_a13():
    # (a12 a23)^m: collecting creates about m^2/2 copies of a13
    lengths = [10, 20, 40, 80, 160]
    counts = []
    for L in lengths:
        w = Word([((1, 2), 1), ((2, 3), 1)]).power(L // 2)
        counts.append(collect(w, 3).count(1, 3))
    assert abs(log_log_slope(lengths, counts) - 2.0) <= 0.2


def test_lemma_needs_samples():
    with pytest.raises(InvalidArgument):
        verify_lemma_bound([], 3)


def test_log_log_slope_exact_power():
    xs = [1, 2, 4, 8]
    assert log_log_slope(xs, [3 * x ** 3 for x in xs]) == pytest.approx(3.0)
