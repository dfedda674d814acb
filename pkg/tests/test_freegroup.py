import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gencomplex.errors import BudgetExceeded, InvalidInput
from gencomplex.freegroup import (
    Alphabet,
    concat_reduce,
    count_ball,
    count_ball_all,
    count_ball_reduced,
    count_sphere,
    cyclic_reduce,
    enumerate_ball,
    enumerate_sphere,
    format_word,
    free_reduce,
    inverse,
    is_reduced,
    parse_word,
    sample_reduced_words,
    sample_words,
    sphere_array,
)

from oracles import all_words, naive_reduce


def words(k=2, max_size=12):
    return st.lists(st.sampled_from([x for i in range(1, k + 1) for x in (i, -i)]), max_size=max_size).map(tuple)


@given(words())
def test_free_reduce_matches_naive(w):
    assert free_reduce(w) == naive_reduce(w)


@given(words())
def test_reduce_is_idempotent_and_reduced(w):
    r = free_reduce(w)
    assert is_reduced(r)
    assert free_reduce(r) == r


@given(words(), words())
def test_concat_reduce_is_a_group_product(u, v):
    assert concat_reduce(u, v) == naive_reduce(u + v)
    assert concat_reduce(u, inverse(u)) == ()


@given(words())
def test_cyclic_reduce(w):
    c = cyclic_reduce(w)
    assert is_reduced(c)
    assert len(c) < 2 or c[0] != -c[-1]


def test_reduce_examples():
    assert free_reduce(parse_word("aAb")) == parse_word("b")
    assert free_reduce(parse_word("abBA")) == ()
    assert free_reduce(()) == ()


def test_alphabet_rejects_out_of_range():
    with pytest.raises(InvalidInput):
        free_reduce((3,), Alphabet(2))
    with pytest.raises(InvalidInput):
        Alphabet(0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", range(6))
def test_ball_counts_match_enumeration(k, n):
    alpha = Alphabet(k)
    assert count_ball_all(k, n) == sum(len(all_words(k, m)) for m in range(n + 1))
    assert len(list(enumerate_ball(alpha, n))) == count_ball_all(k, n)
    reduced = sum(1 for m in range(n + 1) for w in all_words(k, m) if naive_reduce(w) == w)
    assert count_ball(k, n, "reduced") == reduced
    assert len(list(enumerate_ball(alpha, n, "reduced"))) == reduced


def test_reduced_ball_closed_form():
    assert count_ball_reduced(2, 1) == 5
    assert count_ball_reduced(2, 2) == 17
    assert count_ball_reduced(3, 2) == 37


def test_rank_one_reduced_ball_needs_flag():
    with pytest.raises(InvalidInput):
        count_ball_reduced(1, 3)
    assert count_ball_reduced(1, 3, allow_rank_one=True) == 7


def test_enumeration_order_is_shortlex():
    alpha = Alphabet(2)
    ball = list(enumerate_ball(alpha, 2))
    assert ball[:5] == [(), (1,), (-1,), (2,), (-2,)]
    assert ball[5] == (1, 1)
    assert len(set(ball)) == len(ball)


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded) as exc:
        list(enumerate_ball(Alphabet(2), 20, budget=1000))
    assert exc.value.estimate == count_ball_all(2, 20)


def test_sphere_array_matches_enumeration():
    arr = sphere_array(2, 3)
    assert [tuple(r) for r in arr.tolist()] == list(enumerate_sphere(Alphabet(2), 3))


def test_samplers_produce_valid_words():
    rng = np.random.default_rng(0)
    w = sample_reduced_words(3, 15, 2000, rng)
    assert w.shape == (2000, 15)
    assert all(is_reduced(tuple(r)) for r in w.tolist())
    u = sample_words(2, 4, 100, rng)
    assert set(np.unique(u)) <= {1, -1, 2, -2}


def test_reduced_sampler_is_uniform():
    # every reduced word of length 2 over k=2 (12 of them) about equally often
    rng = np.random.default_rng(1)
    w = sample_reduced_words(2, 2, 120_000, rng)
    _, counts = np.unique(w, axis=0, return_counts=True)
    assert len(counts) == count_sphere(2, 2, "reduced") == 12
    assert np.all(np.abs(counts - 10_000) < 500)


def test_text_round_trip():
    for s in ["1", "a", "abAB", "zZ"]:
        assert format_word(parse_word(s)) == s
    with pytest.raises(InvalidInput):
        parse_word("a1b")


@settings(max_examples=50)
@given(words(k=3))
def test_format_parse_round_trip(w):
    assert parse_word(format_word(w)) == w
