import numpy as np
import pytest

from gencomplex.errors import ConfigError, InvalidInput, Refused
from gencomplex.freegroup import Alphabet, enumerate_ball, is_reduced, parse_word as p, sample_words
from gencomplex.presentation import (
    AbelianOracle,
    DehnOracle,
    FreeOracle,
    Presentation,
    abelianization,
    check_small_cancellation,
    dehn_reduce,
    exponent_sum_map,
    has_long_relator_subword,
    kill_generators,
    parse_presentation,
)

from oracles import exponent_vector, naive_reduce, trivial_words_by_insertion

GENUS2 = Presentation(Alphabet(4), (p("abABcdCD"),))


def test_apply_examples():
    assert kill_generators(2, [1]).apply(p("abA")) == (1,)
    ab = abelianization(2)
    assert ab.apply(p("abAB")) == (0, 0)
    assert ab.apply(p("aaaBB")) == (3, -2)


def test_apply_is_a_homomorphism_on_random_pairs():
    rng = np.random.default_rng(5)
    phis = [kill_generators(3, [2]), abelianization(3), exponent_sum_map(3, [1, 2, 0], 5)]
    for phi in phis:
        for _ in range(2000):
            u = tuple(sample_words(3, int(rng.integers(0, 8)), 1, rng)[0])
            v = tuple(sample_words(3, int(rng.integers(0, 8)), 1, rng)[0])
            lhs = phi.apply(u + v)
            rhs = phi.identity()
            for x in u + v:
                rhs = phi.multiply(rhs, x)
            assert lhs == rhs


def test_trivial_mask_matches_scalar_apply():
    rng = np.random.default_rng(2)
    words = sample_words(3, 7, 3000, rng)
    for phi in [kill_generators(3, [1]), abelianization(3), exponent_sum_map(3, [1, 1, 1], 3),
                kill_generators(3, [1, 2, 3])]:
        mask = phi.trivial_mask(words)
        expect = [phi.is_identity(phi.apply(tuple(r))) for r in words.tolist()]
        assert mask.tolist() == expect


def test_validation_against_relators():
    assert abelianization(2, [p("abAB")]).validated
    assert not abelianization(2, None).validated
    with pytest.raises(InvalidInput):
        kill_generators(2, [1], [p("abAB"), p("b")])


def test_small_cancellation_examples():
    r = check_small_cancellation(GENUS2)
    assert r.satisfies and r.max_piece == 1
    a6 = check_small_cancellation(Presentation(Alphabet(1), (p("aaaaaa"),)))
    assert not a6.satisfies and a6.max_piece == 5
    empty = check_small_cancellation(Presentation(Alphabet(2), ()))
    assert empty.satisfies and empty.max_piece == 0


def test_dehn_examples():
    assert dehn_reduce(GENUS2, p("abABcdCD")) == ()
    assert dehn_reduce(GENUS2, p("ab")) == p("ab")
    assert dehn_reduce(GENUS2, ()) == ()
    assert dehn_reduce(GENUS2, p("abAB")) == p("abAB")


def test_dehn_output_is_reduced_and_has_no_long_pieces():
    for w in enumerate_ball(Alphabet(4), 4):
        out = dehn_reduce(GENUS2, w)
        assert is_reduced(out)
        assert not has_long_relator_subword(GENUS2, out)


def test_dehn_agrees_with_insertion_search():
    trivial = trivial_words_by_insertion([p("abABcdCD")], 10)
    for w in enumerate_ball(Alphabet(4), 6, "reduced"):
        assert (dehn_reduce(GENUS2, w) == ()) == (w in trivial)


def test_oracles():
    assert FreeOracle(2).is_identity(p("aA"))
    assert AbelianOracle(abelianization(2)).is_identity(p("abAB"))
    assert not DehnOracle(GENUS2).is_identity(p("abAB"))
    assert DehnOracle(GENUS2).is_identity(p("cdCDabAB"))
    assert not DehnOracle(GENUS2).is_identity(p("cdCDbaBA"))
    with pytest.raises(Refused):
        DehnOracle(Presentation(Alphabet(1), (p("aaaaaa"),)))


def test_parse_presentation():
    P = parse_presentation("gens: a b c d\nrels: abABcdCD\n")
    assert P.relators == (p("abABcdCD"),)
    assert str(P) == "gens: a b c d\nrels: abABcdCD"
    with pytest.raises(ConfigError) as exc:
        parse_presentation("gens: a b\nbogus line\n")
    assert exc.value.line == 2


def test_relators_are_cyclically_reduced():
    P = Presentation(Alphabet(2), (p("babAB"),))
    assert P.relators == (p("b"),)
    with pytest.raises(InvalidInput):
        Presentation(Alphabet(2), (p("abBA"),))


def test_exponent_vector_oracle():
    ab = abelianization(3)
    for w in enumerate_ball(Alphabet(3), 3):
        assert ab.apply(w) == exponent_vector(w, 3)
        assert (kill_generators(3, [1, 2, 3]).apply(w)) == ()
    assert naive_reduce(p("aAbB")) == ()
