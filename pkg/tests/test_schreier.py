import numpy as np
import pytest

from gencomplex.errors import BudgetExceeded, ConfigError, Refused
from gencomplex.freegroup import parse_word as p, parse_words, sample_words
from gencomplex.presentation import abelianization, exponent_sum_map, kill_generators
from gencomplex.schreier import (
    CoreCosetGraph,
    CosetGraph,
    coset_graph,
    coset_graph_from_subgroup,
    dump_graph,
    lazy_ball,
    load_graph,
    quotient_coset_graph,
    require_radius,
    trace,
)
from gencomplex.stallings import build_subgroup_graph, member


def mod3():
    return quotient_coset_graph(exponent_sum_map(2, [1, 1], 3), 2)


def test_bouquet():
    g = coset_graph(build_subgroup_graph(parse_words("a b"), 2))
    assert isinstance(g, CosetGraph)
    assert g.num_vertices == 1 and g.d == 4 and not g.bipartite


def test_even_kernel_is_bipartite():
    g = coset_graph(build_subgroup_graph(parse_words("aa ab aB"), 2))
    assert g.num_vertices == 2 and g.bipartite
    assert np.all(g.table[0] == 1) and np.all(g.table[1] == 0)


def test_mod3_graph():
    g = mod3()
    assert g.num_vertices == 3 and not g.bipartite
    assert trace(g, 0, p("aaa")) == 0
    assert trace(g, 0, p("ab")) != 0


def test_lazy_ball_examples():
    line = lazy_ball(exponent_sum_map(2, [1, 1]), 2, 2)
    assert sorted(line.names) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert np.all(line.table[:, 0] == line.table[:, 2])  # a and b act alike
    killed = lazy_ball(kill_generators(2, [1]), 2, 1)
    assert sorted(killed.names) == [(), (-1,), (1,)]
    assert all(killed.table[v, 0] == v for v in range(3))
    trivial = lazy_ball(kill_generators(2, [1, 2]), 2, 5)
    assert trivial.num_vertices == 1 and trivial.complete


def test_lazy_ball_budget():
    with pytest.raises(BudgetExceeded) as exc:
        lazy_ball(abelianization(2), 2, 50, budget=100)
    assert exc.value.attained is not None


def test_quotient_graph_refuses_open_ball():
    ball = lazy_ball(abelianization(2), 2, 3)
    with pytest.raises(Refused):
        ball.to_coset_graph()
    with pytest.raises(Refused):
        require_radius(ball, 7)
    require_radius(ball, 6)


def test_infinite_index_gives_core_graph():
    g = coset_graph(build_subgroup_graph(parse_words("aa b"), 2))
    assert isinstance(g, CoreCosetGraph)
    assert g.missing_slots() == [(1, 2), (1, 3)]
    with pytest.raises(Refused):
        coset_graph_from_subgroup(build_subgroup_graph(parse_words("aa b"), 2))


def test_trace_parity_and_tree_positions():
    even = coset_graph(build_subgroup_graph(parse_words("aa ab aB"), 2))
    assert trace(even, 0, p("aba")) == 1
    core = coset_graph(build_subgroup_graph(parse_words("aa b"), 2))
    assert trace(core, 0, p("ab")) == (1, (2,))
    assert trace(core, 0, p("abBa")) == 0


@pytest.mark.parametrize("gens", ["aa ab aB", "aa b", "a", "aba b"])
def test_trace_agrees_with_membership(gens):
    h = build_subgroup_graph(parse_words(gens), 2)
    g = coset_graph(h)
    rng = np.random.default_rng(4)
    for row in sample_words(2, 9, 10_000, rng).tolist():
        assert (trace(g, 0, row) == 0) == member(h, row)


def test_dump_round_trip():
    for g in [mod3(), coset_graph(build_subgroup_graph(parse_words("aa b"), 2)),
              lazy_ball(abelianization(2), 2, 2)]:
        text = dump_graph(g)
        h = load_graph(text)
        assert type(h) is type(g)
        assert np.array_equal(h.table, g.table)
        assert dump_graph(h) == text


def test_load_rejects_bad_files():
    with pytest.raises(ConfigError):
        load_graph("")
    with pytest.raises(ConfigError) as exc:
        load_graph("d=4 V=1 base=0\n0 0 0\n")
    assert exc.value.line == 2
    with pytest.raises(ConfigError):
        load_graph("d=2 V=2 base=0\n1 1\n0 1\n")  # not an involution
