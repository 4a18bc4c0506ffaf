import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wclab.groups import (Cyclic, DirectProduct, Free, FreeAbelian, GroupMismatchError, Torus,
                          ball, cayley_graph, format_elem, format_spec, parse_elem, parse_spec,
                          parse_window, word_length)

SPECS = [FreeAbelian(1), FreeAbelian(2), Cyclic(5), Torus(3, 4), Free(2),
         DirectProduct(Cyclic(2), FreeAbelian(1))]


def random_word(spec, draw_letters):
    g = spec.identity
    gens = spec.symmetric_generators
    for i in draw_letters:
        g = g * gens[i % len(gens)]
    return g


words = st.lists(st.integers(0, 50), max_size=8)


def test_free_abelian_arithmetic():
    Z2 = FreeAbelian(2)
    a, b = Z2.elem((1, 2)), Z2.elem((-3, 5))
    assert (a * b).payload == (-2, 7)
    assert a.inv().payload == (-1, -2)
    assert word_length(a * b) == 9


def test_cyclic_and_torus_reduce():
    assert (Cyclic(5).elem(3) * Cyclic(5).elem(4)).payload == 2
    T = Torus(3, 4)
    assert (T.elem((2, 3)) * T.elem((2, 3))).payload == (1, 2)


def test_free_group_reduction():
    F = Free(2)
    a, b = F.generators
    assert (a * a.inv()).is_identity()
    assert format_elem(a * b * b.inv() * a) == "F2:aa"
    assert format_elem((a * b).inv()) == "F2:BA"
    assert word_length(a * b * a.inv()) == 3


def test_mismatched_groups_raise():
    with pytest.raises(GroupMismatchError):
        FreeAbelian(1).identity * Cyclic(3).identity


@pytest.mark.parametrize("spec", SPECS, ids=format_spec)
@settings(max_examples=40, deadline=None)
@given(x=words, y=words, z=words)
def test_group_axioms(spec, x, y, z):
    g, h, k = (random_word(spec, w) for w in (x, y, z))
    assert (g * h) * k == g * (h * k)
    assert (g * g.inv()).is_identity()
    assert g * spec.identity == g == spec.identity * g


@pytest.mark.parametrize("spec", SPECS, ids=format_spec)
@settings(max_examples=30, deadline=None)
@given(x=words)
def test_element_text_round_trip(spec, x):
    g = random_word(spec, x)
    assert parse_elem(format_elem(g), spec) == g


@pytest.mark.parametrize("spec", SPECS, ids=format_spec)
def test_spec_round_trip(spec):
    assert parse_spec(format_spec(spec)) == spec


def brute_ball(spec, r):
    """All products of at most r symmetric generators."""
    out = {spec.identity}
    for n in range(1, r + 1):
        for letters in itertools.product(spec.symmetric_generators, repeat=n):
            g = spec.identity
            for s in letters:
                g = g * s
            out.add(g)
    return out


@pytest.mark.parametrize("spec", SPECS, ids=format_spec)
def test_ball_matches_word_enumeration(spec):
    for r in range(3):
        assert set(ball(spec, r)) == brute_ball(spec, r)


def test_ball_sizes():
    assert len(ball(FreeAbelian(1), 3)) == 7
    assert len(ball(FreeAbelian(2), 2)) == 13
    # 1 + 4 + 12 + 36
    assert len(ball(Free(2), 3)) == 53


def test_free_cayley_graph_is_a_tree():
    g = cayley_graph(Free(2), 3)
    assert g.n == 53
    assert len(g.edges) == g.n - 1
    assert g.is_connected() and g.is_forest()


def test_cayley_graph_of_cycle():
    g = cayley_graph(Cyclic(6), 3)
    assert g.n == 6
    assert sorted(g.degrees()) == [2] * 6


def test_window_order_and_parse():
    Z = FreeAbelian(1)
    w = parse_window("1,-1,0,1", Z)
    assert [g.payload[0] for g in w] == [-1, 0, 1]
    assert w.is_symmetric()
    assert not parse_window("0,1", Z).is_symmetric()
    assert [g.payload[0] for g in w.translate(Z.elem((2,)))] == [1, 2, 3]


def test_bad_specs():
    with pytest.raises(ValueError):
        parse_spec("Q")
    with pytest.raises(ValueError):
        Torus(0, 2)
