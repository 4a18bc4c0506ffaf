import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wclab.actions import FiniteAction, make_cycle, make_torus
from wclab.graphs import LocalGraph, cycle_graph, path_graph
from wclab.groups import Free, Window, Z, ball
from wclab.local import (CV_ROUND_CONSTANT, ball_of, cole_vishkin_color, greedy_extend_coloring,
                         is_proper, log_star, simulate_local)


def test_log_star_values():
    assert [log_star(n) for n in (1, 2, 3, 4, 16, 17, 65536)] == [0, 0, 1, 1, 2, 3, 3]


@pytest.mark.parametrize("n", [2, 3, 10, 100, 1000])
def test_cv_on_cycles_and_paths(n):
    for g in (cycle_graph(n), path_graph(n)):
        colors, trace = cole_vishkin_color(g)
        assert is_proper(g, colors) and max(colors) <= 2
        assert trace.rounds <= log_star(n - 1) + CV_ROUND_CONSTANT
        assert tuple(colors) == trace.coloring


def test_cv_trace_text():
    colors, trace = cole_vishkin_color(cycle_graph(10))
    text = trace.to_text()
    assert text.startswith(f"rounds: {trace.rounds}\n")
    assert text.splitlines()[1] == "coloring: " + " ".join(map(str, colors))


def test_cv_rejects_loops():
    with pytest.raises(ValueError):
        cole_vishkin_color(LocalGraph.build(1, [(0, 0)]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 40), m=st.integers(0, 80), seed=st.integers(0, 10**6))
def test_cv_on_random_graphs_uses_degree_plus_one(n, m, seed):
    rng = random.Random(seed)
    edges = [(u, v) for u, v in ((rng.randrange(n), rng.randrange(n)) for _ in range(m)) if u != v]
    ids = rng.sample(range(10 * n), n)
    g = LocalGraph.build(n, edges, ids)
    colors, _ = cole_vishkin_color(g)
    assert is_proper(g, colors)
    assert max(colors, default=0) <= g.max_degree()


def test_cv_with_offset_ids():
    g = cycle_graph(30, list(range(100, 130)))
    colors, trace = cole_vishkin_color(g)
    assert is_proper(g, colors)
    assert trace.rounds <= log_star(129) + CV_ROUND_CONSTANT


def test_greedy_examples():
    w = Window.of(Z, [-1, 1])
    assert greedy_extend_coloring(make_cycle(4), w).colors == (0, 1, 0, 1)
    assert greedy_extend_coloring(make_cycle(5), w, partial=[2, None, None, None, None]).colors[0] == 2
    f = greedy_extend_coloring(make_cycle(5), w, partial={1: 0})
    assert f.colors[1] == 0 and f.k == 3


def test_greedy_errors():
    w = Window.of(Z, [-1, 1])
    with pytest.raises(ValueError):
        greedy_extend_coloring(make_cycle(1), w)
    with pytest.raises(ValueError):
        greedy_extend_coloring(make_cycle(4), w, partial=[0, 0, None, None])
    with pytest.raises(ValueError):
        greedy_extend_coloring(make_cycle(4), w, partial=[5, None, None, None])
    with pytest.raises(ValueError):
        greedy_extend_coloring(make_cycle(4), Window.of(Z, [0, 1]))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 7), data=st.data())
def test_greedy_is_proper_on_f2(n, data):
    F = Free(2)
    a = FiniteAction(F, [data.draw(st.permutations(range(n))), data.draw(st.permutations(range(n)))])
    w = ball(F, 1)
    if any(a.perm_of(g)[x] == x for g in w if not g.is_identity() for x in range(n)):
        return
    f = greedy_extend_coloring(a, w)
    for g in w:
        if not g.is_identity():
            p = a.perm_of(g)
            assert all(f[x] != f[int(p[x])] for x in range(n))
    assert f.k == 5


def test_greedy_on_torus():
    a = make_torus(3, 3)
    f = greedy_extend_coloring(a, ball(a.spec, 1))
    assert max(f.colors) < 5


def test_ball_views():
    g = cycle_graph(8, [10 * i for i in range(8)])
    b = ball_of(g, 0, 2)
    assert sorted(b.ids) == [0, 10, 20, 60, 70]
    assert sorted(b.neighbors(0)) == [10, 70]
    assert ball_of(g, 0, 0).edges == ()


def test_simulate_local_is_local():
    # an algorithm reading only its radius-1 view cannot tell two cycles apart away from the change
    def alg(b):
        return min(b.ids)

    g1 = cycle_graph(10, list(range(10)))
    g2 = cycle_graph(10, list(range(5)) + [99, 6, 7, 8, 9])
    out1, out2 = simulate_local(alg, g1, 1), simulate_local(alg, g2, 1)
    differ = [v for v in range(10) if out1[v] != out2[v]]
    assert all(abs(v - 5) <= 1 for v in differ)
    assert out1 == [0, 0, 1, 2, 3, 4, 5, 6, 7, 0]
    with pytest.raises(ValueError):
        simulate_local(alg, g1, -1)
