import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wclab import kernels
from wclab.actions import FiniteAction, make_cycle, make_torus
from wclab.csp import Verdict
from wclab.groups import F2, Free, FreeAbelian, GroupMismatchError, Window, Z, ball
from wclab.polyomino import free_pieces
from wclab.local import greedy_extend_coloring
from wclab.patterns import Labelling, LocalRule, apply_local_rule
from wclab.sft import (SftSpec, box_problem, full_shift, golden_mean_sft, hom_exists, image_sft,
                       is_mixing_z, nonempty_z, nonempty_z2_bounded, period_forcing_sft, period_sft,
                       proper_coloring_sft, rule_maps_into, tiling_sft_f2, tiling_sft_z2, transfer_graph,
                       verify_hom)

Z2 = FreeAbelian(2)
W01 = Window.of(Z, [0, 1])


def brute_hom(a, x, hits=()):
    img = a.window_images(x.window)
    for f in itertools.product(range(x.size), repeat=a.n):
        pats = {tuple(f[i] for i in img[:, p]) for p in range(a.n)}
        if all(x.is_allowed(p) for p in pats) and all(tuple(h) in pats for h in hits):
            return True
    return False


@st.composite
def small_instances(draw):
    kind = draw(st.sampled_from(["Z", "Z2", "F2"]))
    A = draw(st.integers(1, 3))
    if kind == "Z":
        spec = Z
        n = draw(st.integers(1, 6))
        a = FiniteAction(Z, [draw(st.permutations(range(n)))])
        pool = [Z.elem((i,)) for i in range(-2, 3)]
    elif kind == "Z2":
        spec = Z2
        a = make_torus(draw(st.integers(1, 3)), draw(st.integers(1, 3)))
        pool = list(ball(Z2, 1))
    else:
        spec = Free(2)
        n = draw(st.integers(1, 4))
        a = FiniteAction(spec, [draw(st.permutations(range(n))), draw(st.permutations(range(n)))])
        pool = list(ball(spec, 1))
    w = Window.of(spec, draw(st.sets(st.sampled_from(pool), min_size=1, max_size=2)))
    allpats = list(itertools.product(range(A), repeat=len(w)))
    pats = draw(st.sets(st.sampled_from(allpats), max_size=len(allpats)))
    x = SftSpec.explicit([str(i) for i in range(A)], w, pats)
    hits = draw(st.lists(st.sampled_from(allpats), max_size=2))
    return a, x, hits


@settings(max_examples=150, deadline=None)
@given(inst=small_instances(), order=st.sampled_from(["mrv", "lex"]))
def test_hom_matches_brute_force(inst, order):
    a, x, hits = inst
    res = hom_exists(a, x, hits=hits, order=order)
    assert (res.verdict is Verdict.YES) == brute_hom(a, x, hits)
    if res.verdict is Verdict.YES:
        assert verify_hom(res.labelling, a, x)


@settings(max_examples=60, deadline=None)
@given(inst=small_instances())
def test_lex_order_returns_least_solution(inst):
    a, x, _ = inst
    res = hom_exists(a, x, order="lex")
    if res.verdict is Verdict.YES:
        img = a.window_images(x.window)
        for f in itertools.product(range(x.size), repeat=a.n):
            if all(x.is_allowed([f[i] for i in img[:, p]]) for p in range(a.n)):
                assert tuple(res.labelling.colors) == f
                break


@settings(max_examples=60, deadline=None)
@given(inst=small_instances(), t=st.integers(-2, 2))
def test_translated_sft_has_same_homs(inst, t):
    a, x, _ = inst
    shift = x.group.symmetric_generators[0] ** t
    y = x.translate(shift)
    assert (hom_exists(a, x).verdict is Verdict.YES) == (hom_exists(a, y).verdict is Verdict.YES)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 6), data=st.data())
def test_proper_coloring_exists_without_self_adjacency(n, data):
    F = Free(2)
    a = FiniteAction(F, [data.draw(st.permutations(range(n))), data.draw(st.permutations(range(n)))])
    w = ball(F, 1)
    x = proper_coloring_sft(w)
    self_adjacent = any(a.perm_of(g)[p] == p for g in w if not g.is_identity() for p in range(a.n))
    res = hom_exists(a, x)
    assert (res.verdict is Verdict.YES) == (not self_adjacent)
    if not self_adjacent:
        f = greedy_extend_coloring(a, w)
        assert verify_hom(Labelling.of(a, x.size, f.colors), a, x)


def test_proper_coloring_needs_symmetric_window():
    with pytest.raises(ValueError):
        proper_coloring_sft(W01)


def test_proper_coloring_examples():
    x = proper_coloring_sft(Window.of(Z, [-1, 1]))
    assert x.size == 3
    assert hom_exists(make_cycle(3), x, order="lex").labelling.colors == (0, 1, 2)
    assert hom_exists(make_cycle(1), x).verdict is Verdict.NO


def test_period_sft_and_forcing():
    assert hom_exists(make_cycle(6), period_sft(3)).verdict is Verdict.YES
    assert hom_exists(make_cycle(4), period_sft(3)).verdict is Verdict.NO
    x = period_forcing_sft(2)
    for m, n in itertools.product(range(1, 5), repeat=2):
        want = m % 2 == 0 and n % 2 == 0
        assert (hom_exists(make_torus(m, n), x).verdict is Verdict.YES) == want


def test_hits_that_cannot_occur():
    res = hom_exists(make_cycle(4), period_sft(2), hits=[("0", "0")])
    assert res.verdict is Verdict.NO
    with pytest.raises(ValueError):
        hom_exists(make_cycle(4), period_sft(2), hits=[("0", "7")])
    with pytest.raises(ValueError):
        hom_exists(make_cycle(4), period_sft(2), hits=[(0,)])


def test_group_mismatch():
    with pytest.raises(GroupMismatchError):
        hom_exists(make_torus(2, 2), period_sft(2))


def test_budget_exhaustion_is_unknown():
    res = hom_exists(make_torus(5, 5), tiling_sft_z2(5), budget=1, area=False)
    assert res.verdict in (Verdict.UNKNOWN, Verdict.YES)
    res = hom_exists(make_torus(4, 6), tiling_sft_z2(5), budget=1, area=False)
    assert res.verdict is Verdict.UNKNOWN


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_area_pruning_agrees_with_plain_search(p):
    x = tiling_sft_z2(p)
    for n, m in itertools.product(range(1, 4), repeat=2):
        a = make_torus(n, m)
        assert hom_exists(a, x).verdict == hom_exists(a, x, area=False).verdict


def test_tiling_sft_solutions_are_tilings():
    from wclab.certify import _tiling_ok

    for p in (2, 3, 4):
        x = tiling_sft_z2(p)
        res = hom_exists(make_torus(4, 3), x)
        assert res.verdict is Verdict.YES
        ok, msg = _tiling_ok(make_torus(4, 3), x, res.labelling.colors)
        assert ok, msg


def test_tiling_size_range():
    with pytest.raises(ValueError):
        tiling_sft_z2(7)


def brute_free_pieces(p):
    ball_elems = [g for g in ball(F2, p - 1).elements if not g.is_identity()]
    out = set()
    for rest in itertools.combinations(ball_elems, p - 1):
        cells = {F2.identity, *rest}
        seen, stack = {F2.identity}, [F2.identity]
        while stack:
            g = stack.pop()
            for s in F2.symmetric_generators:
                h = s * g
                if h in cells and h not in seen:
                    seen.add(h)
                    stack.append(h)
        if len(seen) == p:
            out.add(min(tuple(sorted(q * c.inv() for q in cells)) for c in cells))
    return out


def test_free_pieces_match_brute_force():
    assert [len(free_pieces(p)) for p in (1, 2, 3)] == [1, 2, 6]
    for p in (1, 2, 3, 4):
        assert set(free_pieces(p)) == brute_free_pieces(p)


def free_tiling_oracle(a, p):
    """Exact cover of the points by injective copies ``{q x : q in P}`` of pieces."""
    blocks = set()
    for piece in free_pieces(p):
        for x in range(a.n):
            cells = frozenset(a.act(q, x) for q in piece)
            if len(cells) == p:
                blocks.add(cells)
    by_point = {x: [b for b in blocks if x in b] for x in range(a.n)}

    def cover(free):
        if not free:
            return True
        x = min(free)
        return any(cover(free - b) for b in by_point[x] if b <= free)

    return cover(frozenset(range(a.n)))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 7), p=st.sampled_from([1, 2, 3]), data=st.data())
def test_f2_tiling_matches_exact_cover(n, p, data):
    from wclab.certify import check_hom_labelling

    a = FiniteAction(F2, [data.draw(st.permutations(range(n))), data.draw(st.permutations(range(n)))])
    x = tiling_sft_f2(p)
    res = hom_exists(a, x)
    assert (res.verdict is Verdict.YES) == free_tiling_oracle(a, p)
    assert hom_exists(a, x, area=False).verdict == res.verdict
    if res.verdict is Verdict.YES:
        assert check_hom_labelling(a, x, res.labelling.colors)[0]


def test_f2_tiling_examples():
    # a acts as a 3-cycle and b trivially: the a-orbit is one 3-cell piece
    a = FiniteAction(F2, [[1, 2, 0], [0, 1, 2]])
    assert hom_exists(a, tiling_sft_f2(3)).verdict is Verdict.YES
    assert hom_exists(a, tiling_sft_f2(2)).verdict is Verdict.NO
    # all fixed points: no piece of two cells fits injectively
    assert hom_exists(FiniteAction(F2, [[0, 1], [0, 1]]), tiling_sft_f2(2)).verdict is Verdict.NO
    assert hom_exists(FiniteAction(F2, [[1, 0], [0, 1]]), tiling_sft_f2(2)).verdict is Verdict.YES
    with pytest.raises(ValueError):
        tiling_sft_f2(4)


# -- Z decisions -------------------------------------------------------------------

def test_nonempty_z_examples():
    assert nonempty_z(golden_mean_sft()) == (True, (0,))
    x = SftSpec.explicit(["0", "1", "2"], W01, [(0, 1), (1, 2), (2, 0)])
    assert nonempty_z(x) == (True, (0, 1, 2))
    empty = SftSpec.explicit(["0", "1"], W01, [(0, 1)])
    assert nonempty_z(empty) == (False, None)


def test_transfer_graph_of_golden_mean():
    verts, edges = transfer_graph(golden_mean_sft())
    assert verts == [(0,), (1,)]
    assert sorted(edges[1]) == [(0, 1)]


def test_mixing_examples():
    assert is_mixing_z(full_shift(Z, 2))
    assert is_mixing_z(golden_mean_sft())
    assert not is_mixing_z(SftSpec.explicit(["0", "1"], W01, [(0, 1), (1, 0)]))
    assert not is_mixing_z(SftSpec.explicit(["0", "1"], W01, [(0, 0), (1, 1)]))
    with pytest.raises(ValueError):
        is_mixing_z(SftSpec.explicit(["0", "1"], W01, [(0, 1)]))


def test_mixing_against_primitive_matrix():
    rng = np.random.default_rng(3)
    for _ in range(100):
        A = int(rng.integers(1, 4))
        M = rng.random((A, A)) < 0.5
        pats = [(i, j) for i in range(A) for j in range(A) if M[i, j]]
        x = SftSpec.explicit([str(i) for i in range(A)], W01, pats)
        # essential part: vertices on some cycle
        reach = np.linalg.matrix_power(M.astype(int) + np.eye(A, dtype=int), A) > 0
        ess = [i for i in range(A) if any(M[j, i] and reach[i, j] for j in range(A))]
        if not ess:
            continue
        E = M[np.ix_(ess, ess)].astype(np.int64)
        k = len(ess)
        primitive = (np.linalg.matrix_power(E, (k - 1) ** 2 + 1) > 0).all()
        assert is_mixing_z(x) == primitive


# -- Z^2 bounded --------------------------------------------------------------------

def test_nonempty_z2_bounded():
    yes = nonempty_z2_bounded(tiling_sft_z2(2), 3)
    assert yes.verdict is Verdict.YES and yes.torus[0] * yes.torus[1] == 2
    empty = SftSpec.explicit(["0", "1"], Window.of(Z2, [(0, 0), (1, 0)]), [(0, 1)])
    no = nonempty_z2_bounded(empty, 2)
    assert no.verdict is Verdict.NO and no.radius is not None
    assert nonempty_z2_bounded(period_forcing_sft(3), 2).verdict is Verdict.UNKNOWN


def test_box_problem_shape():
    prob, cells = box_problem(tiling_sft_z2(2), 1)
    assert len(cells) == 9 + 12
    assert prob.n_vars == len(cells)


# -- local rules between SFTs ------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_local_rule_composition(data):
    k = data.draw(st.integers(2, 3))
    pats = data.draw(st.sets(st.sampled_from(list(itertools.product(range(k), repeat=2))), min_size=1))
    x = SftSpec.explicit([str(i) for i in range(k)], W01, pats)
    r1 = LocalRule.of(W01, {p: data.draw(st.integers(0, 1)) for p in itertools.product(range(k), repeat=2)}, 2)
    r2 = LocalRule.of(W01, {p: data.draw(st.integers(0, 1)) for p in itertools.product(range(2), repeat=2)}, 2)
    y = image_sft(x, r1, W01)
    z = image_sft(y, r2, W01)
    assert rule_maps_into(r1, x, y) and rule_maps_into(r2, y, z)
    n = data.draw(st.integers(1, 6))
    a = make_cycle(n)
    res = hom_exists(a, x)
    if res.verdict is Verdict.YES:
        mid = apply_local_rule(r1, res.labelling)
        assert verify_hom(mid, a, y)
        assert verify_hom(apply_local_rule(r2, mid), a, z)


# -- kernels -----------------------------------------------------------------------

def test_compiled_and_python_search_agree():
    py = getattr(kernels.csp_search, "py_func", kernels.csp_search)
    for a, x in [(make_cycle(7), period_sft(7)), (make_cycle(5), period_sft(2)),
                 (make_torus(2, 3), tiling_sft_z2(3)), (make_torus(3, 3), tiling_sft_z2(2))]:
        for order in ("mrv", "lex"):
            fast = hom_exists(a, x, order=order)
            slow = hom_exists(a, x, order=order, kernel=py)
            assert fast.verdict == slow.verdict
            assert fast.nodes == slow.nodes
            if fast.labelling is not None:
                assert fast.labelling.colors == slow.labelling.colors


def test_pattern_code_kernels_agree():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 6, size=(3, 6))
    labels = rng.integers(0, 3, size=(20, 6))
    py = getattr(kernels.pattern_codes, "py_func", kernels.pattern_codes)
    expect = kernels.pattern_codes_numpy(img, labels, 3)
    assert np.array_equal(kernels.pattern_codes(img, labels, 3), expect)
    assert np.array_equal(py(img, labels, 3), expect)
