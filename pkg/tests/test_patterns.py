import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wclab.actions import FiniteAction, make_cycle
from wclab.csp import Verdict
from wclab.groups import Free, GroupMismatchError, Window, Z, ball
from wclab.patterns import (Labelling, LocalRule, PatternSet, apply_local_rule, enumerate_pattern_sets,
                            patterns_of, realize_pattern_set, weakly_contains_at)
from wclab.polyomino import fixed_polyominoes, normalize

W01 = Window.of(Z, [0, 1])


def z_actions(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.permutations(list(range(n))).map(lambda p: FiniteAction(Z, [list(p)])))


def test_three_patterns_on_c3():
    f = Labelling.of(make_cycle(3), 2, [0, 0, 1])
    assert patterns_of(f, W01).patterns == ((0, 0), (0, 1), (1, 0))


def test_pattern_lookup_by_element():
    f = Labelling.of(make_cycle(3), 3, [0, 1, 2])
    ps = patterns_of(f, W01)
    first = next(iter(ps))
    assert first[Z.elem((0,))] == 0 and first[Z.elem((1,))] == 1


def brute_family(a, w, k):
    return {patterns_of(Labelling.of(a, k, f), w) for f in itertools.product(range(k), repeat=a.n)}


@settings(max_examples=40, deadline=None)
@given(a=z_actions(5), k=st.integers(1, 3), offs=st.sets(st.integers(-2, 2), min_size=1, max_size=2))
def test_enumeration_matches_brute_force(a, k, offs):
    w = Window.of(Z, sorted(offs))
    fam = enumerate_pattern_sets(a, w, k, budget=10**6)
    assert not fam.partial
    assert set(fam.sets) == brute_family(a, w, k)


def test_enumeration_partial_flag():
    fam = enumerate_pattern_sets(make_cycle(8), W01, 2, budget=10)
    assert fam.partial and fam.labellings_examined == 10
    assert set(fam.sets) <= brute_family(make_cycle(8), W01, 2)


@settings(max_examples=40, deadline=None)
@given(a=z_actions(5), data=st.data())
def test_conjugation_invariance(a, data):
    sigma = data.draw(st.permutations(list(range(a.n))))
    colors = data.draw(st.lists(st.integers(0, 2), min_size=a.n, max_size=a.n))
    # move point x to sigma[x]
    inv = np.argsort(sigma)
    b = FiniteAction(Z, [[sigma[a.perms[0][inv[y]]] for y in range(a.n)]])
    g = [0] * a.n
    for x in range(a.n):
        g[sigma[x]] = colors[x]
    w = Window.of(Z, [-1, 0, 2])
    assert patterns_of(Labelling.of(a, 3, colors), w) == patterns_of(Labelling.of(b, 3, g), w)


@settings(max_examples=40, deadline=None)
@given(a=z_actions(5), data=st.data())
def test_own_pattern_sets_are_realized(a, data):
    colors = data.draw(st.lists(st.integers(0, 1), min_size=a.n, max_size=a.n))
    target = patterns_of(Labelling.of(a, 2, colors), W01)
    f = realize_pattern_set(a, target)
    assert f is not None and patterns_of(f, W01) == target
    # lexicographically least witness
    assert f.colors <= tuple(colors)


def test_factor_map_gives_containment():
    # c_6 -> c_3 (x mod 3) is an equivariant surjection, so c_6 realizes all of c_3's pattern sets
    for k in (1, 2, 3):
        v = weakly_contains_at(make_cycle(6), make_cycle(3), W01, k, budget=10**6)
        assert v.verdict is Verdict.YES
        for ps, f in v.witnesses.items():
            assert patterns_of(f, W01) == ps


def test_containment_counterexample():
    v = weakly_contains_at(make_cycle(2), make_cycle(3), W01, 2, budget=10**6)
    assert v.verdict is Verdict.NO
    assert realize_pattern_set(make_cycle(2), v.counterexample) is None


def test_containment_unknown_when_partial():
    v = weakly_contains_at(make_cycle(6), make_cycle(6), W01, 2, budget=5)
    assert v.verdict is Verdict.UNKNOWN


def test_free_group_patterns():
    F = Free(2)
    a = FiniteAction(F, [[1, 0], [0, 1]])
    w = ball(F, 1)
    ps = patterns_of(Labelling.of(a, 2, [0, 1]), w)
    assert len(ps) == 2


def test_group_mismatch():
    with pytest.raises(GroupMismatchError):
        patterns_of(Labelling.of(make_cycle(2), 2, [0, 1]), ball(Free(2), 1))


def test_pattern_set_canonical():
    ps = PatternSet.of(W01, 2, [(1, 1), (1, 0)])
    assert ps.canonical().patterns == ((0, 0), (0, 1))
    with pytest.raises(ValueError):
        PatternSet.of(W01, 2, [(0, 2)])


def test_xor_rule():
    rule = LocalRule.from_function(W01, 2, lambda p: p[0] ^ p[1], 2)
    out = apply_local_rule(rule, Labelling.of(make_cycle(4), 2, [0, 0, 1, 1]))
    assert out.colors == (0, 1, 0, 1)


def test_rule_with_missing_entry():
    rule = LocalRule.of(W01, {(0, 0): 1})
    with pytest.raises(ValueError):
        apply_local_rule(rule, Labelling.of(make_cycle(2), 2, [0, 1]))


def brute_polyominoes(p):
    """Connected p-subsets of a (2p-1) x (2p-1) box containing a fixed cell, up to translation."""
    box = [(x, y) for x in range(2 * p - 1) for y in range(2 * p - 1)]
    out = set()
    for cells in itertools.combinations(box, p):
        s = set(cells)
        stack, seen = [cells[0]], {cells[0]}
        while stack:
            x, y = stack.pop()
            for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                c = (x + d[0], y + d[1])
                if c in s and c not in seen:
                    seen.add(c)
                    stack.append(c)
        if len(seen) == p:
            out.add(normalize(cells))
    return out


def test_fixed_polyomino_counts():
    assert [len(fixed_polyominoes(p)) for p in range(1, 7)] == [1, 2, 6, 19, 63, 216]
    for p in range(1, 5):
        assert set(fixed_polyominoes(p)) == brute_polyominoes(p)
