import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wclab import certify, evidence
from wclab.actions import (FiniteAction, Inclusion, action_from_4regular, chi, chi_witness, coinduce,
                           count_homs, make_cycle, make_torus, random_large_girth_4regular, restrict)
from wclab.graphs import cycle_graph, parse_graph
from wclab.groups import Free, FreeAbelian, Window, Z, ball
from wclab.local import cole_vishkin_color
from wclab.patterns import Labelling, patterns_of, realize_pattern_set, weakly_contains_at
from wclab.sft import (golden_mean_sft, hom_exists, nonempty_z, nonempty_z2_bounded, period_sft,
                       proper_coloring_sft, tiling_sft_f2, tiling_sft_z2)
from wclab.textio import (Certificate, FormatError, format_action, format_labelling,
                          format_pattern_set, format_sft, parse_action, parse_certificate,
                          parse_labelling, parse_pattern_set, parse_sft)

W01 = Window.of(Z, [0, 1])


@settings(max_examples=40, deadline=None)
@given(data=st.data(), n=st.integers(1, 6))
def test_action_round_trip(data, n):
    spec = data.draw(st.sampled_from([Z, FreeAbelian(2), Free(2)]))
    if spec == FreeAbelian(2):
        a = make_torus(n, data.draw(st.integers(1, 3)))
    else:
        a = FiniteAction(spec, [data.draw(st.permutations(range(n))) for _ in spec.generators])
    assert parse_action(format_action(a)) == a


def test_action_parse_errors():
    with pytest.raises(FormatError):
        parse_action("group Z\n")
    with pytest.raises(FormatError):
        parse_action("group Z\npoints 2\ngen a: 1 0\n")
    with pytest.raises(FormatError):
        parse_action("group Z\npoints 3\ngen a: 1 0\n")
    with pytest.raises(FormatError):
        parse_action("group Z\npoints 2\nbogus\n")


def test_labelling_round_trip(tmp_path):
    a = make_cycle(4)
    (tmp_path / "c4.act").write_text(format_action(a))
    f = Labelling.of(a, 3, [0, 2, 1, 2])
    assert parse_labelling(format_labelling(f, "c4.act"), str(tmp_path)) == f


def test_pattern_set_round_trip():
    ps = patterns_of(Labelling.of(make_cycle(3), 2, [0, 0, 1]), W01)
    assert parse_pattern_set(format_pattern_set(ps)) == ps
    bare = parse_pattern_set("window 0,1\n0 1\n1 0\n", spec=Z)
    assert bare.k == 2 and len(bare) == 2


@pytest.mark.parametrize("x", [period_sft(3), golden_mean_sft(), proper_coloring_sft(ball(Free(2), 1)),
                               tiling_sft_z2(3), tiling_sft_f2(3)],
                         ids=["period", "golden", "f2-coloring", "tiling", "tiling-f2"])
def test_sft_round_trip(x):
    y = parse_sft(format_sft(x))
    assert y.alphabet == x.alphabet and y.window == x.window
    if x.allowed is not None:
        assert y.allowed == x.allowed
    else:
        assert [(i, j, set(r)) for i, j, r in y.pairs] == [(i, j, set(r)) for i, j, r in x.pairs]


def test_sft_parse_errors():
    with pytest.raises(FormatError):
        parse_sft("group Z\nalphabet a b\nwindow 0,1\nallow a c\n")
    with pytest.raises(FormatError):
        parse_sft("group Z\nalphabet a b\nwindow 0,1\nallow a\n")
    with pytest.raises(FormatError):
        parse_sft("builtin sudoku 3\n")


def test_graph_text_and_dot():
    g = cycle_graph(4, [5, 6, 7, 8])
    assert parse_graph(g.to_text()).edge_multiset() == g.edge_multiset()
    h = parse_graph(g.to_dot())
    assert h.edge_multiset() == g.edge_multiset() and h.ids == g.ids


def test_certificate_round_trip():
    c = Certificate("hom", "Yes", {"map": "0 1", "hit": ["0 1", "1 0"]}, {"action": "group Z\n"})
    assert parse_certificate(c.to_text()) == c
    with pytest.raises(FormatError):
        parse_certificate("nonsense\n")
    with pytest.raises(FormatError):
        parse_certificate("wclab-certificate v1\nkind hom\nverdict Yes\nbegin action\n")


# -- the checker accepts honest certificates and rejects tampered ones -------------

def _honest():
    certs = {}
    a, x = make_cycle(6), period_sft(3)
    certs["hom"] = evidence.hom_cert(a, x, hom_exists(a, x, hits=[(1, 2)]), hits=[(1, 2)])
    certs["hom-no"] = evidence.hom_cert(make_cycle(4), x, hom_exists(make_cycle(4), x))
    t = make_torus(2, 2)
    certs["tiling"] = evidence.hom_cert(t, tiling_sft_z2(2), hom_exists(t, tiling_sft_z2(2)))
    f2 = FiniteAction(Free(2), [[1, 2, 0, 4, 5, 3], [3, 4, 5, 0, 1, 2]])
    certs["tiling-f2"] = evidence.hom_cert(f2, tiling_sft_f2(3), hom_exists(f2, tiling_sft_f2(3)))
    target = patterns_of(Labelling.of(make_cycle(3), 2, [0, 0, 1]), W01)
    certs["realize"] = evidence.realize_cert(make_cycle(6), target, realize_pattern_set(make_cycle(6), target))
    v = weakly_contains_at(make_cycle(4), make_cycle(2), W01, 2, budget=10**6)
    certs["compare"] = evidence.compare_cert(make_cycle(4), make_cycle(2), W01, 2, v)
    v = weakly_contains_at(make_cycle(2), make_cycle(3), W01, 2, budget=10**6)
    certs["compare-no"] = evidence.compare_cert(make_cycle(2), make_cycle(3), W01, 2, v)
    ok, word = nonempty_z(golden_mean_sft())
    certs["nonempty-z"] = evidence.nonempty_z_cert(golden_mean_sft(), ok, word)
    certs["nonempty-z2"] = evidence.nonempty_z2_cert(tiling_sft_z2(2), nonempty_z2_bounded(tiling_sft_z2(2), 2))
    certs["mixing"] = evidence.mixing_cert(golden_mean_sft(), True)
    g1 = Z.elem((1,))
    certs["chi"] = evidence.chi_cert(make_cycle(5), g1, chi(make_cycle(5), g1), chi_witness(make_cycle(5), g1))
    cg = cycle_graph(9)
    colors, trace = cole_vishkin_color(cg)
    certs["coloring"] = evidence.coloring_cert(cg, colors, 3, trace.rounds)
    rg = random_large_girth_4regular(40, 4, seed=1)
    certs["schreier"] = evidence.schreier_cert(rg, action_from_4regular(rg), 4)
    inc = Inclusion.of((2,))
    a2, b2 = make_cycle(2), make_cycle(4)
    co = coinduce(a2, inc)
    certs["adjunction"] = evidence.adjunction_cert(a2, b2, co, 2, count_homs(restrict(b2, inc), a2),
                                                   count_homs(b2, co))
    return certs


HONEST = _honest()


@pytest.mark.parametrize("name", sorted(HONEST))
def test_honest_certificates_pass(name):
    ok, msg = certify.check_text(HONEST[name].to_text())
    assert ok, msg


def _tamper(text, old, new):
    assert old in text, (old, text)
    return text.replace(old, new, 1)


def _constant_map(text):
    lines = text.splitlines()
    i = next(i for i, line in enumerate(lines) if line.startswith("map "))
    syms = lines[i].split()[1:]
    lines[i] = "map " + " ".join(syms[:1] * len(syms))
    return "\n".join(lines) + "\n"


TAMPERED = {
    "hom": lambda t: _tamper(t, "map 0 1 2", "map 0 2 2"),
    "hom-no": lambda t: _tamper(_tamper(t, "verdict No", "verdict Yes"), "nodes", "map 0 1 2 0\nnodes"),
    "tiling": _constant_map,
    "tiling-f2": _constant_map,
    "realize": lambda t: _tamper(t, "map 0 0 0 0 0 1", "map 0 0 0 0 0 0"),
    "compare-no": lambda t: _tamper(t, "verdict No", "verdict Yes"),
    "nonempty-z": lambda t: _tamper(t, "word 0", "word 1"),
    "mixing": lambda t: _tamper(t, "verdict Yes", "verdict No"),
    "chi": lambda t: _tamper(t, "value 3", "value 2"),
    "coloring": lambda t: _tamper(t, "palette 3", "palette 2"),
    "adjunction": lambda t: t.replace("counts ", "counts 9", 1),
}


@pytest.mark.parametrize("name", sorted(TAMPERED))
def test_tampered_certificates_fail(name):
    text = HONEST[name].to_text()
    bad = TAMPERED[name](text)
    assert bad != text
    ok, _ = certify.check_text(bad)
    assert not ok


def test_schreier_certificate_with_wrong_action_fails():
    cert = HONEST["schreier"]
    a = action_from_4regular(random_large_girth_4regular(40, 4, seed=2))
    bad = Certificate(cert.kind, cert.verdict, cert.fields, dict(cert.blocks, action=format_action(a)))
    assert not certify.check_certificate(bad)[0]


def test_unknown_kind_fails():
    assert not certify.check_certificate(Certificate("nope", "Yes"))[0]
