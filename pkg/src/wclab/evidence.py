"""Build certificate objects from solver results (checked later by :mod:`wclab.certify`)."""

from __future__ import annotations

import math

from .actions import FiniteAction
from .groups import format_elem, format_window
from .textio import Certificate, format_action, format_pattern_set, format_sft


def hom_cert(a: FiniteAction, x, result, hits=()) -> Certificate:
    fields = {}
    if hits:
        fields["hit"] = [" ".join(x.alphabet[v] for v in h) for h in hits]
    if result.labelling is not None:
        fields["map"] = " ".join(x.alphabet[c] for c in result.labelling.colors)
    fields["nodes"] = str(result.nodes)
    return Certificate("hom", str(result.verdict), fields,
                       {"action": format_action(a), "sft": format_sft(x)})


def realize_cert(a: FiniteAction, target, f) -> Certificate:
    fields = {} if f is None else {"map": " ".join(map(str, f.colors))}
    return Certificate("realize", "Yes" if f is not None else "No", fields,
                       {"action": format_action(a), "patterns": format_pattern_set(target)})


def _patterns_text(patterns) -> str:
    return ";".join(" ".join(map(str, p)) for p in patterns)


def compare_cert(a, b, w, k, verdict) -> Certificate:
    fields = {"window": format_window(w), "colors": str(k), "report": verdict.report}
    if verdict.witnesses:
        fields["witness"] = [
            f"{_patterns_text(ps.patterns)} | {' '.join(map(str, f.colors))}"
            for ps, f in sorted(verdict.witnesses.items(), key=lambda kv: kv[0].patterns)
        ]
    if verdict.counterexample is not None:
        fields["counterexample"] = _patterns_text(verdict.counterexample.patterns)
    return Certificate("compare", str(verdict.verdict), fields,
                       {"a": format_action(a), "b": format_action(b)})


def nonempty_z_cert(x, ok: bool, word) -> Certificate:
    fields = {"word": " ".join(x.alphabet[v] for v in word)} if ok else {}
    return Certificate("nonempty-z", "Yes" if ok else "No", fields, {"sft": format_sft(x)})


def nonempty_z2_cert(x, result) -> Certificate:
    fields = {"report": result.report}
    if result.torus is not None:
        fields["torus"] = f"{result.torus[0]} {result.torus[1]}"
        fields["map"] = " ".join(x.alphabet[c] for c in result.labelling.colors)
    if result.radius is not None:
        fields["radius"] = str(result.radius)
    return Certificate("nonempty-z2", str(result.verdict), fields, {"sft": format_sft(x)})


def mixing_cert(x, mixing: bool) -> Certificate:
    return Certificate("mixing-z", "Yes" if mixing else "No", {}, {"sft": format_sft(x)})


def chi_cert(a: FiniteAction, g, value, witness) -> Certificate:
    fields = {"element": format_elem(g)}
    if math.isinf(value):
        fields["value"] = "inf"
        perm = a.perm_of(g)
        fields["fixed"] = str(next(x for x in range(a.n) if perm[x] == x))
    else:
        fields["value"] = str(value)
        fields["map"] = " ".join(map(str, witness))
    return Certificate("chi", "Yes", fields, {"action": format_action(a)})


def coloring_cert(g, colors, palette: int, rounds: int | None = None) -> Certificate:
    fields = {"map": " ".join(map(str, colors)), "palette": str(palette)}
    if rounds is not None:
        fields["rounds"] = str(rounds)
    return Certificate("coloring", "Yes", fields, {"graph": g.to_text()})


def schreier_cert(g, a: FiniteAction, girth: int) -> Certificate:
    return Certificate("schreier", "Yes", {"girth": str(girth)},
                       {"graph": g.to_text(), "action": format_action(a)})


def adjunction_cert(a, b, coinduced, step: int, left: int, right: int) -> Certificate:
    return Certificate("adjunction", "Yes" if left == right else "No",
                       {"step": str(step), "counts": [f"{left} {right}"]},
                       {"a": format_action(a), "b": format_action(b),
                        "coinduced": format_action(coinduced)})
