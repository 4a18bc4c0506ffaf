"""Command-line entry point: ``wclab <command> ...``.

Decision commands exit 0/1/2 for Yes/No/Unknown, 3 on errors, 4 when a
certificate fails independent re-verification, and 64 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import certify, evidence
from .actions import (ActionError, chi, is_free_up_to, is_transitive, make_cycle, make_torus,
                      action_from_4regular, random_large_girth_4regular, schreier, trivial_action)
from .csp import BudgetExceeded
from .experiments import EXPERIMENTS, ExperimentError, run_experiment
from .groups import format_spec, parse_spec, parse_window
from .local import cole_vishkin_color, greedy_extend_coloring
from .patterns import (enumerate_pattern_sets, patterns_of, realize_pattern_set,
                       weakly_contains_at)
from .sft import (hom_exists, is_mixing_z, nonempty_z, nonempty_z2_bounded, period_sft,
                  period_forcing_sft, proper_coloring_sft, tiling_sft_f2,
                  tiling_sft_z2)
from .textio import (FormatError, format_action, format_pattern_set, format_sft, parse_action,
                     parse_labelling, parse_pattern_set, parse_sft, write_text)
from .graphs import LocalGraph, parse_graph

EXIT_ERROR = 3
EXIT_UNVERIFIED = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


def _finish(cert, path: str, quiet: bool = False) -> int:
    """Write the certificate, re-verify Yes verdicts, return the exit code."""
    text = cert.to_text()
    write_text(path, text)
    if not quiet:
        print(f"verdict: {cert.verdict}")
        print(f"certificate: {path}")
    if cert.verdict == "Yes":
        ok, msg = certify.check_text(text)
        if not ok:
            print(f"certificate verification FAILED: {msg}", file=sys.stderr)
            return EXIT_UNVERIFIED
    return {"Yes": 0, "No": 1, "Unknown": 2}[cert.verdict]


# -- action ---------------------------------------------------------------------

def cmd_action_make(args) -> int:
    if args.cycle is not None:
        a = make_cycle(args.cycle)
    elif args.torus is not None:
        a = make_torus(*args.torus)
    elif args.trivial is not None:
        a = trivial_action(parse_spec(args.group), args.trivial)
    elif args.from_graph is not None:
        a = action_from_4regular(parse_graph(_read(args.from_graph)))
    elif args.girth is not None:
        g = random_large_girth_4regular(args.tree_size, args.girth, args.seed, args.max_retries)
        a = action_from_4regular(g)
    else:
        raise UsageError("action make: choose one of --cycle, --torus, --trivial, --from-graph, --girth")
    _emit(format_action(a), args.out)
    return 0


def cmd_action_info(args) -> int:
    a = parse_action(_read(args.action))
    print(f"group: {format_spec(a.spec)}")
    print(f"points: {a.n}")
    print(f"orbits: {len(a.orbits())}")
    print(f"transitive: {'yes' if is_transitive(a) else 'no'}")
    free = 0
    for r in range(1, args.radius + 1):
        if not is_free_up_to(a, r):
            break
        free = r
    print(f"free up to radius: {free} (checked to {args.radius})")
    for name, g in zip(a.spec.generator_names, a.spec.generators):
        c = chi(a, g)
        print(f"chi({name}): {'inf' if math.isinf(c) else c}")
    return 0


def cmd_action_schreier(args) -> int:
    g = schreier(parse_action(_read(args.action)))
    _emit(g.to_dot() if args.dot else g.to_text(), args.out)
    return 0


# -- patterns -------------------------------------------------------------------

def cmd_patterns_extract(args) -> int:
    f = parse_labelling(_read(args.labelling), os.path.dirname(args.labelling) or ".")
    w = parse_window(args.window, f.action.spec)
    _emit(format_pattern_set(patterns_of(f, w)), args.out)
    return 0


def cmd_patterns_enumerate(args) -> int:
    a = parse_action(_read(args.action))
    w = parse_window(args.window, a.spec)
    fam = enumerate_pattern_sets(a, w, args.colors, args.budget)
    print(f"pattern sets: {len(fam)}{' (partial)' if fam.partial else ''}")
    print(f"labellings examined: {fam.labellings_examined}")
    for ps in fam:
        print(" ; ".join(" ".join(map(str, p)) for p in ps.patterns))
    return 2 if fam.partial else 0


def cmd_patterns_realize(args) -> int:
    a = parse_action(_read(args.action))
    target = parse_pattern_set(_read(args.patterns), a.spec)
    try:
        f = realize_pattern_set(a, target, budget=args.node_budget)
    except BudgetExceeded as e:
        print(f"verdict: Unknown ({e})")
        return 2
    if f is not None:
        print("map " + " ".join(map(str, f.colors)))
    return _finish(evidence.realize_cert(a, target, f), args.cert)


def cmd_compare(args) -> int:
    a = parse_action(_read(args.a))
    b = parse_action(_read(args.b))
    w = parse_window(args.window, a.spec)
    v = weakly_contains_at(a, b, w, args.colors, args.budget, args.node_budget)
    print(v.report)
    if v.counterexample is not None:
        print("counterexample:")
        sys.stdout.write(format_pattern_set(v.counterexample))
    return _finish(evidence.compare_cert(a, b, w, args.colors, v), args.cert)


# -- hom / sft ------------------------------------------------------------------

def cmd_hom(args) -> int:
    a = parse_action(_read(args.action))
    x = parse_sft(_read(args.sft))
    index = {s: i for i, s in enumerate(x.alphabet)}
    hits = []
    for h in args.hit or []:
        try:
            hits.append(tuple(index[s] for s in h.split()))
        except KeyError as e:
            raise FormatError(f"hit symbol {e.args[0]!r} not in alphabet") from None
    res = hom_exists(a, x, hits=hits, budget=args.node_budget, order=args.order)
    if res.labelling is not None:
        print("map " + " ".join(x.alphabet[c] for c in res.labelling.colors))
    print(f"nodes: {res.nodes}")
    return _finish(evidence.hom_cert(a, x, res, hits), args.cert)


def cmd_sft_nonempty(args) -> int:
    x = parse_sft(_read(args.sft))
    d = x.group.params[0] if x.group.family == "free_abelian" else None
    if d == 1:
        ok, word = nonempty_z(x)
        if ok:
            print("period word: " + " ".join(x.alphabet[v] for v in word))
        return _finish(evidence.nonempty_z_cert(x, ok, word), args.cert)
    if d == 2:
        res = nonempty_z2_bounded(x, args.n_max, budget=args.node_budget)
        print(res.report)
        return _finish(evidence.nonempty_z2_cert(x, res), args.cert)
    raise UsageError("sft nonempty supports SFTs over Z and Z^2")


def cmd_sft_mixing(args) -> int:
    x = parse_sft(_read(args.sft))
    m = is_mixing_z(x)
    return _finish(evidence.mixing_cert(x, m), args.cert)


def cmd_sft_make(args) -> int:
    if args.kind == "coloring":
        spec = parse_spec(args.group)
        x = proper_coloring_sft(parse_window(args.window, spec))
    elif args.kind == "tiling":
        x = tiling_sft_f2(args.size) if args.group == "F2" else tiling_sft_z2(args.size)
    elif args.kind == "period":
        x = period_sft(args.size)
    else:
        x = period_forcing_sft(args.size)
    _emit(format_sft(x), args.out)
    return 0


# -- coloring -------------------------------------------------------------------

def cmd_color_cv(args) -> int:
    g = parse_graph(_read(args.graph))
    colors, trace = cole_vishkin_color(g)
    sys.stdout.write(trace.to_text())
    return _finish(evidence.coloring_cert(g, colors, g.max_degree() + 1, trace.rounds),
                   args.cert, quiet=args.quiet)


def cmd_color_greedy(args) -> int:
    a = parse_action(_read(args.action))
    w = parse_window(args.window, a.spec)
    partial = None
    if args.partial:
        partial = [None if t in ("-", "-1") else int(t) for t in args.partial.split()]
    f = greedy_extend_coloring(a, w, partial)
    print("coloring: " + " ".join(map(str, f.colors)))
    edges = [(x, y, "") for x, row in enumerate(a.window_images(w).T) for y in row if y != x]
    return _finish(evidence.coloring_cert(LocalGraph.build(a.n, edges), f.colors, f.k), args.cert,
                   quiet=args.quiet)


# -- experiments / verify -------------------------------------------------------

def _param(text: str):
    key, _, value = text.partition("=")
    if not value:
        raise UsageError(f"--param expects key=value, got {text!r}")
    if "," in value:
        return key, tuple(int(v) for v in value.split(",") if v)
    return key, int(value)


def cmd_experiment(args) -> int:
    params = dict(_param(p) for p in args.param or [])
    report = run_experiment(args.name, args.out, **params)
    path = os.path.join(args.out, f"{args.name}.report")
    print(f"report: {path}")
    print(f"cells: {len(report.cells)}; oracle agreement: {'all' if report.all_match else 'NO'}")
    bad = [c for c in report.cells if not c.oracle_ok]
    if any(c.verdict != "Unknown" for c in bad):
        print("cells disagreeing with the oracle:\n  " + "\n  ".join(c.line() for c in bad),
              file=sys.stderr)
        return EXIT_ERROR
    return 2 if bad else 0


def cmd_verify(args) -> int:
    ok, msg = certify.check_file(args.certificate)
    print(("ok: " if ok else "FAILED: ") + msg)
    return 0 if ok else EXIT_UNVERIFIED


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wclab", description="Local patterns, SFT homomorphisms and LOCAL coloring.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    act = sub.add_parser("action", help="build and inspect finite actions")
    asub = act.add_subparsers(dest="sub", parser_class=_Parser)
    mk = asub.add_parser("make", help="write an action file")
    mk.add_argument("--cycle", type=int, metavar="N")
    mk.add_argument("--torus", type=int, nargs=2, metavar=("M", "N"))
    mk.add_argument("--trivial", type=int, metavar="N")
    mk.add_argument("--group", default="Z", help="group for --trivial")
    mk.add_argument("--from-graph", metavar="FILE", help="4-regular graph -> F2 action")
    mk.add_argument("--girth", type=int, help="random 4-regular graph of this girth -> F2 action")
    mk.add_argument("--tree-size", type=int, default=200)
    mk.add_argument("--seed", type=int, default=0)
    mk.add_argument("--max-retries", type=int, default=100)
    mk.add_argument("--out")
    mk.set_defaults(fn=cmd_action_make)
    info = asub.add_parser("info", help="orbits, freeness, chi of generators")
    info.add_argument("action")
    info.add_argument("--radius", type=int, default=3)
    info.set_defaults(fn=cmd_action_info)
    sch = asub.add_parser("schreier", help="Schreier graph as edge list or DOT")
    sch.add_argument("action")
    sch.add_argument("--dot", action="store_true")
    sch.add_argument("--out")
    sch.set_defaults(fn=cmd_action_schreier)

    pat = sub.add_parser("patterns", help="local pattern sets")
    psub = pat.add_subparsers(dest="sub", parser_class=_Parser)
    ex = psub.add_parser("extract")
    ex.add_argument("--labelling", required=True)
    ex.add_argument("--window", required=True)
    ex.add_argument("--out")
    ex.set_defaults(fn=cmd_patterns_extract)
    en = psub.add_parser("enumerate")
    en.add_argument("--action", required=True)
    en.add_argument("--window", required=True)
    en.add_argument("--colors", type=int, required=True)
    en.add_argument("--budget", type=int, default=1_000_000)
    en.set_defaults(fn=cmd_patterns_enumerate)
    re_ = psub.add_parser("realize")
    re_.add_argument("--action", required=True)
    re_.add_argument("--patterns", required=True)
    re_.add_argument("--node-budget", type=int)
    re_.add_argument("--cert", default="realize.cert")
    re_.set_defaults(fn=cmd_patterns_realize)

    cmp_ = sub.add_parser("compare", help="window-level weak containment: does a realize b's pattern sets?")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--window", required=True)
    cmp_.add_argument("--colors", type=int, required=True)
    cmp_.add_argument("--budget", type=int, default=1_000_000)
    cmp_.add_argument("--node-budget", type=int)
    cmp_.add_argument("--cert", default="compare.cert")
    cmp_.set_defaults(fn=cmd_compare)

    hom = sub.add_parser("hom", help="search for a labelling of an action into an SFT")
    hom.add_argument("--action", required=True)
    hom.add_argument("--sft", required=True)
    hom.add_argument("--hit", action="append", help="required pattern, symbols in window order")
    hom.add_argument("--order", choices=("mrv", "lex"), default="mrv")
    hom.add_argument("--node-budget", type=int)
    hom.add_argument("--cert", default="hom.cert")
    hom.set_defaults(fn=cmd_hom)

    sft = sub.add_parser("sft", help="SFT decisions and constructions")
    ssub = sft.add_subparsers(dest="sub", parser_class=_Parser)
    ne = ssub.add_parser("nonempty")
    ne.add_argument("--sft", required=True)
    ne.add_argument("--n-max", type=int, default=4, help="torus/radius bound for Z^2")
    ne.add_argument("--node-budget", type=int)
    ne.add_argument("--cert", default="nonempty.cert")
    ne.set_defaults(fn=cmd_sft_nonempty)
    mx = ssub.add_parser("mixing")
    mx.add_argument("--sft", required=True)
    mx.add_argument("--cert", default="mixing.cert")
    mx.set_defaults(fn=cmd_sft_mixing)
    mc = ssub.add_parser("make-coloring")
    mc.add_argument("--group", default="Z")
    mc.add_argument("--window", required=True, help="symmetric window, e.g. 1,-1")
    mc.add_argument("--out")
    mc.set_defaults(fn=cmd_sft_make, kind="coloring")
    for kind, helptext in (("tiling", "p-cell tilings of Z^2 or F2"), ("period", "Z/p counter over Z"),
                           ("forcing", "Z^2 counter forcing period q")):
        m = ssub.add_parser(f"make-{kind}", help=helptext)
        m.add_argument("size", type=int)
        m.add_argument("--out")
        if kind == "tiling":
            m.add_argument("--group", choices=("Z^2", "F2"), default="Z^2",
                           help="F2 allows pieces of at most 3 cells")
        m.set_defaults(fn=cmd_sft_make, kind=kind)

    col = sub.add_parser("color", help="LOCAL coloring")
    csub = col.add_subparsers(dest="sub", parser_class=_Parser)
    cv = csub.add_parser("cv", help="Cole-Vishkin coloring of a graph file")
    cv.add_argument("--graph", required=True)
    cv.add_argument("--cert", default="coloring.cert")
    cv.add_argument("--quiet", action="store_true")
    cv.set_defaults(fn=cmd_color_cv)
    gr = csub.add_parser("greedy", help="greedy extension on Sch(a, W)")
    gr.add_argument("--action", required=True)
    gr.add_argument("--window", required=True)
    gr.add_argument("--partial", help="space-separated colors, '-' for uncolored")
    gr.add_argument("--cert", default="coloring.cert")
    gr.add_argument("--quiet", action="store_true")
    gr.set_defaults(fn=cmd_color_greedy)

    exp = sub.add_parser("experiment", help="run a scripted experiment grid")
    exp.add_argument("name", choices=sorted(EXPERIMENTS))
    exp.add_argument("--out", default="wclab-out")
    exp.add_argument("--param", action="append", help="key=value (comma list for tuples)")
    exp.set_defaults(fn=cmd_experiment)

    ver = sub.add_parser("verify", help="re-check a certificate file")
    ver.add_argument("certificate")
    ver.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "fn"):
            parser.print_usage(sys.stderr)
            raise UsageError("missing command")
        return args.fn(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ActionError, FormatError, ExperimentError, BudgetExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
