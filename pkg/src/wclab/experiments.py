"""Scripted experiment grids with on-disk certificates and a plain-text report.

Report format::

    wclab-report v1
    # generated <timestamp>
    experiment <name>
    <param=value ...> <verdict> <certificate path> <millis>

Only the timestamp line and the millis column vary between identical runs.
"""

from __future__ import annotations

import datetime
import itertools
import math
import os
import time
from dataclasses import dataclass, field

from . import certify, evidence
from .actions import (FiniteAction, GirthFailure, Inclusion, action_from_4regular, chi, chi_witness,
                      coinduce, count_homs, is_free_up_to, make_cycle, make_torus,
                      random_large_girth_4regular, restrict, schreier)
from .groups import FreeAbelian
from .sft import hom_exists, period_sft, tiling_sft_z2
from .textio import Certificate

REPORT_HEADER = "wclab-report v1"

# caps keep every grid well inside a minute on a laptop
CAPS = {
    "antichain-z": {"m_max": 64, "primes": (2, 3, 5, 7, 11, 13)},
    "torus-tiling": {"n_max": 8, "pieces": (1, 2, 3, 4, 5, 6)},
    "chi-table": {"n_max": 64},
    "girth-schreier": {"girth_max": 6, "seeds": 10},
    "coinduce-adjunction": {"max_points": 3, "step": 3},
}


class ExperimentError(RuntimeError):
    """A certificate failed re-verification or a parameter is out of range."""


@dataclass
class Cell:
    params: dict
    verdict: str
    cert_path: str
    millis: int
    oracle_ok: bool

    def line(self) -> str:
        ps = " ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{ps} {self.verdict} {self.cert_path} {self.millis}"


@dataclass
class ExperimentReport:
    name: str
    grid: dict
    cells: list = field(default_factory=list)

    @property
    def all_match(self) -> bool:
        return all(c.oracle_ok for c in self.cells)

    @property
    def any_unknown(self) -> bool:
        return any(c.verdict == "Unknown" for c in self.cells)

    def to_text(self, timestamp: str | None = None) -> str:
        ts = timestamp or datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        out = [REPORT_HEADER, f"# generated {ts}", f"experiment {self.name}"]
        out += [c.line() for c in self.cells]
        return "\n".join(out) + "\n"


def parse_report(text: str) -> ExperimentReport:
    lines = text.splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError("not an experiment report")
    name = None
    cells = []
    for line in lines[1:]:
        if not line or line.startswith("#"):
            continue
        if line.startswith("experiment "):
            name = line.split(" ", 1)[1]
            continue
        parts = line.split()
        params = dict(p.split("=", 1) for p in parts[:-3])
        cells.append(Cell(params, parts[-3], parts[-2], int(parts[-1]), True))
    return ExperimentReport(name, {}, cells)


def stable_lines(text: str) -> list[str]:
    """Report lines with the timestamp line and millis column removed."""
    out = []
    for line in text.splitlines():
        if line.startswith("# generated"):
            continue
        parts = line.split()
        if line.startswith(REPORT_HEADER) or line.startswith("experiment ") or len(parts) < 4:
            out.append(line)
        else:
            out.append(" ".join(parts[:-1]))
    return out


class _Runner:
    def __init__(self, name: str, out_dir: str, grid: dict):
        self.report = ExperimentReport(name, grid)
        self.out_dir = out_dir
        self.name = name

    def add(self, params: dict, cert, oracle_ok: bool, started: float, verdict: str | None = None):
        millis = int((time.perf_counter() - started) * 1000)
        stem = "_".join(f"{k}{v}" for k, v in params.items())
        rel = os.path.join(self.name, f"{stem}.cert")
        path = os.path.join(self.out_dir, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        text = cert.to_text()
        with open(path, "w") as fh:
            fh.write(text)
        if cert.verdict == "Yes":
            ok, msg = certify.check_text(text)
            if not ok:
                raise ExperimentError(f"certificate {rel} failed verification: {msg}")
        self.report.cells.append(Cell(params, verdict or cert.verdict, rel, millis, oracle_ok))


def _cap(name: str, key: str, value):
    cap = CAPS[name][key]
    if isinstance(cap, tuple):
        bad = [v for v in value if v not in cap]
        if bad:
            raise ExperimentError(f"{name}: {key} values {bad} outside {cap}")
    elif value > cap:
        raise ExperimentError(f"{name}: {key}={value} exceeds cap {cap}")
    return value


def antichain_z(out_dir: str, m_max: int = 24, primes=(2, 3, 5, 7), budget=None) -> ExperimentReport:
    """Cycles c_m mapping to the period-p shift: Yes exactly when p | m."""
    _cap("antichain-z", "m_max", m_max)
    _cap("antichain-z", "primes", tuple(primes))
    run = _Runner("antichain-z", out_dir, {"m": (1, m_max), "p": tuple(primes)})
    for p in primes:
        x = period_sft(p)
        for m in range(1, m_max + 1):
            t = time.perf_counter()
            a = make_cycle(m)
            res = hom_exists(a, x, budget=budget)
            ok = res.verdict.name == ("YES" if m % p == 0 else "NO")
            run.add({"m": m, "p": p}, evidence.hom_cert(a, x, res), ok, t)
    return run.report


def torus_tiling(out_dir: str, n_max: int = 6, pieces=(2, 3, 5), budget=None) -> ExperimentReport:
    """Tori c_{n,m} tiled by p-cell pieces: Yes exactly when p | nm."""
    _cap("torus-tiling", "n_max", n_max)
    _cap("torus-tiling", "pieces", tuple(pieces))
    run = _Runner("torus-tiling", out_dir, {"n": (1, n_max), "m": (1, n_max), "p": tuple(pieces)})
    for p in pieces:
        x = tiling_sft_z2(p)
        for n in range(1, n_max + 1):
            for m in range(1, n_max + 1):
                t = time.perf_counter()
                a = make_torus(n, m)
                res = hom_exists(a, x, budget=budget)
                ok = res.verdict.name == ("YES" if (n * m) % p == 0 else "NO")
                run.add({"n": n, "m": m, "p": p}, evidence.hom_cert(a, x, res), ok, t)
    return run.report


def chi_oracle(n: int):
    return math.inf if n == 1 else (2 if n % 2 == 0 else 3)


def chi_table(out_dir: str, n_max: int = 12) -> ExperimentReport:
    """chi of the generator on c_n."""
    _cap("chi-table", "n_max", n_max)
    run = _Runner("chi-table", out_dir, {"n": (1, n_max)})
    Z = FreeAbelian(1)
    g = Z.elem((1,))
    for n in range(1, n_max + 1):
        t = time.perf_counter()
        a = make_cycle(n)
        value = chi(a, g)
        cert = evidence.chi_cert(a, g, value, chi_witness(a, g))
        shown = "inf" if math.isinf(value) else str(value)
        run.add({"n": n}, cert, value == chi_oracle(n), t, verdict=shown)
    return run.report


def girth_schreier(out_dir: str, girth_max: int = 6, seeds: int = 3, tree_size: int = 200,
                   max_retries: int = 100) -> ExperimentReport:
    """Random 4-regular graphs of large girth realized as Schreier graphs of F_2."""
    _cap("girth-schreier", "girth_max", girth_max)
    _cap("girth-schreier", "seeds", seeds)
    run = _Runner("girth-schreier", out_dir, {"girth": (1, girth_max), "seed": (0, seeds - 1)})
    for girth in range(1, girth_max + 1):
        for seed in range(seeds):
            t = time.perf_counter()
            try:
                g = random_large_girth_4regular(tree_size, girth, seed, max_retries)
            except GirthFailure:
                cert = Certificate("schreier", "Unknown", {"girth": str(girth)}, {})
                run.add({"girth": girth, "seed": seed}, cert, False, t)
                continue
            a = action_from_4regular(g)
            same = schreier(a).edge_multiset() == g.edge_multiset()
            free = girth < 3 or is_free_up_to(a, girth - 1)
            ok = same and free and certify.nx_girth(g) >= girth
            cert = evidence.schreier_cert(g, a, girth)
            if not ok:
                cert.verdict = "No"
            run.add({"girth": girth, "seed": seed}, cert, ok, t)
    return run.report


def all_z_actions(max_points: int):
    """Every Z-action on 1..max_points points (one per generator permutation)."""
    for n in range(1, max_points + 1):
        for perm in itertools.permutations(range(n)):
            yield FiniteAction(FreeAbelian(1), [list(perm)])


def coinduce_adjunction(out_dir: str, max_points: int = 3, step: int = 2) -> ExperimentReport:
    """|hom(b restricted to step*Z, a)| = |hom(b, coind a)| for all small a, b."""
    _cap("coinduce-adjunction", "max_points", max_points)
    _cap("coinduce-adjunction", "step", step)
    run = _Runner("coinduce-adjunction", out_dir, {"points": (1, max_points), "step": step})
    inc = Inclusion.of((step,))
    actions = list(all_z_actions(max_points))
    for i, a in enumerate(actions):
        co = coinduce(a, inc)
        for j, b in enumerate(actions):
            t = time.perf_counter()
            left = count_homs(restrict(b, inc), a)
            right = count_homs(b, co)
            cert = evidence.adjunction_cert(a, b, co, step, left, right)
            run.add({"a": i, "b": j}, cert, left == right, t)
    return run.report


EXPERIMENTS = {
    "antichain-z": antichain_z,
    "torus-tiling": torus_tiling,
    "chi-table": chi_table,
    "girth-schreier": girth_schreier,
    "coinduce-adjunction": coinduce_adjunction,
}


def run_experiment(name: str, out_dir: str, timestamp: str | None = None, **params) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise ExperimentError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    os.makedirs(out_dir, exist_ok=True)
    report = EXPERIMENTS[name](out_dir, **params)
    with open(os.path.join(out_dir, f"{name}.report"), "w") as fh:
        fh.write(report.to_text(timestamp))
    return report
