"""Compiled kernels vs. the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]

Each side runs in its own interpreter: one with numba, one with
WCLAB_DISABLE_JIT=1 (every kernel, including helpers, runs as plain Python).
Compiled timings exclude compilation (one warm-up call per case).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def cases(quick):
    from wclab.actions import make_cycle, make_torus
    from wclab.sft import period_sft, tiling_sft_z2

    out = [
        ("hom c_24 -> period 7", make_cycle(24), period_sft(7), True),
        ("hom c_{4,4} -> T_4", make_torus(4, 4), tiling_sft_z2(4), True),
        ("hom c_{3,3} -> T_5, no area rule", make_torus(3, 3), tiling_sft_z2(5), False),
    ]
    if not quick:
        out.append(("hom c_{3,4} -> T_5, no area rule", make_torus(3, 4), tiling_sft_z2(5), False))
    return out


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def worker(repeat, quick):
    from wclab import _accel, kernels
    from wclab.sft import hom_exists

    res = {"jit": _accel.USE_JIT, "times": {}}
    for name, a, x, area in cases(quick):
        r = hom_exists(a, x, area=area)
        res["times"][name] = (best_of(lambda: hom_exists(a, x, area=area), repeat), r.nodes)
    rng = np.random.default_rng(0)
    img = rng.integers(0, 12, size=(3, 12))
    labels = rng.integers(0, 3, size=(5000, 12))
    kernels.pattern_codes(img, labels, 3)
    res["times"]["pattern codes 5000 x 12"] = (
        best_of(lambda: kernels.pattern_codes(img, labels, 3), repeat), 0)
    print(json.dumps(res))


def run_side(disable, repeat, quick):
    env = dict(os.environ)
    env.pop("WCLAB_DISABLE_JIT", None)
    if disable:
        env["WCLAB_DISABLE_JIT"] = "1"
    argv = [sys.executable, __file__, "--worker", "--repeat", str(repeat)] + (["--quick"] if quick else [])
    out = subprocess.run(argv, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.splitlines()[-1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the slowest case")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat, args.quick)
        return
    fast = run_side(False, args.repeat, args.quick)
    slow = run_side(True, 1, args.quick)
    if not fast["jit"]:
        print("numba unavailable: both columns are pure Python")
    print(f"{'case':36s} {'nodes':>8s} {'numba s':>9s} {'python s':>9s} {'speedup':>8s}")
    for name, (t_fast, nodes) in fast["times"].items():
        t_slow = slow["times"][name][0]
        print(f"{name:36s} {nodes:8d} {t_fast:9.4f} {t_slow:9.4f} {t_slow / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
