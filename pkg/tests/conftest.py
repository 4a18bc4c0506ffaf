import time
from contextlib import contextmanager

import numpy as np
import pytest

# criterion number -> (title, passed, seconds, limit, note)
RESULTS: dict = {}


class Criterion:
    def __init__(self, number, title, limit):
        self.number = number
        self.title = title
        self.limit = limit
        self.note = ""

    @contextmanager
    def timed(self):
        t = time.perf_counter()
        passed = False
        try:
            yield self
            passed = True
        finally:
            dt = time.perf_counter() - t
            within = self.limit is None or dt <= self.limit
            RESULTS[self.number] = (self.title, passed and within, dt, self.limit, self.note)
        if not within:
            pytest.fail(f"criterion {self.number} took {dt:.2f}s, limit {self.limit}s")


@pytest.fixture
def criterion():
    return Criterion


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the numba kernels once so timed sections measure solving only."""
    from wclab import actions, patterns, sft
    from wclab.groups import Window, Z

    a = actions.make_cycle(3)
    sft.hom_exists(a, sft.period_sft(3))
    sft.hom_exists(a, sft.period_sft(3), order="lex")
    sft.hom_exists(actions.make_torus(2, 2), sft.tiling_sft_z2(2))
    w = Window.of(Z, [0, 1])
    patterns.realize_pattern_set(a, patterns.patterns_of(patterns.Labelling.of(a, 2, [0, 1, 1]), w))
    patterns.enumerate_pattern_sets(a, w, 2, 100)
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, ok, dt, limit, note = RESULTS[number]
        lim = f" (limit {limit:g}s)" if limit is not None else ""
        extra = f" [{note}]" if note else ""
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {dt:7.2f}s{lim} {title}{extra}"
        )
