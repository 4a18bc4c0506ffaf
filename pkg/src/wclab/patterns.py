"""Local patterns of labellings and the window-level weak containment check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _accel, kernels
from .actions import FiniteAction
from .csp import BudgetExceeded, Verdict
from .groups import GroupElem, GroupMismatchError, Window


@dataclass(frozen=True)
class Labelling:
    """A map ``points -> range(k)``."""

    action: FiniteAction
    k: int
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.action.n:
            raise ValueError(f"labelling has {len(self.colors)} colors for {self.action.n} points")
        if any(not 0 <= c < self.k for c in self.colors):
            raise ValueError(f"colors must lie in range({self.k})")

    @classmethod
    def of(cls, action: FiniteAction, k: int, colors: Iterable[int]) -> "Labelling":
        return cls(action, int(k), tuple(int(c) for c in colors))

    def array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.int64)

    def __getitem__(self, x: int) -> int:
        return self.colors[x]

    def __len__(self) -> int:
        return len(self.colors)


@dataclass(frozen=True)
class Pattern:
    """A map ``window -> colors``, stored in window order."""

    window: Window
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.window):
            raise ValueError("pattern must assign a value to every window element")

    def __getitem__(self, g: GroupElem) -> int:
        return self.values[self.window.index(g)]

    def as_dict(self) -> dict[GroupElem, int]:
        return dict(zip(self.window.elements, self.values))


@dataclass(frozen=True)
class PatternSet:
    """A deduplicated, sorted set of patterns over one window."""

    window: Window
    k: int
    patterns: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, window: Window, k: int, patterns: Iterable[Sequence[int]]) -> "PatternSet":
        pats = sorted({tuple(int(v) for v in p) for p in patterns})
        for p in pats:
            if len(p) != len(window) or any(not 0 <= v < k for v in p):
                raise ValueError(f"pattern {p} does not fit window of size {len(window)} / k={k}")
        return cls(window, int(k), tuple(pats))

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return (Pattern(self.window, p) for p in self.patterns)

    def __contains__(self, p) -> bool:
        values = p.values if isinstance(p, Pattern) else tuple(p)
        return values in self.patterns

    def permute_colors(self, sigma: Sequence[int]) -> "PatternSet":
        return PatternSet.of(self.window, self.k, ([sigma[v] for v in p] for p in self.patterns))

    def canonical(self) -> "PatternSet":
        """Representative of the orbit under color permutations (least serialization)."""
        best = None
        for sigma in itertools.permutations(range(self.k)):
            cand = tuple(sorted(tuple(sigma[v] for v in p) for p in self.patterns))
            if best is None or cand < best:
                best = cand
        return PatternSet(self.window, self.k, best)


@dataclass(frozen=True)
class PatternSetFamily:
    """Result of :func:`enumerate_pattern_sets`; ``partial`` flags truncation."""

    sets: frozenset
    partial: bool
    labellings_examined: int

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(sorted(self.sets, key=_set_key))

    def __contains__(self, ps) -> bool:
        return ps in self.sets


def _set_key(ps: PatternSet):
    return (len(ps.patterns), ps.patterns)


def _codes(img: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    if _accel.USE_JIT:
        return kernels.pattern_codes(img, labels, k)
    return kernels.pattern_codes_numpy(img, labels, k)


def _decode(code: int, k: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        code, r = divmod(code, k)
        out.append(r)
    return tuple(out)


def patterns_of(f: Labelling, w: Window) -> PatternSet:
    """All patterns ``g -> f(g x)`` over ``g`` in ``w``, one per point ``x``."""
    img = f.action.window_images(w)
    cols = f.array()[img]
    return PatternSet.of(w, f.k, (tuple(c) for c in cols.T))


def _sets_from_labels(img: np.ndarray, labels: np.ndarray, k: int, window: Window) -> set:
    if not len(labels):
        return set()
    codes = _codes(img, labels.astype(np.int64), k)
    width = len(window)
    out = set()
    for row in np.unique(np.sort(codes, axis=1), axis=0):
        out.add(PatternSet(window, k, tuple(sorted({_decode(int(c), k, width) for c in row}))))
    return out


def _restricted_growth(n: int, k: int) -> np.ndarray:
    """Labellings where color ``c`` first appears after colors ``< c`` (one per color orbit)."""
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        new_rows, new_top = [], []
        for c in range(k):
            ok = c <= top + 1
            if not ok.any():
                continue
            sel = rows[ok]
            new_rows.append(np.hstack([sel, np.full((len(sel), 1), c, dtype=np.int8)]))
            new_top.append(np.maximum(top[ok], c))
        rows = np.vstack(new_rows)
        top = np.concatenate(new_top)
    return rows


def _mixed_radix(start: int, stop: int, n: int, k: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(idx), n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        idx, digits[:, i] = np.divmod(idx, k)
    return digits


def enumerate_pattern_sets(a: FiniteAction, w: Window, k: int, budget: int) -> PatternSetFamily:
    """All pattern sets ``patterns_of(f, w)`` over labellings ``f`` with ``k`` colors.

    Exact when ``k**n <= budget``: labellings are enumerated up to color
    permutation and the results closed under color permutation. Otherwise
    the first ``budget`` labellings (lexicographic) are examined and the
    family is flagged partial.
    """
    if k < 1:
        raise ValueError("need at least one color")
    img = a.window_images(w)
    total = k ** a.n
    found: set = set()
    if total <= budget:
        labels = _restricted_growth(a.n, k)
        for lo in range(0, len(labels), 1 << 15):
            found |= _sets_from_labels(img, labels[lo: lo + (1 << 15)], k, w)
        examined = len(labels)
        partial = False
    else:
        examined = max(0, int(budget))
        for lo in range(0, examined, 1 << 15):
            chunk = _mixed_radix(lo, min(examined, lo + (1 << 15)), a.n, k)
            found |= _sets_from_labels(img, chunk, k, w)
        partial = True
    closed = set()
    for ps in found:
        for sigma in itertools.permutations(range(k)):
            closed.add(ps.permute_colors(sigma))
    return PatternSetFamily(frozenset(closed), partial, examined)


def pattern_set_sft(target: PatternSet):
    """The SFT over ``range(k)`` whose allowed patterns are ``target``."""
    from .sft import SftSpec

    return SftSpec.explicit([str(i) for i in range(target.k)], target.window, target.patterns)


def realize_pattern_set(a: FiniteAction, target: PatternSet, budget: int | None = None):
    """A labelling of ``a`` whose pattern set is exactly ``target``, or None.

    Every point's pattern must lie in ``target`` and every pattern of
    ``target`` must occur. The search is exhaustive, so None is a proof; the
    witness returned is the lexicographically least one.
    Raises :class:`BudgetExceeded` if the node budget runs out.
    """
    from .sft import hom_exists

    if target.window.spec != a.spec:
        raise GroupMismatchError("pattern set window is over a different group")
    if not target.patterns:
        return None
    cert = hom_exists(a, pattern_set_sft(target), hits=target.patterns, budget=budget, order="lex")
    if cert.verdict is Verdict.UNKNOWN:
        raise BudgetExceeded(f"realization search exceeded {cert.nodes} nodes")
    if cert.verdict is Verdict.NO:
        return None
    f = Labelling.of(a, target.k, cert.labelling.colors)
    if patterns_of(f, target.window) != target:
        raise AssertionError("solver witness does not realize the target pattern set")
    return f


@dataclass
class ContainmentVerdict:
    verdict: Verdict
    witnesses: dict = field(default_factory=dict)
    counterexample: PatternSet | None = None
    report: str = ""


def weakly_contains_at(
    a: FiniteAction,
    b: FiniteAction,
    w: Window,
    k: int,
    budget: int,
    node_budget: int | None = None,
) -> ContainmentVerdict:
    """Check that every ``(w, k)`` pattern set of ``b`` is realized on ``a``.

    Realizability is invariant under color permutation, so one representative
    per orbit is solved; witnesses for the rest are recolored copies.
    """
    if a.spec != b.spec:
        raise GroupMismatchError("weak containment compares actions of one group")
    family = enumerate_pattern_sets(b, w, k, budget)
    reps: dict[PatternSet, list[PatternSet]] = {}
    for ps in family:
        reps.setdefault(ps.canonical(), []).append(ps)
    witnesses = {}
    unknown = 0
    for rep in sorted(reps, key=_set_key):
        try:
            f = realize_pattern_set(a, rep, budget=node_budget)
        except BudgetExceeded:
            unknown += 1
            continue
        if f is None:
            # rep is the least member of its orbit, hence the first failure overall
            return ContainmentVerdict(
                Verdict.NO,
                counterexample=rep,
                report=f"{len(family)} pattern sets of b; {rep.patterns} not realizable on a",
            )
        for ps in reps[rep]:
            witnesses[ps] = _recolor_witness(f, rep, ps)
    report = f"{len(family)} pattern sets of b, {len(reps)} up to color permutation"
    if family.partial or unknown:
        detail = []
        if family.partial:
            detail.append(f"enumeration partial after {family.labellings_examined} labellings")
        if unknown:
            detail.append(f"{unknown} realizations over node budget")
        return ContainmentVerdict(Verdict.UNKNOWN, witnesses, None, report + "; " + "; ".join(detail))
    return ContainmentVerdict(Verdict.YES, witnesses, None, report)


def _recolor_witness(f: Labelling, rep: PatternSet, target: PatternSet) -> Labelling:
    if rep == target:
        return f
    for sigma in itertools.permutations(range(rep.k)):
        if rep.permute_colors(sigma) == target:
            return Labelling.of(f.action, f.k, (sigma[c] for c in f.colors))
    raise AssertionError("target is not a recoloring of its representative")


@dataclass(frozen=True)
class LocalRule:
    """A sliding block code: output color at ``x`` = ``table[pattern at x]``."""

    window: Window
    table: tuple[tuple[tuple[int, ...], int], ...]
    k_out: int

    @classmethod
    def of(cls, window: Window, table: dict, k_out: int | None = None) -> "LocalRule":
        items = tuple(sorted((tuple(p), int(c)) for p, c in table.items()))
        if k_out is None:
            k_out = max((c for _, c in items), default=0) + 1
        return cls(window, items, int(k_out))

    @classmethod
    def from_function(cls, window: Window, k_in: int, fn: Callable, k_out: int) -> "LocalRule":
        table = {p: fn(p) for p in itertools.product(range(k_in), repeat=len(window))}
        return cls.of(window, table, k_out)

    def lookup(self) -> dict:
        return dict(self.table)

    def __call__(self, values: Sequence[int]) -> int:
        return self.lookup()[tuple(values)]


def apply_local_rule(rule: LocalRule, f: Labelling) -> Labelling:
    """Labelling ``x -> rule(pattern of f at x)``."""
    table = rule.lookup()
    img = f.action.window_images(rule.window)
    cols = f.array()[img]
    out = []
    for x in range(f.action.n):
        p = tuple(int(v) for v in cols[:, x])
        try:
            out.append(table[p])
        except KeyError:
            raise ValueError(f"local rule has no entry for pattern {p} at point {x}") from None
    return Labelling.of(f.action, rule.k_out, out)
