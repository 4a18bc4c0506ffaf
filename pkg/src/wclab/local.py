"""LOCAL-model coloring: Cole-Vishkin on pseudoforests, greedy extension, a ball simulator."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .actions import FiniteAction
from .graphs import LocalGraph
from .groups import Window
from .patterns import Labelling

# When every vertex has out-degree <= 1 (cycles, paths), rounds are at most
# log*(max ID) + CV_ROUND_CONSTANT: 6 shift-down rounds, up to 2 bit-reduction
# steps beyond log*, and up to 2 class-reduction rounds.
CV_ROUND_CONSTANT = 10


def log_star(n: float) -> int:
    """Times ``log2`` must be applied before the value drops to at most 2."""
    count = 0
    x = float(n)
    while x > 2:
        x = math.log2(x)
        count += 1
    return count


@dataclass
class RoundTrace:
    rounds: int
    phases: list = field(default_factory=list)  # (phase name, rounds)
    state_bits: list = field(default_factory=list)  # max color bit length after each round
    coloring: tuple = ()

    def to_text(self) -> str:
        return f"rounds: {self.rounds}\ncoloring: {' '.join(map(str, self.coloring))}\n"


def _check_local_input(g: LocalGraph) -> None:
    g.validate()
    if g.has_loops():
        raise ValueError("graph has loops; no proper coloring exists")


def _forests(g: LocalGraph) -> np.ndarray:
    """``parent[i, v]``: head of the i-th stored out-edge of ``v``, or -1."""
    out: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, _ in g.edges:
        out[u].append(v)
    F = max((len(o) for o in out), default=0)
    parent = np.full((F, g.n), -1, dtype=np.int64)
    for v, heads in enumerate(out):
        for i, w in enumerate(heads):
            parent[i, v] = w
    return parent


def _low_bit(x: np.ndarray) -> np.ndarray:
    low = x & -x
    return np.log2(low.astype(np.float64)).astype(np.int64)


def _cv_step(c: np.ndarray, parent: np.ndarray) -> np.ndarray:
    has_p = parent >= 0
    pc = np.where(has_p, c[np.maximum(parent, 0)], c ^ 1)
    idx = _low_bit(c ^ pc)
    return 2 * idx + ((c >> idx) & 1)


def _shift_down(c: np.ndarray, parent: np.ndarray) -> np.ndarray:
    has_p = parent >= 0
    root_new = np.where(c == 0, 1, 0)
    return np.where(has_p, c[np.maximum(parent, 0)], root_new)


def _recolor_class(c: np.ndarray, parent: np.ndarray, target: int, palette: int) -> np.ndarray:
    """Vertices colored ``target`` move to the least palette color unused by forest neighbors."""
    n = len(c)
    new = c.copy()
    used = np.zeros((n, palette + 1), dtype=bool)
    has_p = parent >= 0
    kids = np.nonzero(has_p)[0]
    used[kids, np.minimum(c[parent[kids]], palette)] = True
    used[parent[kids], np.minimum(c[kids], palette)] = True
    movers = np.nonzero(c == target)[0]
    for v in movers:
        new[v] = int(np.argmin(used[v, :palette]))
    return new


def cole_vishkin_color(g: LocalGraph) -> tuple[list[int], RoundTrace]:
    """Proper (max degree + 1)-coloring in O(log* max ID) synchronous rounds.

    Edges are oriented as stored and split into pseudoforests by out-edge
    position. Each pseudoforest is 3-colored in parallel by Cole-Vishkin bit
    reduction and shift-down; the product coloring is then reduced one color
    class per round.
    """
    _check_local_input(g)
    trace = RoundTrace(0)
    if g.n == 0:
        return [], trace
    ids = np.asarray(g.ids, dtype=np.int64)
    parent = _forests(g)
    F = parent.shape[0]
    cols = np.tile(ids, (max(F, 1), 1))

    def tick(c):
        trace.rounds += 1
        trace.state_bits.append(int(c.max()).bit_length())

    # bit reduction: the schedule depends only on the ID bound, known to all
    bound = int(ids.max()) + 1
    steps = 0
    while bound > 6:
        bound = 2 * max(1, (bound - 1).bit_length())
        for i in range(F):
            cols[i] = _cv_step(cols[i], parent[i])
        steps += 1
        tick(cols)
    trace.phases.append(("bit-reduction", steps))

    # 6 -> 3 colors: shift down, then recolor the top class
    for target in (5, 4, 3):
        for i in range(F):
            cols[i] = _shift_down(cols[i], parent[i])
        tick(cols)
        for i in range(F):
            cols[i] = _recolor_class(cols[i], parent[i], target, 3)
        tick(cols)
    trace.phases.append(("shift-down", 6))

    # combine forests and reduce to max degree + 1
    weights = 3 ** np.arange(F, dtype=np.int64)
    color = (cols[:F] * weights[:, None]).sum(axis=0) if F else np.zeros(g.n, dtype=np.int64)
    palette = g.max_degree() + 1
    adj = g.adjacency
    steps = max(0, int(3 ** F) - palette)
    # one round per class above the palette; empty classes are idle rounds
    for target in sorted({int(c) for c in color if c >= palette}, reverse=True):
        movers = np.nonzero(color == target)[0]
        new = color.copy()
        for v in movers:
            taken = {int(color[w]) for w, _ in adj[v]}
            new[v] = next(c for c in range(palette) if c not in taken)
        color = new
    trace.rounds += steps
    trace.state_bits.append(int(color.max()).bit_length())
    trace.phases.append(("class-reduction", steps))
    out = [int(c) for c in color]
    trace.coloring = tuple(out)
    return out, trace


def is_proper(g: LocalGraph, coloring: Sequence[int]) -> bool:
    return all(coloring[u] != coloring[v] for u, v, _ in g.edges)


def greedy_extend_coloring(a: FiniteAction, w: Window, partial=None) -> Labelling:
    """Extend a proper partial coloring of Sch(a, W) to ``|W \\ {id}| + 1`` colors.

    Uncolored points are visited breadth-first from the least uncolored point
    and take the least color not used by any ``g^-1 x`` with ``g`` in ``W``.
    ``partial`` is a mapping point -> color or a sequence with ``None``/-1
    for uncolored points.
    """
    if w.spec != a.spec:
        raise ValueError("window and action use different groups")
    if not w.is_symmetric():
        raise ValueError("greedy extension needs a symmetric window")
    moves = [g for g in w if not g.is_identity()]
    k = len(moves) + 1
    nbrs = [a.perm_of(g.inv()) for g in moves]
    colors = [-1] * a.n
    if partial is not None:
        items = partial.items() if isinstance(partial, Mapping) else enumerate(partial)
        for x, c in items:
            if c is None or c < 0:
                continue
            if not 0 <= c < k:
                raise ValueError(f"color {c} at point {x} outside range({k})")
            colors[int(x)] = int(c)
    for x in range(a.n):
        if colors[x] < 0:
            if any(int(p[x]) == x for p in nbrs):
                raise ValueError(f"point {x} is adjacent to itself")
            continue
        for p in nbrs:
            y = int(p[x])
            if colors[y] == colors[x]:
                raise ValueError(f"partial coloring is improper at points {x} and {y}")
    for start in range(a.n):
        if colors[start] >= 0:
            continue
        queue = deque([start])
        seen = {start}
        while queue:
            x = queue.popleft()
            if colors[x] < 0:
                taken = {colors[int(p[x])] for p in nbrs}
                colors[x] = next(c for c in range(k) if c not in taken)
            for p in nbrs:
                y = int(p[x])
                if y not in seen and colors[y] < 0:
                    seen.add(y)
                    queue.append(y)
    return Labelling.of(a, k, colors)


@dataclass(frozen=True)
class Ball:
    """The radius-r view of a vertex, in terms of IDs only.

    ``dist`` pairs each visible ID with its distance from the center; ``edges``
    holds ``(id_u, id_v, label)`` for edges with an endpoint closer than r.
    """

    center: int
    radius: int
    dist: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int, str], ...]

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.dist]

    def neighbors(self, ident: int) -> list[int]:
        out = []
        for u, v, _ in self.edges:
            if u == ident:
                out.append(v)
            elif v == ident:
                out.append(u)
        return out


def ball_of(g: LocalGraph, v: int, r: int) -> Ball:
    dist = g.bfs_distances(v, limit=r)
    edges = sorted(
        (g.ids[a], g.ids[b], label)
        for a, b, label in g.edges
        if min(dist.get(a, r), dist.get(b, r)) < r
    )
    return Ball(
        g.ids[v], r, tuple(sorted((g.ids[x], d) for x, d in dist.items())), tuple(edges)
    )


def simulate_local(alg: Callable[[Ball], object], g: LocalGraph, r: int) -> list:
    """Output ``alg(ball)`` at every vertex, where ``ball`` is its ID-labelled radius-r view."""
    g.validate()
    if r < 0:
        raise ValueError("radius must be >= 0")
    return [alg(ball_of(g, v, r)) for v in range(g.n)]
