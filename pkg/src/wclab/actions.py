"""Finite group actions given by generator permutations."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import LocalGraph
from .groups import (
    CYCLIC,
    FREE_ABELIAN,
    PRODUCT,
    TORUS,
    Free,
    FreeAbelian,
    GroupElem,
    GroupMismatchError,
    GroupSpec,
    Window,
    ball,
)

INFINITE = math.inf


class ActionError(ValueError):
    pass


def _as_perm(p, n: int) -> np.ndarray:
    arr = np.asarray(p, dtype=np.int64).reshape(-1)
    if arr.shape != (n,) or not np.array_equal(np.sort(arr), np.arange(n)):
        raise ActionError(f"{list(arr)} is not a permutation of range({n})")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _perm_power(p: np.ndarray, k: int) -> np.ndarray:
    out = np.arange(len(p))
    if k < 0:
        p = np.argsort(p)
        k = -k
    base = p
    while k:
        if k & 1:
            out = base[out]
        base = base[base]
        k >>= 1
    return out


class FiniteAction:
    """An action of ``spec`` on the points ``0..n-1``.

    ``perms[i][x]`` is the image of ``x`` under the ``i``-th distinguished
    generator. Defining relations of the group family are checked here.
    """

    __slots__ = ("spec", "n", "perms", "_cache")

    def __init__(self, spec: GroupSpec, perms: Sequence, check: bool = True):
        n = len(perms[0]) if len(perms) else 0
        if len(perms) != len(spec.generators):
            raise ActionError(
                f"{spec} has {len(spec.generators)} generators, got {len(perms)} permutations"
            )
        if n == 0 and len(perms):
            raise ActionError("actions need at least one point")
        self.spec = spec
        self.n = n
        self.perms = tuple(_as_perm(p, n) for p in perms)
        self._cache: dict = {}
        if check:
            self._check_relations()

    def _check_relations(self) -> None:
        ident = np.arange(self.n)
        for a, b in _commuting_pairs(self.spec):
            pa, pb = self.perms[a], self.perms[b]
            if not np.array_equal(pa[pb], pb[pa]):
                raise ActionError(f"generators {a} and {b} must commute")
        for i, order in _generator_orders(self.spec):
            if not np.array_equal(_perm_power(self.perms[i], order), ident):
                raise ActionError(f"generator {i} must have order dividing {order}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteAction)
            and self.spec == other.spec
            and self.n == other.n
            and all(np.array_equal(p, q) for p, q in zip(self.perms, other.perms))
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.n, tuple(p.tobytes() for p in self.perms)))

    def __repr__(self) -> str:
        return f"FiniteAction({self.spec}, n={self.n})"

    def perm_of(self, g: GroupElem) -> np.ndarray:
        """Permutation of ``g``: ``perm_of(g)[x] == act(g, x)``."""
        if g.spec != self.spec:
            raise GroupMismatchError(f"{g} is not an element of {self.spec}")
        p = self._cache.get(g)
        if p is None:
            p = np.arange(self.n)
            for i, k in reversed(g.letters()):
                p = _perm_power(self.perms[i], k)[p]
            p.flags.writeable = False
            self._cache[g] = p
        return p

    def act(self, g: GroupElem, x: int) -> int:
        if not 0 <= x < self.n:
            raise ActionError(f"point {x} out of range({self.n})")
        return int(self.perm_of(g)[x])

    def window_images(self, w: Window) -> np.ndarray:
        """Array ``img[j, x] = w_j . x`` of shape ``(len(w), n)``."""
        if w.spec != self.spec:
            raise GroupMismatchError(f"window over {w.spec} used with action of {self.spec}")
        if not len(w):
            return np.zeros((0, self.n), dtype=np.int64)
        return np.stack([self.perm_of(g) for g in w.elements]).astype(np.int64)

    def orbits(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            orbit = [start]
            seen[start] = True
            i = 0
            while i < len(orbit):
                x = orbit[i]
                i += 1
                for p in self.perms:
                    for y in (int(p[x]), int(np.argmax(p == x))):
                        if not seen[y]:
                            seen[y] = True
                            orbit.append(y)
            out.append(sorted(orbit))
        return out

    def relabel(self, sigma: Sequence[int]) -> "FiniteAction":
        """Conjugate by the point bijection ``x -> sigma[x]``."""
        s = np.asarray(sigma, dtype=np.int64)
        inv = np.argsort(s)
        return FiniteAction(self.spec, [s[p[inv]] for p in self.perms], check=False)


def _commuting_pairs(spec: GroupSpec) -> list[tuple[int, int]]:
    fam = spec.family
    if fam in (FREE_ABELIAN, TORUS):
        k = len(spec.generators)
        return list(itertools.combinations(range(k), 2))
    if fam != PRODUCT:
        return []
    out = []
    offsets = []
    off = 0
    for f in spec.factors:
        offsets.append(off)
        out.extend((off + a, off + b) for a, b in _commuting_pairs(f))
        off += len(f.generators)
    sizes = [len(f.generators) for f in spec.factors]
    for i, j in itertools.combinations(range(len(spec.factors)), 2):
        for a in range(sizes[i]):
            for b in range(sizes[j]):
                out.append((offsets[i] + a, offsets[j] + b))
    return out


def _generator_orders(spec: GroupSpec) -> list[tuple[int, int]]:
    fam = spec.family
    if fam == CYCLIC:
        return [(0, spec.params[0])]
    if fam == TORUS:
        return [(0, spec.params[0]), (1, spec.params[1])]
    if fam != PRODUCT:
        return []
    out, off = [], 0
    for f in spec.factors:
        out.extend((off + i, o) for i, o in _generator_orders(f))
        off += len(f.generators)
    return out


# -- constructions ---------------------------------------------------------------

def make_cycle(n: int) -> FiniteAction:
    """``c_n``: Z acting on Z/n by translation."""
    if n < 1:
        raise ActionError("make_cycle needs n >= 1")
    return FiniteAction(FreeAbelian(1), [np.roll(np.arange(n), -1)])


def torus_point(m: int, n: int, x: int, y: int) -> int:
    return (x % m) * n + (y % n)


def make_torus(m: int, n: int) -> FiniteAction:
    """``c_{m,n}``: Z^2 acting on Z/m x Z/n; point ``(x, y)`` is ``x*n + y``."""
    if m < 1 or n < 1:
        raise ActionError("make_torus needs m, n >= 1")
    xs, ys = np.divmod(np.arange(m * n), n)
    e1 = ((xs + 1) % m) * n + ys
    e2 = xs * n + (ys + 1) % n
    return FiniteAction(FreeAbelian(2), [e1, e2])


def trivial_action(spec: GroupSpec, n: int) -> FiniteAction:
    return FiniteAction(spec, [np.arange(n)] * len(spec.generators))


def product(a: FiniteAction, b: FiniteAction) -> FiniteAction:
    """Diagonal action on ``a.n * b.n`` points; ``(x, y)`` is ``x*b.n + y``."""
    if a.spec != b.spec:
        raise GroupMismatchError("product of actions of different groups")
    xs, ys = np.divmod(np.arange(a.n * b.n), b.n)
    perms = [pa[xs] * b.n + pb[ys] for pa, pb in zip(a.perms, b.perms)]
    return FiniteAction(a.spec, perms, check=False)


def projections(a: FiniteAction, b: FiniteAction) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate maps from ``product(a, b)`` onto ``a`` and ``b``."""
    xs, ys = np.divmod(np.arange(a.n * b.n), b.n)
    return xs, ys


def schreier(a: FiniteAction) -> LocalGraph:
    """One labelled edge ``x -> s x`` per point and distinguished generator."""
    edges = [
        (x, int(p[x]), name)
        for name, p in zip(a.spec.generator_names, a.perms)
        for x in range(a.n)
    ]
    return LocalGraph.build(a.n, edges)


def is_transitive(a: FiniteAction) -> bool:
    return len(a.orbits()) == 1


def is_free_up_to(a: FiniteAction, radius: int) -> bool:
    """No non-identity element of the radius ball fixes a point."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    ident = np.arange(a.n)
    for g in ball(a.spec, radius):
        if not g.is_identity() and np.any(a.perm_of(g) == ident):
            return False
    return True


def cycles_of(perm: np.ndarray) -> list[list[int]]:
    seen = np.zeros(len(perm), dtype=bool)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = int(perm[x])
        out.append(cyc)
    return out


def chi(a: FiniteAction, g: GroupElem):
    """Least size of a cover by sets ``S`` with ``g S`` disjoint from ``S``.

    ``INFINITE`` when ``g`` fixes a point. Otherwise each cycle of ``g`` needs
    2 sets (even length) or 3 (odd length), and covers combine across cycles.
    """
    best = 2
    for cyc in cycles_of(a.perm_of(g)):
        if len(cyc) == 1:
            return INFINITE
        if len(cyc) % 2:
            best = 3
    return best


def chi_witness(a: FiniteAction, g: GroupElem) -> list[int] | None:
    """A labelling ``f`` with ``f(x) != f(g x)`` using ``chi(a, g)`` colors."""
    perm = a.perm_of(g)
    colors = [0] * a.n
    for cyc in cycles_of(perm):
        if len(cyc) == 1:
            return None
        for i, x in enumerate(cyc):
            colors[x] = i % 2
        if len(cyc) % 2:
            colors[cyc[-1]] = 2
    return colors


# -- coinduction ---------------------------------------------------------------

@dataclass(frozen=True)
class Inclusion:
    """The finite-index subgroup ``steps[0] Z x ... <= Z^d``.

    The subgroup is identified with ``Z^d`` via ``t -> (steps[i] * t[i])``;
    ``transversal`` lists coset representatives in the ambient group.
    """

    steps: tuple[int, ...]
    transversal: tuple[GroupElem, ...]

    @classmethod
    def of(cls, steps: Sequence[int], transversal=None) -> "Inclusion":
        steps = tuple(int(s) for s in steps)
        if len(steps) not in (1, 2) or any(s < 1 for s in steps):
            raise ActionError("supported inclusions: dZ <= Z and mZ x nZ <= Z^2")
        amb = FreeAbelian(len(steps))
        if transversal is None:
            transversal = [amb.elem(t) for t in itertools.product(*(range(s) for s in steps))]
        else:
            transversal = [t if isinstance(t, GroupElem) else amb.elem(t) for t in transversal]
        inc = cls(steps, tuple(transversal))
        inc._validate()
        return inc

    @property
    def ambient(self) -> GroupSpec:
        return FreeAbelian(len(self.steps))

    @property
    def subgroup(self) -> GroupSpec:
        return FreeAbelian(len(self.steps))

    @property
    def index(self) -> int:
        return math.prod(self.steps)

    def _validate(self) -> None:
        amb = self.ambient
        if any(r.spec != amb for r in self.transversal):
            raise ActionError("transversal must consist of ambient elements")
        residues = {self.residue(r) for r in self.transversal}
        if len(self.transversal) != self.index or len(residues) != self.index:
            raise ActionError("transversal must contain exactly one element per coset")
        if amb.identity not in self.transversal:
            raise ActionError("transversal must contain the identity")

    def residue(self, g: GroupElem) -> tuple[int, ...]:
        return tuple(c % s for c, s in zip(g.payload, self.steps))

    def split(self, g: GroupElem) -> tuple[int, tuple[int, ...]]:
        """Write ``g = r delta``: return (index of r, delta in subgroup coordinates)."""
        res = self.residue(g)
        for i, r in enumerate(self.transversal):
            if self.residue(r) == res:
                delta = tuple((c - rc) // s for c, rc, s in zip(g.payload, r.payload, self.steps))
                return i, delta
        raise AssertionError("unreachable: transversal covers all cosets")


def restrict(b: FiniteAction, inc: Inclusion) -> FiniteAction:
    """Restriction of a Z^d-action to the subgroup, in subgroup coordinates."""
    if b.spec != inc.ambient:
        raise GroupMismatchError(f"restriction needs an action of {inc.ambient}")
    perms = []
    for i, s in enumerate(inc.steps):
        step = tuple(s if j == i else 0 for j in range(len(inc.steps)))
        perms.append(b.perm_of(inc.ambient.elem(step)))
    return FiniteAction(inc.subgroup, perms, check=False)


def coinduce(a: FiniteAction, inc: Inclusion) -> FiniteAction:
    """Co-induced action on functions ``R -> points(a)``.

    A point is ``x`` with ``x(r)`` encoded in base ``a.n`` (digit ``i`` for the
    ``i``-th transversal element). For a generator ``g`` write
    ``g^{-1} r = r' delta``; then ``(g x)(r) = delta^{-1} . x(r')``.
    """
    if a.spec != inc.subgroup:
        raise GroupMismatchError(f"coinduction needs an action of {inc.subgroup}")
    R = inc.transversal
    size = a.n ** len(R)
    digits = np.array(
        [(np.arange(size) // a.n**i) % a.n for i in range(len(R))], dtype=np.int64
    )
    weights = a.n ** np.arange(len(R), dtype=np.int64)
    perms = []
    for gen in inc.ambient.generators:
        new_digits = np.empty_like(digits)
        for i, r in enumerate(R):
            j, delta = inc.split(gen.inv() * r)
            back = a.perm_of(inc.subgroup.elem(delta).inv())
            new_digits[i] = back[digits[j]]
        perms.append(weights @ new_digits)
    return FiniteAction(inc.ambient, perms)


def count_homs(src: FiniteAction, dst: FiniteAction) -> int:
    """Number of equivariant maps ``src -> dst`` by exhaustive enumeration."""
    if src.spec != dst.spec:
        raise GroupMismatchError("equivariant maps need a common group")
    count = 0
    for phi in itertools.product(range(dst.n), repeat=src.n):
        f = np.array(phi)
        if all(np.array_equal(f[ps], pd[f]) for ps, pd in zip(src.perms, dst.perms)):
            count += 1
    return count


# -- Schreier graphs of F_2 from 4-regular graphs -------------------------------

def _euler_circuit(g: LocalGraph, start: int) -> list[tuple[int, int]]:
    """Hierholzer on a connected even multigraph: list of (edge index, tail)."""
    used = [False] * len(g.edges)
    ptr = [0] * g.n
    stack: list[tuple[int, int, int]] = [(start, -1, -1)]
    out: list[tuple[int, int]] = []
    while stack:
        v, edge, tail = stack[-1]
        adj = g.adjacency[v]
        while ptr[v] < len(adj) and used[adj[ptr[v]][1]]:
            ptr[v] += 1
        if ptr[v] == len(adj):
            stack.pop()
            if edge >= 0:
                out.append((edge, tail))
        else:
            w, k = adj[ptr[v]]
            used[k] = True
            stack.append((w, k, v))
    out.reverse()
    return out


def action_from_4regular(g: LocalGraph) -> FiniteAction:
    """An F_2-action whose Schreier graph has the edge multiset of ``g``."""
    degs = g.degrees()
    if any(d != 4 for d in degs):
        raise ActionError("every vertex must have degree exactly 4")
    if not g.is_connected():
        raise ActionError("graph must be connected")
    start = min(range(g.n), key=lambda v: g.ids[v])
    circuit = _euler_circuit(g, start)
    arcs = []
    for k, tail in circuit:
        u, v, _ = g.edges[k]
        arcs.append((tail, v if tail == u else u))
    # Out-arcs form a 2-regular bipartite multigraph (tails | heads); colour its
    # even cycles alternately to split it into two permutations.
    out_arcs: list[list[int]] = [[] for _ in range(g.n)]
    in_arcs: list[list[int]] = [[] for _ in range(g.n)]
    for i, (t, h) in enumerate(arcs):
        out_arcs[t].append(i)
        in_arcs[h].append(i)
    color = [-1] * len(arcs)
    for first in range(len(arcs)):
        if color[first] >= 0:
            continue
        i, c, via_tail = first, 0, True
        while color[i] < 0:
            color[i] = c
            t, h = arcs[i]
            sibling = in_arcs[h] if via_tail else out_arcs[t]
            i = sibling[0] if sibling[1] == i else sibling[1]
            c ^= 1
            via_tail = not via_tail
    perms = [np.zeros(g.n, dtype=np.int64) for _ in range(2)]
    for i, (t, h) in enumerate(arcs):
        perms[color[i]][t] = h
    return FiniteAction(Free(2), perms)


class GirthFailure(RuntimeError):
    """No graph found within the retry budget (tree too small for the girth)."""


def random_large_girth_4regular(
    tree_size: int, girth: int, seed: int, max_retries: int = 100
) -> LocalGraph:
    """Random 4-regular graph of girth >= ``girth`` containing a random tree.

    Builds a random tree of max degree 4 on ``tree_size`` vertices, then adds
    edges between vertices at distance >= ``girth - 1`` until every degree is 4.
    Output girth is verified before returning.
    """
    if tree_size < 1:
        raise ValueError("tree_size must be >= 1")
    rng = random.Random(seed)
    for _ in range(max_retries):
        g = _try_girth_graph(tree_size, girth, rng)
        if g is not None and g.girth() >= girth and all(d == 4 for d in g.degrees()):
            return g
    raise GirthFailure(
        f"no 4-regular graph of girth >= {girth} on {tree_size} vertices after {max_retries} tries"
    )


def _try_girth_graph(n: int, girth: int, rng: random.Random) -> LocalGraph | None:
    adj: list[list[int]] = [[] for _ in range(n)]
    edges: list[tuple[int, int, str]] = []
    for v in range(1, n):
        choices = [u for u in range(v) if len(adj[u]) < 4]
        u = rng.choice(choices)
        adj[u].append(v)
        adj[v].append(u)
        edges.append((u, v, "tree"))
    need = [4 - len(a) for a in adj]
    min_dist = max(girth - 1, 0)

    def far_enough(u: int) -> list[int]:
        if min_dist == 0:
            return [w for w in range(n) if need[w] > (1 if w == u else 0)]
        dist = {u: 0}
        frontier = [u]
        for d in range(1, min_dist):
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in dist:
                        dist[y] = d
                        nxt.append(y)
            frontier = nxt
        return [w for w in range(n) if need[w] > 0 and w not in dist]

    while True:
        open_vs = [v for v in range(n) if need[v] > 0]
        if not open_vs:
            break
        u = rng.choice(open_vs)
        cands = far_enough(u)
        if not cands:
            return None
        w = rng.choice(cands)
        adj[u].append(w)
        if w != u:
            adj[w].append(u)
        else:
            adj[u].append(u)
        need[u] -= 1
        need[w] -= 1
        edges.append((u, w, "added"))
    return LocalGraph.build(n, edges)
