"""Shifts of finite type, homomorphism search and decision procedures.

An SFT over a group is given by an alphabet, a window ``W`` and allowed
patterns. A labelling ``f`` of a finite action is a homomorphism into the SFT
when the pattern ``g -> f(g x)`` (``g`` in ``W``) is allowed at every point
``x``.

Allowed patterns are stored either explicitly or, for SFTs whose explicit
table would be huge (tilings), as pairwise relations between window slots.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import csp
from .actions import FiniteAction, make_torus
from .csp import Verdict
from .groups import F2, Z2, FreeAbelian, GroupElem, GroupMismatchError, GroupSpec, Window
from .patterns import Labelling, LocalRule, Pattern
from .polyomino import fixed_polyominoes, free_pieces

P_MAX = 6
P_MAX_F2 = 3


@dataclass(frozen=True)
class SftSpec:
    alphabet: tuple[str, ...]
    window: Window
    allowed: frozenset | None = None
    pairs: tuple | None = None
    builtin: str | None = None

    def __post_init__(self):
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("alphabet symbols must be distinct")
        if (self.allowed is None) == (self.pairs is None):
            raise ValueError("give exactly one of explicit patterns or pairwise relations")
        K, A = len(self.window), len(self.alphabet)
        if self.allowed is not None:
            for p in self.allowed:
                if len(p) != K or any(not 0 <= v < A for v in p):
                    raise ValueError(f"pattern {p} does not fit the window/alphabet")
        else:
            for i, j, rel in self.pairs:
                if not (0 <= i < K and 0 <= j < K):
                    raise ValueError("pair relation refers to a slot outside the window")

    @classmethod
    def explicit(cls, alphabet: Sequence[str], window: Window, patterns: Iterable,
                 builtin: str | None = None) -> "SftSpec":
        alphabet = tuple(str(s) for s in alphabet)
        index = {s: i for i, s in enumerate(alphabet)}
        pats = set()
        for p in patterns:
            if isinstance(p, Pattern):
                p = p.values
            pats.add(tuple(index[v] if isinstance(v, str) else int(v) for v in p))
        return cls(alphabet, window, frozenset(pats), None, builtin)

    @classmethod
    def factored(cls, alphabet: Sequence[str], window: Window, pairs: Iterable,
                 builtin: str | None = None) -> "SftSpec":
        rels = tuple(
            (int(i), int(j), frozenset((int(a), int(b)) for a, b in rel)) for i, j, rel in pairs
        )
        return cls(tuple(str(s) for s in alphabet), window, None, rels, builtin)

    @property
    def group(self) -> GroupSpec:
        return self.window.spec

    @property
    def size(self) -> int:
        return len(self.alphabet)

    @cached_property
    def pair_matrices(self) -> list[tuple[int, int, np.ndarray]]:
        out = []
        for i, j, rel in self.pairs or ():
            m = np.zeros((self.size, self.size), dtype=bool)
            if rel:
                ab = np.array(sorted(rel), dtype=np.int64)
                m[ab[:, 0], ab[:, 1]] = True
            out.append((i, j, m))
        return out

    def is_allowed(self, values: Sequence[int]) -> bool:
        values = tuple(int(v) for v in values)
        if self.allowed is not None:
            return values in self.allowed
        return all(m[values[i], values[j]] for i, j, m in self.pair_matrices)

    def allowed_array(self, limit: int = 2_000_000) -> np.ndarray:
        """Allowed patterns as a sorted ``(count, |W|)`` array."""
        K = len(self.window)
        if self.allowed is not None:
            pats = sorted(self.allowed)
        else:
            pats = list(self._enumerate_factored(limit))
        return np.array(pats, dtype=np.int64).reshape(-1, K)

    def _enumerate_factored(self, limit: int):
        K, A = len(self.window), self.size
        mats = self.pair_matrices
        count = 0
        partial = [0] * K

        def rec(s):
            nonlocal count
            if s == K:
                count += 1
                if count > limit:
                    raise ValueError("too many allowed patterns to enumerate")
                yield tuple(partial)
                return
            for v in range(A):
                partial[s] = v
                if all(m[partial[i], partial[j]] for i, j, m in mats if max(i, j) == s):
                    yield from rec(s + 1)

        yield from rec(0)

    def translate(self, t: GroupElem) -> "SftSpec":
        """Same SFT with window ``W t`` (the set of configurations is unchanged)."""
        new_w = self.window.translate(t)
        perm = [new_w.index(w * t) for w in self.window.elements]
        if self.allowed is not None:
            pats = []
            for p in self.allowed:
                q = [0] * len(p)
                for s, v in enumerate(p):
                    q[perm[s]] = v
                pats.append(tuple(q))
            return SftSpec(self.alphabet, new_w, frozenset(pats))
        pairs = tuple((perm[i], perm[j], rel) for i, j, rel in self.pairs)
        return SftSpec(self.alphabet, new_w, None, pairs)

    @property
    def piece_size(self) -> int:
        """Piece size for tiling SFTs, else 0."""
        if self.builtin and self.builtin.split()[0] in ("tiling", "tiling-f2"):
            return int(self.builtin.split()[1])
        return 0

    def problem(self, scopes: np.ndarray, n_vars: int, hits=None, area: bool = True) -> csp.Problem:
        """CSP for labellings of ``n_vars`` cells with the window placed at each row of ``scopes``.

        ``area`` turns on component-size pruning for tiling SFTs; it is only
        sound when every placement's neighbors are themselves placements
        (finite actions), not for bounded boxes.
        """
        scopes = np.asarray(scopes, dtype=np.int64)
        prob = csp.Problem(n_vars, self.size, scopes)
        if self.allowed is not None:
            prob.table = self.allowed_array()
        else:
            prob.pairs = [(i, j, m) for i, j, m in self.pair_matrices]
        if hits is not None and len(hits):
            prob.hits = np.asarray(hits, dtype=np.int64)
        p = self.piece_size
        if area and p > 1:
            c = self.window.index(self.group.identity)
            prob.area_edges = np.concatenate(
                [scopes[:, [c, s]] for s in range(scopes.shape[1]) if s != c])
            prob.area_mod = p
        return prob


# -- the SFT zoo ------------------------------------------------------------------

def full_shift(spec: GroupSpec, k: int, window: Window | None = None) -> SftSpec:
    window = window or Window.of(spec, [spec.identity])
    pats = itertools.product(range(k), repeat=len(window))
    return SftSpec.explicit([str(i) for i in range(k)], window, pats)


def proper_coloring_sft(w: Window) -> SftSpec:
    """Proper colorings of Cay(G, W) with ``|W \\ {id}| + 1`` colors.

    The SFT window is ``W`` plus the identity; the color at the identity slot
    must differ from every other slot.
    """
    spec = w.spec
    if not w.is_symmetric():
        raise ValueError("proper coloring needs a symmetric window")
    nbrs = [g for g in w if not g.is_identity()]
    win = Window.of(spec, nbrs + [spec.identity])
    k = len(nbrs) + 1
    c = win.index(spec.identity)
    others = [s for s in range(len(win)) if s != c]
    names = [str(i) for i in range(k)]
    if k ** len(win) <= 200_000:
        pats = (p for p in itertools.product(range(k), repeat=len(win))
                if all(p[s] != p[c] for s in others))
        return SftSpec.explicit(names, win, pats)
    neq = [(a, b) for a in range(k) for b in range(k) if a != b]
    return SftSpec.factored(names, win, [(c, s, neq) for s in others])


def period_sft(p: int) -> SftSpec:
    """Z-SFT over ``Z/p`` with ``x(t+1) = x(t) + 1``: maps from ``c_m`` exist iff ``p | m``."""
    if p < 1:
        raise ValueError("period must be >= 1")
    win = Window.of(FreeAbelian(1), [0, 1])
    return SftSpec.explicit([str(i) for i in range(p)], win, [(i, (i + 1) % p) for i in range(p)])


def golden_mean_sft() -> SftSpec:
    win = Window.of(FreeAbelian(1), [0, 1])
    return SftSpec.explicit(["0", "1"], win, [(0, 0), (0, 1), (1, 0)])


def period_forcing_sft(q: int) -> SftSpec:
    """Z^2-SFT over ``Z/q`` with ``x(g + e_i) = x(g) + 1``; tori ``c_{m,n}`` map in iff ``q | m, n``."""
    Z2 = FreeAbelian(2)
    win = Window.of(Z2, [(0, 0), (1, 0), (0, 1)])
    slot = {g.payload: i for i, g in enumerate(win.elements)}
    pats = []
    for v in range(q):
        p = [0, 0, 0]
        p[slot[(0, 0)]] = v
        p[slot[(1, 0)]] = (v + 1) % q
        p[slot[(0, 1)]] = (v + 1) % q
        pats.append(tuple(p))
    return SftSpec.explicit([str(i) for i in range(q)], win, pats)


def tiling_symbols(p: int) -> list[tuple[int, int]]:
    """Symbols of :func:`tiling_sft_z2` as (piece index, cell index)."""
    return [(i, c) for i, piece in enumerate(fixed_polyominoes(p)) for c in range(len(piece))]


def tiling_pieces(builtin: str) -> list[tuple[GroupElem, ...]]:
    """Piece shapes of a builtin tiling SFT, as tuples of group elements."""
    kind, p = builtin.split()
    if kind == "tiling":
        return [tuple(Z2.elem(c) for c in piece) for piece in fixed_polyominoes(int(p))]
    if kind == "tiling-f2":
        return list(free_pieces(int(p)))
    raise ValueError(f"not a tiling SFT: {builtin!r}")


@lru_cache(maxsize=None)
def _tiling_sft(spec: GroupSpec, builtin: str) -> SftSpec:
    # symbol (P, c) at x: the point with piece coordinate q is (q c^-1) x.
    # The neighbor s x has coordinate s c.
    pieces = tiling_pieces(builtin)
    members = [set(piece) for piece in pieces]
    gens = list(spec.symmetric_generators)
    win = Window.of(spec, [spec.identity] + gens)
    center = win.index(spec.identity)
    symbols = [(i, c) for i, piece in enumerate(pieces) for c in range(len(piece))]
    cell_of = [pieces[i][c] for i, c in symbols]
    sym_index = {s: k for k, s in enumerate(symbols)}
    pairs = []
    for s in gens:
        s_inv = s.inv()
        # b claims the cell behind it in direction s as part of its own piece
        unclaimed = [b for b, (j, _) in enumerate(symbols) if s_inv * cell_of[b] not in members[j]]
        rel = []
        for a, (i, _) in enumerate(symbols):
            nb = s * cell_of[a]
            if nb in members[i]:
                rel.append((a, sym_index[(i, pieces[i].index(nb))]))
            else:
                rel.extend((a, b) for b in unclaimed)
        pairs.append((center, win.index(s), rel))
    names = [f"P{i}.{c}" for i, c in symbols]
    return SftSpec.factored(names, win, pairs, builtin=builtin)


def tiling_sft_z2(p: int) -> SftSpec:
    """Tilings of Z^2 by connected pieces of ``p`` cells.

    A symbol ``(P, c)`` says "this cell is cell ``c`` of a copy of fixed
    polyomino ``P``". On the cross window, a neighbor in direction ``d`` must
    be the matching cell of the same piece when ``P[c] + d`` is in ``P``;
    otherwise it must not claim this cell as part of its own piece.
    """
    if not 1 <= p <= P_MAX:
        raise ValueError(f"tiling size must be in 1..{P_MAX}")
    return _tiling_sft(Z2, f"tiling {p}")


def tiling_sft_f2(p: int) -> SftSpec:
    """Tilings of F_2 (left Cayley graph on a, b) by connected ``p``-element pieces.

    Same encoding as :func:`tiling_sft_z2` with pieces from
    :func:`~wclab.polyomino.free_pieces` and the window ``{1, a, A, b, B}``.
    """
    if not 1 <= p <= P_MAX_F2:
        raise ValueError(f"free-group tiling size must be in 1..{P_MAX_F2}")
    return _tiling_sft(F2, f"tiling-f2 {p}")


# -- homomorphisms ----------------------------------------------------------------

@dataclass
class HomCertificate:
    verdict: Verdict
    labelling: Labelling | None = None
    hits_satisfied: tuple = ()
    nodes: int = 0


def _check_group(a: FiniteAction, x: SftSpec) -> None:
    if x.group != a.spec:
        raise GroupMismatchError(f"SFT over {x.group} used with an action of {a.spec}")


def _hit_rows(x: SftSpec, hits) -> np.ndarray:
    K = len(x.window)
    index = {s: i for i, s in enumerate(x.alphabet)}
    rows = []
    for h in hits:
        if isinstance(h, Pattern):
            if h.window != x.window:
                raise ValueError("hit pattern is over a different window")
            h = h.values
        h = tuple(h)
        if len(h) != K:
            raise ValueError(f"hit pattern {h} has {len(h)} slots, window has {K}")
        row = []
        for v in h:
            if isinstance(v, str):
                if v not in index:
                    raise ValueError(f"unknown symbol {v!r} in hit pattern")
                v = index[v]
            if not 0 <= int(v) < x.size:
                raise ValueError(f"symbol {v} out of range in hit pattern")
            row.append(int(v))
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, K)


def hom_exists(a: FiniteAction, x: SftSpec, hits=(), budget: int | None = None,
               order: str = "mrv", kernel=None, area: bool = True) -> HomCertificate:
    """Search for ``f: points -> alphabet`` into ``x`` in which every hit occurs.

    Exhaustive backtracking, so ``NO`` is a proof; ``UNKNOWN`` only when the
    node budget (argument or ``WCLAB_NODE_BUDGET``) runs out.
    """
    _check_group(a, x)
    hit_rows = _hit_rows(x, hits)
    scopes = a.window_images(x.window).T
    prob = x.problem(scopes, a.n, hit_rows, area=area)
    verdict, sol, nodes = csp.solve(prob, order=order, budget=budget, kernel=kernel)
    if verdict is not Verdict.YES:
        return HomCertificate(verdict, nodes=nodes)
    f = Labelling.of(a, x.size, sol)
    if not verify_hom(f, a, x):
        raise AssertionError("solver produced a labelling outside the SFT")
    satisfied = []
    pats = f.array()[scopes]
    for h, row in enumerate(hit_rows):
        where = np.nonzero((pats == row).all(axis=1))[0]
        if not len(where):
            raise AssertionError(f"solver missed hit pattern {tuple(row)}")
        satisfied.append((h, int(where[0])))
    return HomCertificate(verdict, f, tuple(satisfied), nodes)


def verify_hom(f: Labelling, a: FiniteAction, x: SftSpec) -> bool:
    """Every point's window pattern is allowed in ``x``."""
    _check_group(a, x)
    if f.action != a or f.k != x.size:
        return False
    pats = f.array()[a.window_images(x.window)].T
    if x.allowed is not None:
        return all(tuple(p) in x.allowed for p in pats.tolist())
    return all(bool(m[pats[:, i], pats[:, j]].all()) for i, j, m in x.pair_matrices)


# -- Z-SFTs: transfer graph -------------------------------------------------------

def _require_z(x: SftSpec) -> None:
    if x.group != FreeAbelian(1):
        raise ValueError("this decision procedure is for SFTs over Z")


def interval_words(x: SftSpec) -> tuple[int, list[tuple[int, ...]]]:
    """Normalize the window to ``0..L-1``; return ``L`` and the allowed words."""
    _require_z(x)
    offsets = [g.payload[0] for g in x.window.elements]
    lo = min(offsets)
    L = max(offsets) - lo + 1
    pos = [o - lo for o in offsets]
    free = [i for i in range(L) if i not in pos]
    words = set()
    for p in x.allowed_array().tolist():
        base = [0] * L
        for s, v in zip(pos, p):
            base[s] = v
        for fill in itertools.product(range(x.size), repeat=len(free)):
            for s, v in zip(free, fill):
                base[s] = v
            words.add(tuple(base))
    return L, sorted(words)


def transfer_graph(x: SftSpec) -> tuple[list[tuple[int, ...]], dict[int, list[tuple[int, int]]]]:
    """Vertices: (L-1)-words; an edge ``u -> v`` (labelled by its first symbol) per allowed word."""
    L, words = interval_words(x)
    verts = sorted({w[:-1] for w in words} | {w[1:] for w in words})
    index = {v: i for i, v in enumerate(verts)}
    edges: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(verts))}
    for w in words:
        edges[index[w[:-1]]].append((index[w[1:]], w[0]))
    return verts, edges


def nonempty_z(x: SftSpec) -> tuple[bool, tuple[int, ...] | None]:
    """Z-SFT nonemptiness; the witness ``u`` gives the periodic point ``...uuu...``.

    The witness is a shortest cycle of the transfer graph (least start vertex
    among shortest cycles).
    """
    verts, edges = transfer_graph(x)
    best = None
    for s in range(len(verts)):
        prev = {}
        queue = deque([s])
        seen = {s}
        found = None
        while queue and found is None:
            u = queue.popleft()
            for v, sym in edges[u]:
                if v == s:
                    found = u
                    prev_last = (u, sym)
                    break
                if v not in seen:
                    seen.add(v)
                    prev[v] = (u, sym)
                    queue.append(v)
        if found is None:
            continue
        word = [prev_last[1]]
        u = found
        while u != s:
            u, sym = prev[u]
            word.append(sym)
        word.reverse()
        if best is None or len(word) < len(best):
            best = word
    if best is None:
        return False, None
    return True, tuple(best)


def _recurrent_components(x: SftSpec):
    verts, edges = transfer_graph(x)
    n = len(verts)
    rows = [u for u in edges for v, _ in edges[u]]
    cols = [v for u in edges for v, _ in edges[u]]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(adj, directed=True, connection="strong")
    recurrent = set()
    for u in edges:
        for v, _ in edges[u]:
            if labels[u] == labels[v]:
                recurrent.add(labels[u])
    return labels, recurrent, edges


def is_mixing_z(x: SftSpec) -> bool:
    """Recurrent part of the transfer graph is one aperiodic strongly connected component."""
    labels, recurrent, edges = _recurrent_components(x)
    if not recurrent:
        raise ValueError("SFT is empty")
    if len(recurrent) > 1:
        return False
    comp = next(iter(recurrent))
    nodes = [u for u in edges if labels[u] == comp]
    level = {nodes[0]: 0}
    queue = deque([nodes[0]])
    period = 0
    while queue:
        u = queue.popleft()
        for v, _ in edges[u]:
            if labels[v] != comp:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                period = math.gcd(period, level[u] + 1 - level[v])
    return period == 1


# -- Z^2: bounded three-valued nonemptiness -------------------------------------

@dataclass
class Z2Certificate:
    verdict: Verdict
    torus: tuple[int, int] | None = None
    labelling: Labelling | None = None
    radius: int | None = None
    report: str = ""


def box_problem(x: SftSpec, r: int) -> tuple[csp.Problem, list]:
    """Window placements centred on ``[-r, r]^2``; variables are the covered cells."""
    offsets = [g.payload for g in x.window.elements]
    centers = [(i, j) for i in range(-r, r + 1) for j in range(-r, r + 1)]
    cells = sorted({(c[0] + o[0], c[1] + o[1]) for c in centers for o in offsets})
    index = {c: i for i, c in enumerate(cells)}
    scopes = np.array(
        [[index[(c[0] + o[0], c[1] + o[1])] for o in offsets] for c in centers], dtype=np.int64
    )
    return x.problem(scopes, len(cells), area=False), cells


def nonempty_z2_bounded(x: SftSpec, n_max: int, budget: int | None = None) -> Z2Certificate:
    """Three-valued nonemptiness for Z^2-SFTs.

    YES: a periodic configuration on some ``m x n`` torus (``m, n <= n_max``).
    NO: radius ``r <= n_max`` at which the window placements centred on
    ``[-r, r]^2`` admit no consistent labelling. UNKNOWN otherwise.
    """
    if x.group != FreeAbelian(2):
        raise ValueError("nonempty_z2_bounded is for SFTs over Z^2")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    shapes = sorted(((m, n) for m in range(1, n_max + 1) for n in range(1, n_max + 1)),
                    key=lambda s: (s[0] * s[1], s))
    unknown = 0
    for m, n in shapes:
        cert = hom_exists(make_torus(m, n), x, budget=budget)
        if cert.verdict is Verdict.YES:
            return Z2Certificate(Verdict.YES, (m, n), cert.labelling, None,
                                 f"periodic on {m}x{n} torus")
        unknown += cert.verdict is Verdict.UNKNOWN
    for r in range(0, n_max + 1):
        prob, _ = box_problem(x, r)
        verdict, _, _ = csp.solve(prob, budget=budget)
        if verdict is Verdict.NO:
            return Z2Certificate(Verdict.NO, radius=r,
                                 report=f"no locally admissible labelling at radius {r}")
        unknown += verdict is Verdict.UNKNOWN
    return Z2Certificate(Verdict.UNKNOWN,
                         report=f"no period up to {n_max}, no contradiction up to radius {n_max}"
                         + (f"; {unknown} searches over budget" if unknown else ""))


# -- local rules between SFTs -----------------------------------------------------

def _admissible_patches(x: SftSpec, domain: list[GroupElem]):
    index = {d: i for i, d in enumerate(domain)}
    wins = x.window.elements
    placements = []
    cands = {w.inv() * d for w in wins for d in domain}
    for u in sorted(cands):
        slots = [index.get(w * u) for w in wins]
        if all(s is not None for s in slots):
            placements.append(slots)
    for patch in itertools.product(range(x.size), repeat=len(domain)):
        if all(x.is_allowed([patch[s] for s in slots]) for slots in placements):
            yield patch


def _rule_outputs(x: SftSpec, rule: LocalRule, out_window: Window):
    if rule.window.spec != x.group or out_window.spec != x.group:
        raise GroupMismatchError("rule, SFT and output window must share a group")
    domain = sorted({w * v for v in out_window for w in rule.window})
    index = {d: i for i, d in enumerate(domain)}
    table = rule.lookup()
    slots = [[index[w * v] for w in rule.window] for v in out_window]
    for patch in _admissible_patches(x, domain):
        yield tuple(table[tuple(patch[s] for s in sl)] for sl in slots)


def image_sft(x: SftSpec, rule: LocalRule, out_window: Window) -> SftSpec:
    """Smallest SFT on ``out_window`` containing the image of ``x`` under ``rule``."""
    pats = set(_rule_outputs(x, rule, out_window))
    return SftSpec.explicit([str(i) for i in range(rule.k_out)], out_window, pats)


def rule_maps_into(rule: LocalRule, x: SftSpec, y: SftSpec) -> bool:
    """Every locally admissible ``x``-patch is sent to an allowed ``y`` pattern."""
    return all(y.is_allowed(p) for p in _rule_outputs(x, rule, y.window))
