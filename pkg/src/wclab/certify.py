"""Independent re-verification of certificate files.

Nothing here calls the search code. Group elements are evaluated letter by
letter with plain Python, tilings are checked geometrically from the piece
shapes, and mixing is recomputed from powers of the transfer matrix.
"""

from __future__ import annotations

import itertools
from math import inf

import networkx as nx
import numpy as np

from .groups import FreeAbelian, GroupElem, parse_elem
from .polyomino import fixed_polyominoes, free_pieces
from .textio import (Certificate, FormatError, parse_action, parse_certificate, parse_graph_block,
                     parse_pattern_set, parse_sft)

BRUTE_LIMIT = 200_000


class Evaluator:
    """Applies group elements to points using only the generator permutations."""

    def __init__(self, action):
        self.n = action.n
        self.fwd = [list(map(int, p)) for p in action.perms]
        self.back = []
        for p in self.fwd:
            q = [0] * self.n
            for x, y in enumerate(p):
                q[y] = x
            self.back.append(q)

    def apply(self, g: GroupElem, x: int) -> int:
        for i, e in reversed(g.letters()):
            table = self.fwd[i] if e > 0 else self.back[i]
            for _ in range(abs(e)):
                x = table[x]
        return x

    def images(self, window) -> list[list[int]]:
        """``out[x][s]``: the point ``w_s . x``."""
        return [[self.apply(g, x) for g in window.elements] for x in range(self.n)]


def _pattern_ok(x, values) -> bool:
    if x.allowed is not None:
        return tuple(values) in x.allowed
    for i, j, rel in x.pairs:
        if (values[i], values[j]) not in rel:
            return False
    return True


def _pieces(builtin):
    kind, p = builtin.split()
    if kind == "tiling":
        Z2 = FreeAbelian(2)
        return [[Z2.elem(c) for c in piece] for piece in fixed_polyominoes(int(p))]
    return [list(piece) for piece in free_pieces(int(p))]


def _tiling_ok(action, x, colors) -> tuple[bool, str]:
    pieces = _pieces(x.builtin)
    ev = Evaluator(action)
    sym = []
    for name in x.alphabet:
        i, c = name[1:].split(".")
        sym.append((int(i), int(c)))
    offsets = {}
    for pt, s in enumerate(colors):
        if s not in offsets:
            i, c = sym[s]
            back = pieces[i][c].inv()
            offsets[s] = [(q * back, (i, c2)) for c2, q in enumerate(pieces[i])]
        for g, want in offsets[s]:
            y = ev.apply(g, pt)
            if sym[colors[y]] != want:
                return False, f"piece at point {pt} is not matched at point {y}"
    return True, "tiling consistent"


def check_hom_labelling(action, x, colors, hits=()) -> tuple[bool, str]:
    if len(colors) != action.n or any(not 0 <= c < x.size for c in colors):
        return False, "labelling has wrong length or out-of-range symbols"
    if x.group != action.spec:
        return False, "SFT and action use different groups"
    rows = Evaluator(action).images(x.window)
    pats = [tuple(colors[y] for y in row) for row in rows]
    if x.piece_size > 1:
        ok, msg = _tiling_ok(action, x, colors)
        if not ok:
            return ok, msg
    else:
        for pt, p in enumerate(pats):
            if not _pattern_ok(x, p):
                return False, f"pattern {p} at point {pt} is not allowed"
    present = set(pats)
    for h in hits:
        if tuple(h) not in present:
            return False, f"required pattern {tuple(h)} does not occur"
    return True, "every pattern allowed" + (", all hits present" if hits else "")


def _brute_hom(action, x, hits=()) -> bool | None:
    if x.size ** action.n > BRUTE_LIMIT:
        return None
    rows = Evaluator(action).images(x.window)
    for colors in itertools.product(range(x.size), repeat=action.n):
        pats = [tuple(colors[y] for y in row) for row in rows]
        if all(_pattern_ok(x, p) for p in pats) and set(map(tuple, hits)) <= set(pats):
            return True
    return False


def pattern_set_of(action, window, colors) -> set:
    rows = Evaluator(action).images(window)
    return {tuple(colors[y] for y in row) for row in rows}


def _parse_map(text: str) -> list[int]:
    return [int(v) for v in text.split()]


def _parse_patterns(text: str) -> set:
    text = text.strip()
    if not text:
        return set()
    return {tuple(int(v) for v in p.split()) for p in text.split(";")}


# -- per-kind checks --------------------------------------------------------------

def _check_hom(cert: Certificate):
    a = parse_action(cert.blocks["action"])
    x = parse_sft(cert.blocks["sft"])
    index = {s: i for i, s in enumerate(x.alphabet)}
    hits = [tuple(index[s] for s in h.split()) for h in cert.get_list("hit")]
    if cert.verdict == "Yes":
        colors = [index[s] for s in cert.fields["map"].split()]
        return check_hom_labelling(a, x, colors, hits)
    if cert.verdict == "No":
        brute = _brute_hom(a, x, hits)
        if brute is None:
            return True, "No verdict (instance too large for brute force)"
        return (not brute), "brute force agrees" if not brute else "brute force found a labelling"
    return True, "Unknown verdict carries no claim"


def _check_realize(cert: Certificate):
    a = parse_action(cert.blocks["action"])
    target = parse_pattern_set(cert.blocks["patterns"])
    if cert.verdict != "Yes":
        return True, f"{cert.verdict} verdict"
    colors = _parse_map(cert.fields["map"])
    got = pattern_set_of(a, target.window, colors)
    if got != set(target.patterns):
        return False, "labelling does not realize the target pattern set"
    return True, "pattern set realized exactly"


def _all_pattern_sets(action, window, k) -> set:
    rows = Evaluator(action).images(window)
    out = set()
    for colors in itertools.product(range(k), repeat=action.n):
        out.add(frozenset(tuple(colors[y] for y in row) for row in rows))
    return out


def _check_compare(cert: Certificate):
    a = parse_action(cert.blocks["a"])
    b = parse_action(cert.blocks["b"])
    from .groups import parse_window

    window = parse_window(cert.fields["window"], a.spec)
    k = int(cert.fields["colors"])
    if cert.verdict == "Yes":
        realized = set()
        for line in cert.get_list("witness"):
            pats, _, colors = line.partition("|")
            target = _parse_patterns(pats)
            got = pattern_set_of(a, window, _parse_map(colors))
            if got != target:
                return False, f"witness does not realize {sorted(target)}"
            realized.add(frozenset(target))
        if k ** b.n <= BRUTE_LIMIT:
            missing = _all_pattern_sets(b, window, k) - realized
            if missing:
                return False, f"{len(missing)} pattern sets of b lack witnesses"
        return True, f"{len(realized)} pattern sets realized on a"
    if cert.verdict == "No":
        target = frozenset(_parse_patterns(cert.fields["counterexample"]))
        if k ** b.n <= BRUTE_LIMIT and target not in _all_pattern_sets(b, window, k):
            return False, "counterexample is not a pattern set of b"
        if k ** a.n <= BRUTE_LIMIT and target in _all_pattern_sets(a, window, k):
            return False, "counterexample is realized on a"
        return True, "counterexample confirmed"
    return True, "Unknown verdict carries no claim"


def _check_nonempty_z(cert: Certificate):
    x = parse_sft(cert.blocks["sft"])
    if cert.verdict != "Yes":
        return True, f"{cert.verdict} verdict"
    index = {s: i for i, s in enumerate(x.alphabet)}
    word = [index[s] for s in cert.fields["word"].split()]
    offs = [g.payload[0] for g in x.window.elements]
    L = len(word)
    for t in range(L):
        p = tuple(word[(t + o) % L] for o in offs)
        if not _pattern_ok(x, p):
            return False, f"periodic point violates the SFT at position {t}"
    return True, f"periodic point of period {L} lies in the SFT"


def _torus_action(m, n):
    from .actions import FiniteAction

    e1 = [((i + 1) % m) * n + j for i in range(m) for j in range(n)]
    e2 = [i * n + (j + 1) % n for i in range(m) for j in range(n)]
    return FiniteAction(FreeAbelian(2), [e1, e2])


def _check_nonempty_z2(cert: Certificate):
    x = parse_sft(cert.blocks["sft"])
    if cert.verdict != "Yes":
        return True, f"{cert.verdict} verdict"
    m, n = (int(v) for v in cert.fields["torus"].split())
    index = {s: i for i, s in enumerate(x.alphabet)}
    colors = [index[s] for s in cert.fields["map"].split()]
    return check_hom_labelling(_torus_action(m, n), x, colors)


def _mixing_by_powers(x) -> bool:
    """Primitivity of the essential transfer matrix via Wielandt's bound."""
    offs = [g.payload[0] for g in x.window.elements]
    lo = min(offs)
    L = max(offs) - lo + 1
    pos = {o - lo: s for s, o in enumerate(offs)}
    words = []
    for w in itertools.product(range(x.size), repeat=L):
        if _pattern_ok(x, tuple(w[o] for o in sorted(pos, key=pos.get))):
            words.append(w)
    if L == 1:
        return len(words) > 0
    verts = sorted({w[:-1] for w in words} | {w[1:] for w in words})
    idx = {v: i for i, v in enumerate(verts)}
    A = np.zeros((len(verts), len(verts)), dtype=bool)
    for w in words:
        A[idx[w[:-1]], idx[w[1:]]] = True
    # prune vertices with no predecessor or successor until stable
    keep = np.ones(len(verts), dtype=bool)
    while True:
        sub = A & keep[:, None] & keep[None, :]
        new = keep & sub.any(axis=1) & sub.any(axis=0)
        if (new == keep).all():
            break
        keep = new
    B = A[np.ix_(keep, keep)].astype(np.int64)
    r = len(B)
    if r == 0:
        raise ValueError("empty SFT")
    P = np.eye(r, dtype=np.int64)
    for _ in range(r * r - 2 * r + 2):
        P = np.minimum(P @ B, 1)
    return bool(P.all())


def _check_mixing(cert: Certificate):
    x = parse_sft(cert.blocks["sft"])
    want = cert.verdict == "Yes"
    got = _mixing_by_powers(x)
    return got == want, f"matrix powers say {'mixing' if got else 'not mixing'}"


def _check_chi(cert: Certificate):
    a = parse_action(cert.blocks["action"])
    g = parse_elem(cert.fields["element"], a.spec)
    ev = Evaluator(a)
    img = [ev.apply(g, x) for x in range(a.n)]
    value = cert.fields["value"]
    if value == "inf":
        pt = int(cert.fields["fixed"])
        return img[pt] == pt, "fixed point confirmed"
    colors = _parse_map(cert.fields["map"])
    if len(set(colors)) > int(value):
        return False, "witness uses more colors than claimed"
    if any(colors[x] == colors[img[x]] for x in range(a.n)):
        return False, "witness set meets its translate"
    lower = 3 if any(_odd_cycle(img, x) for x in range(a.n)) else 2
    return int(value) == lower, f"cover with {value} sets, lower bound {lower}"


def _odd_cycle(img, x) -> bool:
    y, length = img[x], 1
    while y != x:
        y, length = img[y], length + 1
    return length % 2 == 1


def _check_coloring(cert: Certificate):
    g = parse_graph_block(cert.blocks["graph"])
    colors = _parse_map(cert.fields["map"])
    bound = int(cert.fields["palette"])
    if len(colors) != g.n or any(not 0 <= c < bound for c in colors):
        return False, "coloring has wrong length or exceeds its palette"
    for u, v, _ in g.edges:
        if colors[u] == colors[v]:
            return False, f"edge {u}-{v} is monochromatic"
    return True, f"proper coloring with {bound} colors"


def nx_girth(g) -> float:
    if any(u == v for u, v, _ in g.edges):
        return 1
    G = nx.MultiGraph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from((u, v) for u, v, _ in g.edges)
    if any(G.number_of_edges(u, v) > 1 for u, v in G.edges()):
        return 2
    return nx.girth(nx.Graph(G))


def _check_schreier(cert: Certificate):
    g = parse_graph_block(cert.blocks["graph"])
    a = parse_action(cert.blocks["action"])
    girth = int(cert.fields["girth"])
    if any(len(g.adjacency[v]) != 4 for v in range(g.n)):
        return False, "graph is not 4-regular"
    measured = nx_girth(g)
    if measured < girth:
        return False, f"girth {measured} below {girth}"
    from collections import Counter

    sch = Counter()
    for p in a.perms:
        for x, y in enumerate(p):
            sch[(min(x, int(y)), max(x, int(y)))] += 1
    if sch != g.edge_multiset():
        return False, "Schreier graph differs from the input graph"
    return True, f"Schreier graph matches, girth {measured if measured != inf else 'inf'}"


def _check_adjunction(cert: Certificate):
    from .actions import FiniteAction

    step = int(cert.fields["step"])
    left, right = (int(v) for v in cert.fields["counts"][0].split())
    a = parse_action(cert.blocks["a"])
    b = parse_action(cert.blocks["b"])
    c = parse_action(cert.blocks["coinduced"])
    # hom(b restricted to step*Z, a): the step-th power of b's generator
    p = list(map(int, b.perms[0]))
    q = list(range(b.n))
    for _ in range(step):
        q = [p[v] for v in q]
    res = FiniteAction(a.spec, [q])
    l2 = _count_equivariant(res, a)
    r2 = _count_equivariant(b, c)
    ok = (l2, r2) == (left, right) and (left == right) == (cert.verdict == "Yes")
    return ok, f"recounted {l2} and {r2}"


def _count_equivariant(src, dst) -> int:
    count = 0
    perms = list(zip([list(map(int, p)) for p in src.perms], [list(map(int, p)) for p in dst.perms]))
    for phi in itertools.product(range(dst.n), repeat=src.n):
        if all(phi[ps[x]] == pd[phi[x]] for ps, pd in perms for x in range(src.n)):
            count += 1
    return count


CHECKS = {
    "hom": _check_hom,
    "realize": _check_realize,
    "compare": _check_compare,
    "nonempty-z": _check_nonempty_z,
    "nonempty-z2": _check_nonempty_z2,
    "mixing-z": _check_mixing,
    "chi": _check_chi,
    "coloring": _check_coloring,
    "schreier": _check_schreier,
    "adjunction": _check_adjunction,
}


def check_certificate(cert: Certificate) -> tuple[bool, str]:
    fn = CHECKS.get(cert.kind)
    if fn is None:
        return False, f"unknown certificate kind {cert.kind!r}"
    try:
        return fn(cert)
    except (KeyError, ValueError, FormatError) as e:
        return False, f"malformed certificate: {e}"


def check_text(text: str) -> tuple[bool, str]:
    try:
        cert = parse_certificate(text)
    except FormatError as e:
        return False, str(e)
    return check_certificate(cert)


def check_file(path: str) -> tuple[bool, str]:
    with open(path) as fh:
        return check_text(fh.read())
