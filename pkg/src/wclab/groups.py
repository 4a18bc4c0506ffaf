"""Finitely generated groups from a small fixed family.

Supported families: free abelian ``Z^d``, cyclic ``Z/n``, the finite torus
``T(m,n) = Z/m x Z/n``, free groups ``F_k`` and direct products of these.
Elements are immutable and carry their :class:`GroupSpec`; every element is
kept in canonical form, so equality is structural.

Text forms::

    Z2:(1,-2)      element of Z^2
    Z6:3           element of Z/6
    T2,3:(1,2)     element of T(2,3)
    F2:abA         element of F_2 (capital letter = inverse); identity is F2:1
    P:[Z1:(1);F2:a]  element of a direct product
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

FREE_ABELIAN = "free_abelian"
CYCLIC = "cyclic"
TORUS = "torus"
FREE = "free"
PRODUCT = "product"

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupMismatchError(ValueError):
    """Raised when elements of different groups are combined."""


@dataclass(frozen=True)
class GroupSpec:
    family: str
    params: tuple[int, ...] = ()
    factors: tuple["GroupSpec", ...] = ()

    def __post_init__(self):
        if self.family == PRODUCT:
            if not self.factors:
                raise ValueError("direct product needs at least one factor")
        elif self.family in (FREE_ABELIAN, CYCLIC, TORUS, FREE):
            want = 2 if self.family == TORUS else 1
            if len(self.params) != want or any(p < 1 for p in self.params):
                raise ValueError(f"bad parameters {self.params} for {self.family}")
            if self.family == FREE and self.params[0] > len(_LETTERS):
                raise ValueError("free groups of rank > 26 are not supported")
        else:
            raise ValueError(f"unknown group family {self.family!r}")

    # -- structure -------------------------------------------------------
    @cached_property
    def identity(self) -> "GroupElem":
        return GroupElem(self, _identity_payload(self))

    @cached_property
    def generators(self) -> tuple["GroupElem", ...]:
        """The distinguished generating set (not symmetrized)."""
        return tuple(GroupElem(self, p) for p in _generator_payloads(self))

    @cached_property
    def generator_names(self) -> tuple[str, ...]:
        return _generator_names(self)

    @cached_property
    def symmetric_generators(self) -> tuple["GroupElem", ...]:
        gens = set(self.generators) | {g.inv() for g in self.generators}
        gens.discard(self.identity)
        return tuple(sorted(gens))

    @property
    def is_abelian(self) -> bool:
        if self.family == PRODUCT:
            return all(f.is_abelian for f in self.factors)
        return self.family != FREE or self.params[0] == 1

    def elem(self, payload) -> "GroupElem":
        """Build an element from a (possibly non-canonical) payload."""
        return GroupElem(self, _normalize(self, payload))

    def parse(self, text: str) -> "GroupElem":
        return parse_elem(text, self)

    def __str__(self) -> str:
        return format_spec(self)


def FreeAbelian(d: int) -> GroupSpec:
    return GroupSpec(FREE_ABELIAN, (d,))


def Cyclic(n: int) -> GroupSpec:
    return GroupSpec(CYCLIC, (n,))


def Torus(m: int, n: int) -> GroupSpec:
    return GroupSpec(TORUS, (m, n))


def Free(k: int) -> GroupSpec:
    return GroupSpec(FREE, (k,))


def DirectProduct(*specs: GroupSpec) -> GroupSpec:
    return GroupSpec(PRODUCT, (), tuple(specs))


Z = FreeAbelian(1)
Z2 = FreeAbelian(2)
F2 = Free(2)


@dataclass(frozen=True)
class GroupElem:
    spec: GroupSpec
    payload: object

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        return mul(self, other)

    def inv(self) -> "GroupElem":
        return inv(self)

    def __invert__(self) -> "GroupElem":
        return inv(self)

    def __pow__(self, k: int) -> "GroupElem":
        base = self if k >= 0 else self.inv()
        out = self.spec.identity
        for _ in range(abs(k)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self.payload == self.spec.identity.payload

    def __lt__(self, other: "GroupElem") -> bool:
        _same(self, other)
        return _key(self.spec, self.payload) < _key(other.spec, other.payload)

    def __le__(self, other: "GroupElem") -> bool:
        return self == other or self < other

    def __gt__(self, other: "GroupElem") -> bool:
        return other < self

    def __ge__(self, other: "GroupElem") -> bool:
        return other <= self

    def __str__(self) -> str:
        return format_elem(self)

    def __repr__(self) -> str:
        return f"GroupElem({format_elem(self)})"

    def letters(self) -> list[tuple[int, int]]:
        """Factor into ``(generator index, exponent)`` pairs, left to right."""
        return _letters(self.spec, self.payload)


def _same(g: GroupElem, h: GroupElem) -> None:
    if g.spec != h.spec:
        raise GroupMismatchError(f"elements of {g.spec} and {h.spec} cannot be combined")


# -- payload arithmetic ------------------------------------------------------

def _identity_payload(spec: GroupSpec):
    fam = spec.family
    if fam == FREE_ABELIAN:
        return (0,) * spec.params[0]
    if fam == CYCLIC:
        return 0
    if fam == TORUS:
        return (0, 0)
    if fam == FREE:
        return ()
    return tuple(_identity_payload(f) for f in spec.factors)


def _generator_payloads(spec: GroupSpec) -> list:
    fam = spec.family
    if fam == FREE_ABELIAN:
        d = spec.params[0]
        return [tuple(int(i == j) for j in range(d)) for i in range(d)]
    if fam == CYCLIC:
        return [1 % spec.params[0]]
    if fam == TORUS:
        m, n = spec.params
        return [(1 % m, 0), (0, 1 % n)]
    if fam == FREE:
        return [(i + 1,) for i in range(spec.params[0])]
    out = []
    ids = [_identity_payload(f) for f in spec.factors]
    for i, f in enumerate(spec.factors):
        for p in _generator_payloads(f):
            out.append(tuple(p if j == i else ids[j] for j in range(len(ids))))
    return out


def _generator_names(spec: GroupSpec) -> tuple[str, ...]:
    fam = spec.family
    if fam in (FREE_ABELIAN, TORUS):
        return tuple(f"e{i + 1}" for i in range(len(_generator_payloads(spec))))
    if fam == CYCLIC:
        return ("g",)
    if fam == FREE:
        return tuple(_LETTERS[: spec.params[0]])
    return tuple(
        f"f{i}.{name}" for i, f in enumerate(spec.factors) for name in _generator_names(f)
    )


def _normalize(spec: GroupSpec, payload):
    fam = spec.family
    if fam == FREE_ABELIAN:
        p = tuple(int(v) for v in (payload if isinstance(payload, (tuple, list)) else (payload,)))
        if len(p) != spec.params[0]:
            raise ValueError(f"expected {spec.params[0]} coordinates, got {p}")
        return p
    if fam == CYCLIC:
        return int(payload) % spec.params[0]
    if fam == TORUS:
        a, b = payload
        return (int(a) % spec.params[0], int(b) % spec.params[1])
    if fam == FREE:
        k = spec.params[0]
        word = []
        for letter in payload:
            letter = int(letter)
            if letter == 0 or abs(letter) > k:
                raise ValueError(f"bad letter {letter} for F{k}")
            if word and word[-1] == -letter:
                word.pop()
            else:
                word.append(letter)
        return tuple(word)
    if len(payload) != len(spec.factors):
        raise ValueError("wrong number of product coordinates")
    return tuple(_normalize(f, p) for f, p in zip(spec.factors, payload))


def _mul_payload(spec: GroupSpec, p, q):
    fam = spec.family
    if fam == FREE_ABELIAN:
        return tuple(a + b for a, b in zip(p, q))
    if fam == CYCLIC:
        return (p + q) % spec.params[0]
    if fam == TORUS:
        return ((p[0] + q[0]) % spec.params[0], (p[1] + q[1]) % spec.params[1])
    if fam == FREE:
        i = 0
        while i < len(p) and i < len(q) and p[len(p) - 1 - i] == -q[i]:
            i += 1
        return p[: len(p) - i] + q[i:]
    return tuple(_mul_payload(f, a, b) for f, a, b in zip(spec.factors, p, q))


def _inv_payload(spec: GroupSpec, p):
    fam = spec.family
    if fam == FREE_ABELIAN:
        return tuple(-a for a in p)
    if fam == CYCLIC:
        return (-p) % spec.params[0]
    if fam == TORUS:
        return ((-p[0]) % spec.params[0], (-p[1]) % spec.params[1])
    if fam == FREE:
        return tuple(-a for a in reversed(p))
    return tuple(_inv_payload(f, a) for f, a in zip(spec.factors, p))


def _key(spec: GroupSpec, p):
    # Lexicographic on payload; free words compare letter by letter.
    if spec.family == PRODUCT:
        return tuple(_key(f, a) for f, a in zip(spec.factors, p))
    if spec.family == CYCLIC:
        return (p,)
    return p


def _letters(spec: GroupSpec, p) -> list[tuple[int, int]]:
    fam = spec.family
    if fam in (FREE_ABELIAN, TORUS):
        return [(i, c) for i, c in enumerate(p) if c]
    if fam == CYCLIC:
        return [(0, p)] if p else []
    if fam == FREE:
        return [(abs(a) - 1, 1 if a > 0 else -1) for a in p]
    out = []
    offset = 0
    for f, a in zip(spec.factors, p):
        out.extend((offset + i, c) for i, c in _letters(f, a))
        offset += len(_generator_payloads(f))
    return out


def mul(g: GroupElem, h: GroupElem) -> GroupElem:
    _same(g, h)
    return GroupElem(g.spec, _mul_payload(g.spec, g.payload, h.payload))


def inv(g: GroupElem) -> GroupElem:
    return GroupElem(g.spec, _inv_payload(g.spec, g.payload))


# -- windows and balls ---------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """A finite set of group elements in canonical order."""

    spec: GroupSpec
    elements: tuple[GroupElem, ...]

    @classmethod
    def of(cls, spec: GroupSpec, elems: Iterable) -> "Window":
        out = set()
        for e in elems:
            if not isinstance(e, GroupElem):
                e = spec.elem(e)
            elif e.spec != spec:
                raise GroupMismatchError(f"{e} is not an element of {spec}")
            out.add(e)
        return cls(spec, tuple(sorted(out)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.elements

    def index(self, g: GroupElem) -> int:
        return self.elements.index(g)

    def is_symmetric(self) -> bool:
        return all(g.inv() in self.elements for g in self.elements)

    def translate(self, t: GroupElem) -> "Window":
        """Right translate: ``{w t : w in W}``."""
        return Window.of(self.spec, (w * t for w in self.elements))

    def __str__(self) -> str:
        return format_window(self)


def ball(spec: GroupSpec, radius: int) -> Window:
    """Word-metric ball around the identity w.r.t. the symmetric generators."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    return Window(spec, tuple(sorted(_bfs_ball(spec, radius))))


def _bfs_ball(spec: GroupSpec, radius: int) -> dict[GroupElem, int]:
    dist = {spec.identity: 0}
    frontier = [spec.identity]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in spec.symmetric_generators:
                h = s * g
                if h not in dist:
                    dist[h] = r
                    nxt.append(h)
        frontier = nxt
    return dist


def word_length(g: GroupElem, limit: int = 64) -> int:
    """Word length of ``g``; BFS fallback bounded by ``limit``."""
    spec = g.spec
    if spec.family == FREE_ABELIAN:
        return sum(abs(c) for c in g.payload)
    if spec.family == FREE:
        return len(g.payload)
    dist = _bfs_ball(spec, limit)
    if g not in dist:
        raise ValueError(f"{g} has word length > {limit}")
    return dist[g]


def cayley_graph(spec: GroupSpec, radius: int):
    """Cayley graph restricted to ``ball(spec, radius)``.

    Vertex ``i`` is the ``i``-th ball element; an edge ``(v, s v)`` labelled by
    the generator name is present when both endpoints lie in the ball.
    """
    from .graphs import LocalGraph

    verts = ball(spec, radius).elements
    index = {g: i for i, g in enumerate(verts)}
    edges = []
    for i, v in enumerate(verts):
        for s, name in zip(spec.generators, spec.generator_names):
            j = index.get(s * v)
            if j is not None:
                edges.append((i, j, name))
    return LocalGraph.build(len(verts), edges)


# -- text forms ------------------------------------------------------------------

def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside of (), [] nesting."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or out:
        out.append(tail)
    return [t for t in out if t != ""]


def format_spec(spec: GroupSpec) -> str:
    fam = spec.family
    if fam == FREE_ABELIAN:
        d = spec.params[0]
        return "Z" if d == 1 else f"Z^{d}"
    if fam == CYCLIC:
        return f"Z/{spec.params[0]}"
    if fam == TORUS:
        return f"T({spec.params[0]},{spec.params[1]})"
    if fam == FREE:
        return f"F{spec.params[0]}"
    return "P(" + ",".join(format_spec(f) for f in spec.factors) + ")"


def parse_spec(text: str) -> GroupSpec:
    t = text.strip()
    if t == "Z":
        return FreeAbelian(1)
    if m := re.fullmatch(r"Z\^(\d+)", t):
        return FreeAbelian(int(m.group(1)))
    if m := re.fullmatch(r"Z/(\d+)", t):
        return Cyclic(int(m.group(1)))
    if m := re.fullmatch(r"T\((\d+),(\d+)\)", t.replace(" ", "")):
        return Torus(int(m.group(1)), int(m.group(2)))
    if m := re.fullmatch(r"F(\d+)", t):
        return Free(int(m.group(1)))
    if t.startswith("P(") and t.endswith(")"):
        return DirectProduct(*(parse_spec(s) for s in split_top(t[2:-1])))
    raise ValueError(f"cannot parse group spec {text!r}")


def _format_payload(spec: GroupSpec, p) -> str:
    fam = spec.family
    if fam in (FREE_ABELIAN, TORUS):
        return "(" + ",".join(str(v) for v in p) + ")"
    if fam == CYCLIC:
        return str(p)
    if fam == FREE:
        if not p:
            return "1"
        return "".join(_LETTERS[a - 1] if a > 0 else _LETTERS[-a - 1].upper() for a in p)
    return "[" + ";".join(format_elem(GroupElem(f, a)) for f, a in zip(spec.factors, p)) + "]"


def _prefix(spec: GroupSpec) -> str:
    fam = spec.family
    if fam == FREE_ABELIAN:
        return f"Z{spec.params[0]}"
    if fam == CYCLIC:
        return f"Z{spec.params[0]}"
    if fam == TORUS:
        return f"T{spec.params[0]},{spec.params[1]}"
    if fam == FREE:
        return f"F{spec.params[0]}"
    return "P"


def format_elem(g: GroupElem) -> str:
    return f"{_prefix(g.spec)}:{_format_payload(g.spec, g.payload)}"


def format_payload(g: GroupElem) -> str:
    """Bare payload text (the form used inside windows of a known group)."""
    if g.spec.family == FREE_ABELIAN and g.spec.params[0] == 1:
        return str(g.payload[0])
    return _format_payload(g.spec, g.payload)


def _parse_payload(spec: GroupSpec, t: str):
    fam = spec.family
    t = t.strip()
    if fam in (FREE_ABELIAN, TORUS):
        if t.startswith("(") and t.endswith(")"):
            vals = tuple(int(v) for v in split_top(t[1:-1]))
        elif fam == FREE_ABELIAN and spec.params[0] == 1:
            vals = (int(t),)
        else:
            raise ValueError(f"cannot parse {t!r} as an element of {spec}")
        return _normalize(spec, vals)
    if fam == CYCLIC:
        return _normalize(spec, int(t))
    if fam == FREE:
        if t in ("1", ""):
            return ()
        word = []
        for ch in t:
            i = _LETTERS.find(ch.lower())
            if i < 0:
                raise ValueError(f"bad free-group letter {ch!r}")
            word.append(i + 1 if ch.islower() else -(i + 1))
        return _normalize(spec, word)
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"cannot parse {t!r} as a product element")
    parts = split_top(t[1:-1], ";")
    return _normalize(spec, [parse_elem(s, f).payload for s, f in zip(parts, spec.factors)])


def parse_elem(text: str, spec: GroupSpec | None = None) -> GroupElem:
    """Parse an element; the prefix may be omitted when ``spec`` is given."""
    t = text.strip()
    m = re.match(r"^(Z\d+|T\d+,\d+|F\d+|P):", t)
    if m:
        prefix, body = m.group(1), t[m.end():]
        if prefix.startswith("Z"):
            d = int(prefix[1:])
            implied = FreeAbelian(d) if body.strip().startswith("(") else Cyclic(d)
        elif prefix.startswith("T"):
            a, b = prefix[1:].split(",")
            implied = Torus(int(a), int(b))
        elif prefix.startswith("F"):
            implied = Free(int(prefix[1:]))
        else:
            if spec is None:
                raise ValueError("product elements need an explicit group spec")
            implied = spec
        if spec is not None and implied != spec:
            raise GroupMismatchError(f"{text!r} is not an element of {spec}")
        return GroupElem(implied, _parse_payload(implied, body))
    if spec is None:
        raise ValueError(f"element {text!r} has no group prefix")
    return GroupElem(spec, _parse_payload(spec, t))


def format_window(w: Window) -> str:
    return ",".join(format_payload(g) for g in w.elements)


def parse_window(text: str, spec: GroupSpec) -> Window:
    return Window.of(spec, (parse_elem(s, spec) for s in split_top(text)))


def elements(spec: GroupSpec, payloads: Sequence) -> list[GroupElem]:
    return [spec.elem(p) for p in payloads]
