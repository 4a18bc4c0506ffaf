"""Line-oriented text formats for actions, labellings, pattern sets, SFTs and certificates.

Every ``format_*`` output is accepted by the matching ``parse_*``. Blank lines
and ``#`` comments are ignored everywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .actions import FiniteAction
from .groups import GroupSpec, format_spec, format_window, parse_spec, parse_window
from .patterns import Labelling, PatternSet

CERT_HEADER = "wclab-certificate v1"


class FormatError(ValueError):
    """Malformed input file."""


def _lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def _key(line: str) -> tuple[str, str]:
    head, _, rest = line.partition(" ")
    return head, rest.strip()


# -- actions ----------------------------------------------------------------------

def format_action(a: FiniteAction) -> str:
    out = [f"group {format_spec(a.spec)}", f"points {a.n}"]
    for name, p in zip(a.spec.generator_names, a.perms):
        out.append(f"gen {name}: " + " ".join(str(int(v)) for v in p))
    return "\n".join(out) + "\n"


def parse_action(text: str) -> FiniteAction:
    spec = n = None
    gens: dict[str, list[int]] = {}
    for line in _lines(text):
        key, rest = _key(line)
        if key == "group":
            spec = parse_spec(rest)
        elif key == "points":
            n = int(rest)
        elif key == "gen":
            name, _, imgs = rest.partition(":")
            gens[name.strip()] = [int(v) for v in imgs.split()]
        else:
            raise FormatError(f"unexpected line in action file: {line!r}")
    if spec is None or n is None:
        raise FormatError("action file needs 'group' and 'points' lines")
    perms = []
    for name in spec.generator_names:
        if name not in gens:
            raise FormatError(f"missing generator {name!r}")
        if len(gens[name]) != n:
            raise FormatError(f"generator {name!r} lists {len(gens[name])} images for {n} points")
        perms.append(gens[name])
    extra = set(gens) - set(spec.generator_names)
    if extra:
        raise FormatError(f"unknown generators {sorted(extra)}")
    return FiniteAction(spec, perms)


# -- labellings -------------------------------------------------------------------

def format_labelling(f: Labelling, action_ref: str) -> str:
    return f"action {action_ref}\ncolors {f.k}\nmap {' '.join(map(str, f.colors))}\n"


def parse_labelling(text: str, base_dir: str = ".", action: FiniteAction | None = None) -> Labelling:
    ref = k = colors = None
    for line in _lines(text):
        key, rest = _key(line)
        if key == "action":
            ref = rest
        elif key == "colors":
            k = int(rest)
        elif key == "map":
            colors = [int(v) for v in rest.split()]
        else:
            raise FormatError(f"unexpected line in labelling file: {line!r}")
    if colors is None or k is None:
        raise FormatError("labelling file needs 'colors' and 'map' lines")
    if action is None:
        if ref is None:
            raise FormatError("labelling file needs an 'action' line")
        with open(os.path.join(base_dir, ref)) as fh:
            action = parse_action(fh.read())
    return Labelling.of(action, k, colors)


# -- pattern sets -----------------------------------------------------------------

def format_pattern_set(ps: PatternSet) -> str:
    out = [f"group {format_spec(ps.window.spec)}", f"colors {ps.k}", f"window {format_window(ps.window)}"]
    out += [" ".join(map(str, p)) for p in ps.patterns]
    return "\n".join(out) + "\n"


def parse_pattern_set(text: str, spec: GroupSpec | None = None, k: int | None = None) -> PatternSet:
    window = None
    rows = []
    for line in _lines(text):
        key, rest = _key(line)
        if key == "group":
            spec = parse_spec(rest)
        elif key == "colors":
            k = int(rest)
        elif key == "window":
            if spec is None:
                raise FormatError("pattern set needs a group before its window")
            window = parse_window(rest, spec)
        else:
            rows.append(tuple(int(v) for v in line.split()))
    if window is None:
        raise FormatError("pattern set file needs a 'window' line")
    if k is None:
        k = max((max(r) for r in rows if r), default=0) + 1
    return PatternSet.of(window, k, rows)


# -- SFTs -------------------------------------------------------------------------

def format_sft(x) -> str:
    if x.piece_size:
        return f"builtin {x.builtin}\n"
    out = [f"group {format_spec(x.group)}", f"alphabet {' '.join(x.alphabet)}",
           f"window {format_window(x.window)}"]
    if x.allowed is not None:
        for p in sorted(x.allowed):
            out.append("allow " + " ".join(x.alphabet[v] for v in p))
    else:
        for i, j, rel in x.pairs:
            for a, b in sorted(rel):
                out.append(f"pair {i} {j} {x.alphabet[a]} {x.alphabet[b]}")
    return "\n".join(out) + "\n"


def parse_sft(text: str):
    from . import sft

    spec = alphabet = window = None
    allow, pairs = [], {}
    for line in _lines(text):
        key, rest = _key(line)
        if key == "builtin":
            kind, _, arg = rest.partition(" ")
            if kind == "tiling":
                return sft.tiling_sft_z2(int(arg))
            if kind == "tiling-f2":
                return sft.tiling_sft_f2(int(arg))
            raise FormatError(f"unknown builtin SFT {rest!r}")
        if key == "group":
            spec = parse_spec(rest)
        elif key == "alphabet":
            alphabet = rest.split()
        elif key == "window":
            if spec is None:
                raise FormatError("SFT file needs a group before its window")
            window = parse_window(rest, spec)
        elif key == "allow":
            allow.append(rest.split())
        elif key == "pair":
            i, j, a, b = rest.split()
            pairs.setdefault((int(i), int(j)), []).append((a, b))
        else:
            raise FormatError(f"unexpected line in SFT file: {line!r}")
    if spec is None or alphabet is None or window is None:
        raise FormatError("SFT file needs 'group', 'alphabet' and 'window' lines")
    index = {s: i for i, s in enumerate(alphabet)}
    if allow and pairs:
        raise FormatError("SFT file mixes 'allow' and 'pair' lines")
    try:
        if pairs:
            rels = [(i, j, [(index[a], index[b]) for a, b in rel]) for (i, j), rel in sorted(pairs.items())]
            return sft.SftSpec.factored(alphabet, window, rels)
        for row in allow:
            if len(row) != len(window):
                raise FormatError(f"allow line {row} has {len(row)} symbols, window has {len(window)}")
        return sft.SftSpec.explicit(alphabet, window, ([index[s] for s in row] for row in allow))
    except KeyError as e:
        raise FormatError(f"symbol {e.args[0]!r} not in alphabet") from None


# -- certificates -----------------------------------------------------------------

@dataclass
class Certificate:
    """A verdict with its evidence: scalar fields plus embedded file blocks."""

    kind: str
    verdict: str
    fields: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)

    def to_text(self) -> str:
        out = [CERT_HEADER, f"kind {self.kind}", f"verdict {self.verdict}"]
        for k, v in self.fields.items():
            if isinstance(v, list):
                out += [f"{k} {item}" for item in v]
            else:
                out.append(f"{k} {v}")
        for name, body in self.blocks.items():
            out.append(f"begin {name}")
            out += body.rstrip("\n").splitlines()
            out.append(f"end {name}")
        return "\n".join(out) + "\n"

    def get_list(self, key: str) -> list[str]:
        v = self.fields.get(key, [])
        return v if isinstance(v, list) else [v]


REPEATED_FIELDS = {"hit", "witness", "cell", "counts"}


def parse_certificate(text: str) -> Certificate:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CERT_HEADER:
        raise FormatError("not a certificate file")
    kind = verdict = None
    fields: dict = {}
    blocks: dict = {}
    current = None
    for raw in lines[1:]:
        line = raw.rstrip()
        if current is not None:
            if line == f"end {current}":
                current = None
            else:
                blocks[current].append(line)
            continue
        if not line.strip():
            continue
        key, rest = _key(line.strip())
        if key == "begin":
            current = rest
            blocks[current] = []
        elif key == "kind":
            kind = rest
        elif key == "verdict":
            verdict = rest
        elif key in REPEATED_FIELDS:
            fields.setdefault(key, []).append(rest)
        else:
            fields[key] = rest
    if current is not None:
        raise FormatError(f"unterminated block {current!r}")
    if kind is None or verdict is None:
        raise FormatError("certificate needs 'kind' and 'verdict' lines")
    return Certificate(kind, verdict, fields, {k: "\n".join(v) + "\n" for k, v in blocks.items()})


def write_text(path: str, text: str) -> str:
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)
    return path


def parse_graph_block(text: str):
    from .graphs import parse_graph

    return parse_graph(text)
