"""Labelled multigraphs with vertex IDs (Cayley/Schreier graphs, LOCAL inputs)."""

from __future__ import annotations

import math
import re
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class LocalGraph:
    """Undirected multigraph on vertices ``0..n-1``.

    Each edge is ``(u, v, label)``; the stored direction ``u -> v`` is kept
    (Schreier edges point from ``x`` to ``s x``) but adjacency is symmetric.
    Loops and multi-edges are allowed. ``ids`` are distinct non-negative
    integers used by LOCAL algorithms.
    """

    n: int
    edges: tuple[tuple[int, int, str], ...]
    ids: tuple[int, ...]
    ports: tuple[tuple[int, ...], ...] | None = None

    @classmethod
    def build(cls, n: int, edges, ids=None, ports=None) -> "LocalGraph":
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            label = str(e[2]) if len(e) > 2 else ""
            norm.append((u, v, label))
        ids = tuple(range(n)) if ids is None else tuple(int(i) for i in ids)
        g = cls(n, tuple(norm), ids, ports)
        g.validate()
        return g

    def validate(self) -> None:
        if len(self.ids) != self.n:
            raise ValueError("need exactly one ID per vertex")
        if len(set(self.ids)) != self.n:
            raise ValueError("vertex IDs must be pairwise distinct")
        if any(i < 0 for i in self.ids):
            raise ValueError("vertex IDs must be non-negative")
        for u, v, _ in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range")

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex, ``(neighbor, edge index)`` pairs; loops appear twice."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for k, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, k))
            adj[v].append((u, k))
        return tuple(tuple(a) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def has_loops(self) -> bool:
        return any(u == v for u, v, _ in self.edges)

    def neighbors(self, v: int) -> list[int]:
        return [w for w, _ in self.adjacency[v]]

    def edge_multiset(self) -> Counter:
        """Unordered endpoint pairs with multiplicity, labels ignored."""
        return Counter((min(u, v), max(u, v)) for u, v, _ in self.edges)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(self.bfs_distances(0)) == self.n

    def bfs_distances(self, source: int, limit: int | None = None) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for w, _ in self.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def girth(self) -> float:
        """Length of a shortest cycle (loops count 1, parallel edges 2); inf for forests."""
        if self.has_loops():
            return 1
        pairs = self.edge_multiset()
        if any(c > 1 for c in pairs.values()):
            return 2
        best = math.inf
        for root in range(self.n):
            dist = {root: 0}
            parent_edge = {root: -1}
            queue = deque([root])
            while queue:
                u = queue.popleft()
                if 2 * dist[u] + 1 >= best:
                    break
                for w, k in self.adjacency[u]:
                    if k == parent_edge[u]:
                        continue
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        parent_edge[w] = k
                        queue.append(w)
                    else:
                        best = min(best, dist[u] + dist[w] + 1)
        return best

    def is_forest(self) -> bool:
        return math.isinf(self.girth())

    def with_ids(self, ids) -> "LocalGraph":
        return LocalGraph.build(self.n, self.edges, ids, self.ports)

    # -- text forms --------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        for u, v, label in self.edges:
            lines.append(f"{u} {v}" + (f" {label}" if label else ""))
        if self.ids != tuple(range(self.n)):
            lines.extend(f"id {v} {i}" for v, i in enumerate(self.ids))
        return "\n".join(lines) + "\n"

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.n):
            lines.append(f'  {v} [label="{self.ids[v]}"];')
        for u, v, label in self.edges:
            attr = f' [label="{label}"]' if label else ""
            lines.append(f"  {u} -- {v}{attr};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> LocalGraph:
    """Parse the edge-list format or a small DOT subset."""
    stripped = text.strip()
    if re.match(r"^(strict\s+)?(di)?graph\b", stripped):
        return _parse_dot(stripped)
    n = None
    edges = []
    ids: dict[int, int] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            n = int(parts[1])
        elif parts[0] == "id":
            ids[int(parts[1])] = int(parts[2])
        else:
            label = parts[2] if len(parts) > 2 else ""
            edges.append((int(parts[0]), int(parts[1]), label))
    if n is None:
        raise ValueError("edge list needs an 'n <count>' line")
    id_list = [ids.get(v, v) for v in range(n)] if ids else None
    return LocalGraph.build(n, edges, id_list)


def _parse_dot(text: str) -> LocalGraph:
    body = text[text.index("{") + 1: text.rindex("}")]
    nodes: dict[int, int] = {}
    edges = []
    for stmt in re.split(r"[;\n]", body):
        stmt = stmt.strip()
        if not stmt:
            continue
        m = re.fullmatch(r"(\d+)\s*-[-\>]\s*(\d+)\s*(\[.*\])?", stmt)
        if m:
            label = ""
            if m.group(3):
                lm = re.search(r'label\s*=\s*"?([^",\]]*)"?', m.group(3))
                label = lm.group(1) if lm else ""
            u, v = int(m.group(1)), int(m.group(2))
            nodes.setdefault(u, u)
            nodes.setdefault(v, v)
            edges.append((u, v, label))
            continue
        m = re.fullmatch(r"(\d+)\s*(\[.*\])?", stmt)
        if m:
            v = int(m.group(1))
            ident = v
            if m.group(2):
                lm = re.search(r'label\s*=\s*"?(\d+)"?', m.group(2))
                if lm:
                    ident = int(lm.group(1))
            nodes[v] = ident
    n = max(nodes, default=-1) + 1
    ids = [nodes.get(v, v) for v in range(n)]
    return LocalGraph.build(n, edges, ids)


def cycle_graph(n: int, ids=None) -> LocalGraph:
    """The ``n``-cycle with edges ``i -> i+1``."""
    return LocalGraph.build(n, [(i, (i + 1) % n, "") for i in range(n)], ids)


def path_graph(n: int, ids=None) -> LocalGraph:
    return LocalGraph.build(n, [(i, i + 1, "") for i in range(n - 1)], ids)
