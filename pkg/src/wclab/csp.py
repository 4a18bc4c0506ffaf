"""Compile labelling problems to the bitset CSP kernel and run it."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels

BUDGET_ENV = "WCLAB_NODE_BUDGET"
MAX_STACK_WORDS = 60_000_000


class Verdict(enum.IntEnum):
    """Three-valued decision; the integer value is the CLI exit code."""

    YES = 0
    NO = 1
    UNKNOWN = 2

    def __str__(self) -> str:
        return self.name.capitalize()


class BudgetExceeded(RuntimeError):
    """The node budget ran out before the search finished."""


def default_budget() -> int:
    """Global node budget from ``WCLAB_NODE_BUDGET`` (-1 = unlimited)."""
    raw = os.environ.get(BUDGET_ENV, "").strip()
    return int(raw) if raw else -1


def bitsets(mask: np.ndarray) -> np.ndarray:
    """Pack the last axis of a boolean array into little-endian uint64 words."""
    mask = np.asarray(mask, dtype=bool)
    S = mask.shape[-1]
    nw = max(1, (S + 63) // 64)
    padded = np.zeros(mask.shape[:-1] + (nw * 64,), dtype=bool)
    padded[..., :S] = mask
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


@dataclass
class Problem:
    """Labelling problem: ``n_vars`` variables over ``n_values`` symbols.

    Each row of ``scopes`` is one window placement. Allowed patterns are given
    either as an explicit ``table`` (rows of symbols, one column per window
    slot) or as ``pairs``: ``(slot_i, slot_j, bool matrix)`` relations that
    every placement must satisfy. ``hits`` must each occur at some placement.
    """

    n_vars: int
    n_values: int
    scopes: np.ndarray
    table: np.ndarray | None = None
    pairs: list = field(default_factory=list)
    hits: np.ndarray | None = None
    domains: np.ndarray | None = None  # optional (n_vars, n_values) bool mask
    area_edges: np.ndarray | None = None  # (m, 2) variable pairs for area pruning
    area_mod: int = 0


def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, keys + 1, 1)
    return np.cumsum(ptr), order.astype(np.int64)


def compile_problem(prob: Problem) -> tuple:
    n, S = prob.n_vars, prob.n_values
    scopes = np.asarray(prob.scopes, dtype=np.int64).reshape(-1, prob.scopes.shape[-1])
    K = scopes.shape[1]
    mask = np.ones((n, S), dtype=bool) if prob.domains is None else prob.domains.copy()

    # binary relations -> directed arcs
    rel_f, rel_b = [], []
    src, dst, rid = [], [], []
    for s1, s2, rel in prob.pairs:
        rel = np.asarray(rel, dtype=bool)
        r = len(rel_f)
        rel_f += [rel, rel.T]
        rel_b += [rel.T, rel]
        xs, ys = scopes[:, s1], scopes[:, s2]
        loops = xs == ys
        if loops.any():
            diag = np.diag(rel)
            mask[xs[loops]] &= diag
        xs, ys = xs[~loops], ys[~loops]
        src += [xs, ys]
        dst += [ys, xs]
        rid += [np.full(len(xs), r), np.full(len(ys), r + 1)]
    if rel_f:
        rel_fwd = bitsets(np.stack(rel_f))
        rel_bwd = bitsets(np.stack(rel_b))
        arc_src = np.concatenate(src).astype(np.int64)
        arc_dst = np.concatenate(dst).astype(np.int64)
        arc_rel = np.concatenate(rid).astype(np.int64)
    else:
        rel_fwd = rel_bwd = np.zeros((0, S, bitsets(np.zeros(S, bool)).shape[-1]), np.uint64)
        arc_src = arc_dst = arc_rel = np.zeros(0, dtype=np.int64)
    out_ptr, out_arcs = _csr(arc_src, n)

    # table constraints, one per placement
    if prob.table is not None:
        tab_rows = np.asarray(prob.table, dtype=np.int64).reshape(-1, K)
        con_scope = scopes
        con_tab = np.zeros(len(scopes), dtype=np.int64)
        tab_ptr = np.array([0, len(tab_rows)], dtype=np.int64)
    else:
        tab_rows = np.zeros((0, K), dtype=np.int64)
        con_scope = np.zeros((0, K), dtype=np.int64)
        con_tab = np.zeros(0, dtype=np.int64)
        tab_ptr = np.zeros(1, dtype=np.int64)
    con_dup = np.array([len(set(r)) < K for r in con_scope.tolist()], dtype=np.bool_)
    var_of = con_scope.reshape(-1)
    con_of = np.repeat(np.arange(len(con_scope), dtype=np.int64), K)
    vc_ptr, order = _csr(var_of, n)
    vc_idx = con_of[order]

    hits = np.zeros((0, K), dtype=np.int64) if prob.hits is None else np.asarray(prob.hits, dtype=np.int64).reshape(-1, K)
    hit_dup = np.array([len(set(r)) < K for r in scopes.tolist()], dtype=np.bool_)
    D0 = bitsets(mask)
    if prob.area_mod > 1 and prob.area_edges is not None and len(prob.area_edges):
        e = np.asarray(prob.area_edges, dtype=np.int64).reshape(-1, 2)
        e = np.concatenate([e, e[:, ::-1]])
        adj_ptr, order = _csr(e[:, 0], n)
        adj_idx = e[order, 1]
        area_mod = int(prob.area_mod)
    else:
        adj_ptr, adj_idx, area_mod = np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), 0
    return (D0, out_ptr, out_arcs, arc_dst, arc_rel, rel_fwd, rel_bwd,
            vc_ptr, vc_idx, con_scope, con_tab, con_dup, tab_ptr, tab_rows,
            hits, scopes if len(hits) else np.zeros((0, K), dtype=np.int64), hit_dup,
            adj_ptr, adj_idx, area_mod)


def solve(prob: Problem, order: str = "mrv", budget: int | None = None,
          kernel=None) -> tuple[Verdict, np.ndarray | None, int]:
    """Run the search. ``order`` is ``"mrv"`` or ``"lex"``.

    Returns ``(verdict, solution or None, nodes)``.
    """
    if order not in ("mrv", "lex"):
        raise ValueError(f"unknown variable order {order!r}")
    if budget is None:
        budget = default_budget()
    if prob.n_vars == 0:
        return Verdict.YES, np.zeros(0, dtype=np.int64), 0
    if prob.n_values == 0:
        return Verdict.NO, None, 0
    args = compile_problem(prob)
    nw = args[0].shape[1]
    if (prob.n_vars + 1) * prob.n_vars * nw > MAX_STACK_WORDS:
        raise ValueError("problem too large for the search stack")
    search = kernel or kernels.csp_search
    status, sol, nodes = search(*args, order == "mrv", int(budget))
    if status == 0:
        return Verdict.YES, np.asarray(sol), int(nodes)
    if status == 1:
        return Verdict.NO, None, int(nodes)
    return Verdict.UNKNOWN, None, int(nodes)
