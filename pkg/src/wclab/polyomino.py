"""Fixed polyominoes (connected cell sets up to translation only)."""

from __future__ import annotations

from functools import lru_cache

Cell = tuple[int, int]
NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def normalize(cells) -> tuple[Cell, ...]:
    """Translate so the minimum x and minimum y are 0; sorted cell tuple."""
    cells = list(cells)
    mx = min(c[0] for c in cells)
    my = min(c[1] for c in cells)
    return tuple(sorted((x - mx, y - my) for x, y in cells))


@lru_cache(maxsize=None)
def fixed_polyominoes(p: int) -> tuple[tuple[Cell, ...], ...]:
    """All fixed polyominoes with ``p`` cells, grown cell by cell, sorted."""
    if p < 1:
        raise ValueError("polyomino size must be >= 1")
    if p == 1:
        return (((0, 0),),)
    out = set()
    for poly in fixed_polyominoes(p - 1):
        cells = set(poly)
        for x, y in poly:
            for dx, dy in NEIGHBORS:
                c = (x + dx, y + dy)
                if c not in cells:
                    out.add(normalize(cells | {c}))
    return tuple(sorted(out))


def _tree_normal(cells):
    return min(tuple(sorted(q * c.inv() for q in cells)) for c in cells)


@lru_cache(maxsize=None)
def free_pieces(p: int):
    """Connected ``p``-element subsets of F_2 (neighbors ``g ~ s g``) up to right translation.

    Each piece is a sorted tuple of group elements containing the identity.
    """
    from .groups import F2

    if p < 1:
        raise ValueError("piece size must be >= 1")
    if p == 1:
        return ((F2.identity,),)
    out = set()
    for piece in free_pieces(p - 1):
        cells = set(piece)
        for g in piece:
            for s in F2.symmetric_generators:
                h = s * g
                if h not in cells:
                    out.add(_tree_normal(cells | {h}))
    return tuple(sorted(out))
