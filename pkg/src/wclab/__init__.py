"""Finite-scale tools for local patterns of group actions, SFTs and LOCAL coloring."""

from .csp import BudgetExceeded, Verdict
from .groups import (Cyclic, DirectProduct, Free, FreeAbelian, GroupElem, GroupSpec, Torus,
                     Window, ball, cayley_graph, inv, mul)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "Verdict", "Cyclic", "DirectProduct", "Free", "FreeAbelian", "GroupElem",
    "GroupSpec", "Torus", "Window", "ball", "cayley_graph", "inv", "mul",
]
