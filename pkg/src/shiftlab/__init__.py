"""Exact and validated checks of the moment identity ``(S*S)**k == S*^k S^k`` for weighted shifts."""

from .counterexample import choose_parameters, gamma_solve, sweep, weights
from .tree import Branch, Spine, make_truncation

__all__ = ["Branch", "Spine", "choose_parameters", "gamma_solve", "make_truncation", "sweep", "weights"]
__version__ = "0.1.0"
