"""Common result object returned by every iterative solver in the package."""

from dataclasses import dataclass, field

import numpy as np

CONVERGED = "converged"
MAX_ITER = "max_iter"
BREAKDOWN = "breakdown"


@dataclass
class SolveReport:
    """Outcome of an iterative solve.

    Attributes
    ----------
    x : ndarray
        Final approximation.
    iterations : int
        Number of iterations actually performed.
    history : list of float
        Residual-norm history, one entry per recorded step (the entry at
        index 0 is the initial residual).  Which norm is recorded depends
        on the solver and is stated in its docstring; solvers that track a
        cheap recurrence estimate expose the recomputed true norms through
        ``extras``.
    status : str
        One of ``"converged"``, ``"max_iter"``, ``"breakdown"``.
    reason : str or None
        Breakdown kind when ``status == "breakdown"``.
    extras : dict
        Solver-specific recorded sequences (coefficients, alternative
        residual histories, ...).
    """

    x: np.ndarray
    iterations: int
    history: list
    status: str
    reason: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def final_residual(self) -> float:
        return self.history[-1]


def residual_threshold(tol, tol_kind, b_norm, r0_norm):
    """Absolute residual threshold for a relative/absolute stopping rule.

    ``tol_kind`` is one of ``"abs"`` (alias ``"abs_residual"``),
    ``"rel_to_b"`` or ``"rel_to_r0"``.
    """
    if tol_kind in ("abs", "abs_residual"):
        return tol
    if tol_kind == "rel_to_b":
        return tol * b_norm
    if tol_kind == "rel_to_r0":
        return tol * r0_norm
    raise ValueError(f"unknown tol_kind {tol_kind!r}")
