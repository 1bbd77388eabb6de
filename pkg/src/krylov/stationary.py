"""Splitting-based stationary iterations: Jacobi, Gauss-Seidel, SOR, SSOR,
their block versions, plus splitting diagnostics and spectral-radius tools.

A splitting A = M - N (M invertible) defines the iteration
M x_{k+1} = N x_k + b, implemented throughout in the equivalent
residual-update form: solve M u_k = r_k with r_k = b - A x_k, then
x_{k+1} = x_k + u_k.  Point sweeps run over the sparse row structure;
block variants factor each diagonal block densely once.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .report import BREAKDOWN, CONVERGED, MAX_ITER, SolveReport, residual_threshold
from .storage import as_matvec, operator_size, to_dense, to_triplets

POINT_METHODS = ("jacobi", "gauss_seidel", "sor")
BLOCK_METHODS = ("block_jacobi", "block_gs")


@dataclass
class Splitting:
    """A = M - N with an invertible M.

    ``m_solve`` solves M u = r, ``a_apply`` is the action of A (used for
    residuals), and ``n_apply`` (optional) is the action of N = M - A.
    """

    m_solve: Callable
    a_apply: Callable
    n_apply: Callable | None = None


@dataclass
class StationaryConfig:
    method: str = "jacobi"
    omega: float | None = None
    block_size: int | None = None
    tol: float = 1e-6
    tol_kind: str = "rel_to_r0"
    max_iter: int | None = None


class _PointStructure:
    """Per-row sparse access: diagonal plus strict lower/upper row lists."""

    def __init__(self, a):
        t = to_triplets(a).coalesced()
        n = t.n
        self.n = n
        self.diag = np.zeros(n)
        self.lower = [([], []) for _ in range(n)]
        self.upper = [([], []) for _ in range(n)]
        for i, j, v in zip(t.rows, t.cols, t.vals):
            i = int(i)
            j = int(j)
            if i == j:
                self.diag[i] = v
            elif j < i:
                self.lower[i][0].append(j)
                self.lower[i][1].append(float(v))
            else:
                self.upper[i][0].append(j)
                self.upper[i][1].append(float(v))
        if np.any(self.diag == 0.0):
            raise ValueError("matrix has a zero diagonal entry")

    def forward_solve(self, diag, rhs):
        """Solve (D + strict lower of A) u = rhs with the given diagonal D."""
        u = np.empty(self.n)
        lower = self.lower
        for i in range(self.n):
            s = rhs[i]
            cols, vals = lower[i]
            for j, v in zip(cols, vals):
                s -= v * u[j]
            u[i] = s / diag[i]
        return u

    def backward_solve(self, diag, rhs):
        """Solve (D + strict upper of A) u = rhs with the given diagonal D."""
        u = np.empty(self.n)
        upper = self.upper
        for i in range(self.n - 1, -1, -1):
            s = rhs[i]
            cols, vals = upper[i]
            for j, v in zip(cols, vals):
                s -= v * u[j]
            u[i] = s / diag[i]
        return u

    def lower_apply(self, diag, x):
        """(D + strict lower of A) @ x."""
        y = diag * x
        for i in range(self.n):
            cols, vals = self.lower[i]
            for j, v in zip(cols, vals):
                y[i] += v * x[j]
        return y


class _BlockStructure:
    """Dense block partition with factored diagonal blocks (desk scale)."""

    def __init__(self, a, block_size):
        dense = to_dense(a)
        n = dense.shape[0]
        if block_size is None:
            block_size = int(round(math.sqrt(n)))
        if block_size < 1 or n % block_size != 0:
            raise ValueError(f"block size {block_size} does not divide n={n}")
        self.n = n
        self.bs = block_size
        self.nb = n // block_size
        self.dense = dense
        self.factors = []
        for bi in range(self.nb):
            sl = self._slice(bi)
            try:
                self.factors.append(scipy.linalg.lu_factor(dense[sl, sl]))
            except (scipy.linalg.LinAlgError, ValueError) as exc:
                raise ValueError(f"singular diagonal block {bi}") from exc

    def _slice(self, bi):
        return slice(bi * self.bs, (bi + 1) * self.bs)

    def block_diag_solve(self, rhs):
        u = np.empty(self.n)
        for bi in range(self.nb):
            sl = self._slice(bi)
            u[sl] = scipy.linalg.lu_solve(self.factors[bi], rhs[sl])
        return u

    def block_forward_solve(self, rhs):
        u = np.empty(self.n)
        for bi in range(self.nb):
            sl = self._slice(bi)
            s = rhs[sl]
            if bi > 0:
                s = s - self.dense[sl, : bi * self.bs] @ u[: bi * self.bs]
            u[sl] = scipy.linalg.lu_solve(self.factors[bi], s)
        return u


def split(a, method, omega=None, block_size=None) -> Splitting:
    """Splitting for one of jacobi, gauss_seidel, sor, block_jacobi, block_gs.

    Writing A = D - L - U (D diagonal, L/U strictly triangular):

    * jacobi        M = D,                 N = L + U
    * gauss_seidel  M = D - L,             N = U
    * sor           M = (D - omega L)/omega, N = ((1-omega) D + omega U)/omega
    * block forms   the same with the block partition of A

    SOR requires omega in (0, 2); block sizes must divide n.
    """
    a_apply = as_matvec(a)
    if method in POINT_METHODS:
        ps = _PointStructure(a)
        if method == "jacobi":
            d = ps.diag.copy()
            m_solve = lambda r: r / d
            m_apply = lambda x: d * x
        elif method == "gauss_seidel":
            d = ps.diag.copy()
            m_solve = lambda r: ps.forward_solve(d, r)
            m_apply = lambda x: ps.lower_apply(d, x)
        else:
            if omega is None or not (0.0 < omega < 2.0):
                raise ValueError("sor requires omega in (0, 2)")
            d = ps.diag / omega
            m_solve = lambda r: ps.forward_solve(d, r)
            m_apply = lambda x: ps.lower_apply(d, x)
    elif method in BLOCK_METHODS:
        bs = _BlockStructure(a, block_size)
        if method == "block_jacobi":
            m_solve = bs.block_diag_solve
            m_apply = lambda x: _block_diag_apply(bs, x)
        else:
            m_solve = bs.block_forward_solve
            m_apply = lambda x: _block_lower_apply(bs, x)
    else:
        raise ValueError(f"unknown splitting method {method!r}")
    n_apply = lambda x: m_apply(x) - a_apply(x)
    return Splitting(m_solve=m_solve, a_apply=a_apply, n_apply=n_apply)


def _block_diag_apply(bs, x):
    y = np.empty(bs.n)
    for bi in range(bs.nb):
        sl = bs._slice(bi)
        y[sl] = bs.dense[sl, sl] @ x[sl]
    return y


def _block_lower_apply(bs, x):
    y = _block_diag_apply(bs, x)
    for bi in range(1, bs.nb):
        sl = bs._slice(bi)
        y[sl] += bs.dense[sl, : bi * bs.bs] @ x[: bi * bs.bs]
    return y


def iterate(a, b, cfg: StationaryConfig, x0=None) -> SolveReport:
    """Run the stationary iteration described by ``cfg``.

    The history records true residual 2-norms (recomputed every sweep, not
    recurrence estimates), starting with the initial residual.
    """
    if cfg.method == "ssor":
        return ssor_iterate(a, b, cfg.omega, tol=cfg.tol, tol_kind=cfg.tol_kind,
                            max_iter=cfg.max_iter, x0=x0)
    b = np.asarray(b, dtype=float)
    n = b.size
    sp = split(a, cfg.method, omega=cfg.omega, block_size=cfg.block_size)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = cfg.max_iter if cfg.max_iter is not None else 100 * n
    r = b - sp.a_apply(x)
    history = [float(np.linalg.norm(r))]
    threshold = residual_threshold(cfg.tol, cfg.tol_kind, float(np.linalg.norm(b)), history[0])
    for it in range(max_iter):
        if history[-1] <= threshold:
            return SolveReport(x, it, history, CONVERGED)
        try:
            u = sp.m_solve(r)
        except (np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError) as exc:
            return SolveReport(x, it, history, BREAKDOWN, reason=str(exc))
        x = x + u
        r = b - sp.a_apply(x)
        history.append(float(np.linalg.norm(r)))
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status)


def ssor_iterate(a, b, omega, tol=1e-6, tol_kind="rel_to_r0", max_iter=None,
                 x0=None) -> SolveReport:
    """Symmetric SOR for a symmetric matrix with positive diagonal.

    Internally the system is scaled to Ahat = D^{-1/2} A D^{-1/2} and each
    iteration performs the forward SOR half-sweep followed by the reversed
    (transposed) one; the report is in the original variables and its
    history holds true residual norms of the original system.
    """
    if omega is None or not (0.0 < omega < 2.0):
        raise ValueError("ssor requires omega in (0, 2)")
    b = np.asarray(b, dtype=float)
    n = b.size
    d = _diagonal_of(a, n)
    if np.any(d == 0.0):
        raise ValueError("matrix has a zero diagonal entry")
    if np.any(d < 0.0):
        return SolveReport(np.zeros(n) if x0 is None else np.array(x0, dtype=float),
                           0, [float(np.linalg.norm(b))], BREAKDOWN,
                           reason="negative diagonal entry: D^(1/2) undefined")
    hat = _HatStructure(a, d)
    max_iter = max_iter if max_iter is not None else 100 * n
    a_apply = as_matvec(a)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    xhat = hat.sqd * x
    bhat = b / hat.sqd
    r = b - a_apply(x)
    history = [float(np.linalg.norm(r))]
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), history[0])
    diag_hat = np.full(n, 1.0 / omega)
    for it in range(max_iter):
        if history[-1] <= threshold:
            return SolveReport(x, it, history, CONVERGED)
        rhat = bhat - hat.apply(xhat)
        xhat = xhat + hat.forward_solve(diag_hat, rhat)
        rhat = bhat - hat.apply(xhat)
        xhat = xhat + hat.backward_solve(diag_hat, rhat)
        x = xhat / hat.sqd
        r = b - a_apply(x)
        history.append(float(np.linalg.norm(r)))
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status)


class _HatStructure(_PointStructure):
    """Point structure of Ahat = D^{-1/2} A D^{-1/2} for SSOR sweeps."""

    def __init__(self, a, d):
        super().__init__(a)
        self.sqd = np.sqrt(d)
        inv = 1.0 / self.sqd
        for i in range(self.n):
            for side in (self.lower, self.upper):
                cols, vals = side[i]
                for t, j in enumerate(cols):
                    vals[t] *= inv[i] * inv[j]
        self.diag = self.diag * inv * inv  # all ones, kept for apply()

    def apply(self, x):
        y = self.diag * x
        for i in range(self.n):
            for side in (self.lower, self.upper):
                cols, vals = side[i]
                for j, v in zip(cols, vals):
                    y[i] += v * x[j]
        return y


def _diagonal_of(a, n):
    t = to_triplets(a).coalesced()
    d = np.zeros(n)
    mask = t.rows == t.cols
    d[t.rows[mask]] = t.vals[mask]
    return d


def iteration_matrix_applier(a, method, omega=None, block_size=None):
    """Action v -> inv(M) N v of the iteration matrix G for spectral studies.

    Uses G v = v - inv(M) (A v).  For ``method="ssor"`` the returned applier
    acts in the symmetrically scaled variables (the spectrum is similarity
    invariant, so spectral radii are unaffected).
    """
    if method == "ssor":
        if omega is None or not (0.0 < omega < 2.0):
            raise ValueError("ssor requires omega in (0, 2)")
        n = operator_size(a)
        d = _diagonal_of(a, n)
        if np.any(d <= 0.0):
            raise ValueError("ssor needs a positive diagonal")
        hat = _HatStructure(a, d)
        diag_hat = np.full(n, 1.0 / omega)

        def g_apply(v):
            w = v - hat.forward_solve(diag_hat, hat.apply(v))
            return w - hat.backward_solve(diag_hat, hat.apply(w))

        return g_apply
    sp = split(a, method, omega=omega, block_size=block_size)
    return lambda v: v - sp.m_solve(sp.a_apply(v))


def optimal_omega_estimate(rho_j: float) -> float:
    """Relaxation parameter minimizing the SOR spectral radius.

    For matrices where the Gauss-Seidel radius is the square of the Jacobi
    radius, the optimum is 1 + (rho_j / (1 + sqrt(1 - rho_j**2)))**2.
    """
    if not (0.0 < rho_j < 1.0):
        raise ValueError("rho_j must lie in (0, 1)")
    rho_gs = rho_j * rho_j
    return 1.0 + (rho_j / (1.0 + math.sqrt(1.0 - rho_gs))) ** 2


def diagnostics(a) -> dict:
    """Structural checks: diagonal dominance, M-matrix sign pattern, symmetry.

    Dominance is reported in the weak sense (no row/column exceeds its
    diagonal, at least one is strictly below), which admits the discrete
    Laplacian family.  The sign-pattern flag (positive diagonal,
    nonpositive off-diagonals) is a necessary condition for an M-matrix,
    not a proof.
    """
    dense = to_dense(a)
    absd = np.abs(np.diag(dense))
    row_off = np.sum(np.abs(dense), axis=1) - absd
    col_off = np.sum(np.abs(dense), axis=0) - absd
    off = dense - np.diag(np.diag(dense))
    return {
        "diag_dominant_rows": bool(np.all(absd >= row_off) and np.any(absd > row_off)),
        "diag_dominant_cols": bool(np.all(absd >= col_off) and np.any(absd > col_off)),
        "m_matrix_sign_pattern": bool(np.all(np.diag(dense) > 0) and np.all(off <= 0)),
        "symmetric": bool(np.array_equal(dense, dense.T)),
    }
