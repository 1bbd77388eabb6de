"""Conjugate-gradient family for symmetric positive definite systems.

Includes the underlying three-term factorization A U = U T with
B-orthogonal columns, plain CG in both its direct and its efficient
two-coefficient formulation, the tridiagonal matrix assembled from the CG
coefficients whose extreme eigenvalues approximate those of A, residual
stopping rules, and the classical energy-norm convergence bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import TridiagSym
from .report import BREAKDOWN, CONVERGED, MAX_ITER, SolveReport, residual_threshold
from .storage import as_matvec

_ZERO = 1e-14  # relative breakdown threshold for "exact zero" tests


@dataclass
class LanczosLikeFactorization:
    """Vectors and coefficients of the factorization A U = U T, U' B U = D.

    T is tridiagonal with unit subdiagonal, diagonal ``gammas`` and
    superdiagonal ``betas``; ``ds`` are the B-norms squared of the columns.
    """

    us: list
    gammas: np.ndarray
    betas: np.ndarray
    ds: np.ndarray


def factorize_aut(a, b_op, u1, steps=None) -> LanczosLikeFactorization:
    """Three-term recurrence building A U = U T with B-orthogonal columns.

    ``b_op`` defines the inner product (it must be spd and commute with A
    for the orthogonality to hold; the caller is responsible for that).
    Stops early when the next vector is negligible relative to the first,
    which signals an invariant subspace and is a success, not an error.
    """
    a_apply = as_matvec(a)
    b_apply = as_matvec(b_op)
    u = np.array(u1, dtype=float)
    n = u.size
    steps = n if steps is None else min(steps, n)
    scale = np.linalg.norm(u)
    us, gammas, betas, ds = [], [], [], []
    u_prev = np.zeros(n)
    beta_prev = 0.0
    for i in range(steps):
        if np.linalg.norm(u) <= _ZERO * scale:
            break
        us.append(u.copy())
        v = a_apply(u)
        z = b_apply(u)
        d = float(u @ z)
        gamma = float(v @ z) / d
        gammas.append(gamma)
        ds.append(d)
        if i > 0:
            beta_prev = ds[i] / ds[i - 1]
            betas.append(beta_prev)
        u, u_prev = v - gamma * u - beta_prev * u_prev, u
    return LanczosLikeFactorization(us, np.array(gammas), np.array(betas), np.array(ds))


def cg_basic(a, b, x0=None, tol=1e-10, tol_kind="abs", max_iter=None,
             callback=None) -> SolveReport:
    """Conjugate gradients in the direct (unnormalized-direction) form.

    Keeps the raw recurrence directions u_i and computes the step length as
    lambda_i = u_i' r_{i-1} / u_i' A u_i.  Mostly of reference value; the
    efficient form :func:`cg` is preferred.  History records the recurrence
    residual norms.
    """
    a_apply = as_matvec(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = max_iter if max_iter is not None else n
    r = b - a_apply(x)
    u = r.copy()
    u_prev = np.zeros(n)
    d_prev = beta_prev = 0.0
    history = [float(np.linalg.norm(r))]
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), history[0])
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold:
            return SolveReport(x, i - 1, history, CONVERGED)
        v = a_apply(u)
        d = float(u @ v)
        if d <= 0.0:
            return SolveReport(x, i - 1, history, BREAKDOWN, reason="not-spd")
        lam = float(u @ r) / d
        x = x + lam * u
        r = r - lam * v
        gamma = float(v @ v) / d
        if i > 1:
            beta_prev = d / d_prev
        u, u_prev = v - gamma * u - beta_prev * u_prev, u
        d_prev = d
        history.append(float(np.linalg.norm(r)))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy(), "u": u_prev.copy()})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status)


def cg(a, b, x0=None, tol=1e-10, tol_kind="abs", max_iter=None,
       callback=None) -> SolveReport:
    """Conjugate gradients, efficient two-coefficient form.

    Per iteration: eta_i = r_i' r_i, step length lambda_i = eta_{i-1} / d_i
    with d_i = p_i' A p_i, and direction update p_{i+1} = r_i + mu_i p_i
    with mu_i = eta_i / eta_{i-1}.

    The history records true residual norms ||b - A x_i|| (recomputed with
    an extra matvec each iteration, affordable at desk scale, so that
    finite-arithmetic drift of the recurrence is observable); stopping uses
    the recurrence residual.  ``extras`` carries the coefficient sequences
    needed to rebuild the tridiagonal eigenvalue-estimation matrix:
    ``lambda_hat``, ``mu``, ``d_hat``, ``recurrence_residuals``.
    """
    a_apply = as_matvec(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = max_iter if max_iter is not None else n
    r = b - a_apply(x)
    p = r.copy()
    eta = float(r @ r)
    rec = [math.sqrt(eta)]
    history = [float(np.linalg.norm(r))]
    extras = {"lambda_hat": [], "mu": [], "d_hat": [], "recurrence_residuals": rec}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), history[0])
    b_scale = float(r @ r)
    for i in range(1, max_iter + 1):
        if rec[-1] <= threshold or eta <= _ZERO ** 2 * b_scale:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        v = a_apply(p)
        d = float(p @ v)
        if d <= 0.0:
            return SolveReport(x, i - 1, history, BREAKDOWN, reason="not-spd", extras=extras)
        lam = eta / d
        x = x + lam * p
        r = r - lam * v
        eta_new = float(r @ r)
        mu = eta_new / eta
        extras["lambda_hat"].append(lam)
        extras["mu"].append(mu)
        extras["d_hat"].append(d)
        p = r + mu * p
        eta = eta_new
        rec.append(math.sqrt(eta))
        history.append(float(np.linalg.norm(b - a_apply(x))))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy(), "p": p.copy()})
    status = CONVERGED if rec[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)


def assemble_tbar(report: SolveReport, steps=None) -> TridiagSym:
    """Tridiagonal matrix, similar to a section of A, from CG coefficients.

    With d_i = p_i' A p_i, mu_i and the recurrence residual norms ||r_i||
    recorded by :func:`cg`, the symmetric tridiagonal matrix

        diag:     a_1 = d_1/||r_0||**2,
                  a_{i+1} = (d_{i+1} + d_i mu_i**2)/||r_i||**2
        offdiag:  -b_i = -d_i mu_i/(||r_{i-1}|| ||r_i||)

    has eigenvalues interlacing those of A; its extremes converge quickly
    to the extreme eigenvalues of A as the iteration proceeds.  If the run
    hit a zero residual the matrix is truncated at the convergence point.
    """
    d_hat = report.extras["d_hat"]
    mu = report.extras["mu"]
    rec = report.extras["recurrence_residuals"]
    m = len(d_hat) if steps is None else min(steps, len(d_hat))
    # Usable size limited by nonzero residual norms.
    while m > 1 and rec[m - 1] == 0.0:
        m -= 1
    if m < 1:
        raise ValueError("need at least one recorded CG iteration")
    diag = np.empty(m)
    off = np.empty(max(m - 1, 0))
    diag[0] = d_hat[0] / rec[0] ** 2
    for i in range(1, m):
        diag[i] = (d_hat[i] + d_hat[i - 1] * mu[i - 1] ** 2) / rec[i] ** 2
        off[i - 1] = -d_hat[i - 1] * mu[i - 1] / (rec[i - 1] * rec[i])
    return TridiagSym(diag, off)


def stopping_check(r, tol, kind, b_norm=None, r0_norm=None, lambda_min_est=None):
    """Residual stopping decision, optionally with an error bound.

    ``kind`` is one of "abs", "rel_to_b", "rel_to_r0", "error_bound".  The
    last one uses ||e|| <= ||r|| / lambda_min and stops when that bound
    drops below ``tol``; it requires a positive smallest-eigenvalue
    estimate.  Returns ``(stop, error_bound)`` where the bound is None
    unless an estimate was supplied.
    """
    r_norm = float(np.linalg.norm(r)) if np.ndim(r) else float(abs(r))
    bound = None
    if lambda_min_est is not None:
        if lambda_min_est <= 0.0:
            raise ValueError("lambda_min estimate must be positive")
        bound = r_norm / lambda_min_est
    if kind == "abs":
        return r_norm <= tol, bound
    if kind == "rel_to_b":
        return r_norm <= tol * b_norm, bound
    if kind == "rel_to_r0":
        return r_norm <= tol * r0_norm, bound
    if kind == "error_bound":
        if bound is None:
            raise ValueError("error_bound stopping needs lambda_min_est")
        return bound <= tol, bound
    raise ValueError(f"unknown stopping kind {kind!r}")


def convergence_bound(kappa: float, i: int) -> float:
    """Energy-norm reduction bound 4 ((sqrt(k)-1)/(sqrt(k)+1))**(2i)."""
    if kappa < 1.0:
        raise ValueError("condition number must be at least 1")
    ratio = (math.sqrt(kappa) - 1.0) / (math.sqrt(kappa) + 1.0)
    return 4.0 * ratio ** (2 * i)


def estimate_extremes_by_cg(a, b, iters=25, tol_eig=1e-10):
    """Extreme-eigenvalue estimates of spd A from a short CG warm-up.

    Runs ``iters`` CG steps (zero start, no residual stopping), assembles
    the tridiagonal coefficient matrix and returns its Sturm extremes.
    A few dozen iterations usually give satisfactory estimates.
    """
    from .core import sturm_extreme_eigs

    report = cg(a, b, tol=0.0, tol_kind="abs", max_iter=iters)
    tbar = assemble_tbar(report)
    return sturm_extreme_eigs(tbar, tol=tol_eig)
