"""Lanczos tridiagonalization and MINRES for symmetric (possibly indefinite)
systems.

MINRES minimizes the residual norm over the growing Krylov variety using
the Lanczos factorization, updating the QR of the tridiagonal band with two
stored Givens rotations.  Only the last two basis vectors and the last two
direction vectors are kept; the full basis is never stored.
"""

import numpy as np

from .core import TridiagSym, make_givens
from .report import BREAKDOWN, CONVERGED, MAX_ITER, SolveReport, residual_threshold
from .storage import as_matvec

_ZERO = 1e-14


class LanczosState:
    """Running state of the Lanczos recurrence.

    After ``i`` successful steps, ``gammas`` holds the tridiagonal diagonal,
    ``betas`` the off-diagonal (the trailing entry is the candidate for the
    next step), and ``u_curr`` the latest unit basis vector.  ``terminated``
    becomes true when the new vector is negligible, which signals an
    invariant subspace.
    """

    def __init__(self, a, u1):
        self.a_apply = as_matvec(a)
        u1 = np.asarray(u1, dtype=float)
        nrm = np.linalg.norm(u1)
        if nrm == 0.0:
            raise ValueError("start vector must be nonzero")
        self.u_curr = u1 / nrm
        self.u_prev = np.zeros_like(self.u_curr)
        self.beta_prev = 0.0
        self.gammas = []
        self.betas = []
        self.terminated = False

    def step(self):
        """One Lanczos step; returns (gamma_i, beta_i) or None if terminated."""
        if self.terminated:
            return None
        v = self.a_apply(self.u_curr)
        gamma = float(self.u_curr @ v)
        v = v - gamma * self.u_curr - self.beta_prev * self.u_prev
        beta = float(np.linalg.norm(v))
        self.gammas.append(gamma)
        self.betas.append(beta)
        if beta <= _ZERO:
            self.terminated = True
            return gamma, beta
        self.u_prev = self.u_curr
        self.u_curr = v / beta
        self.beta_prev = beta
        return gamma, beta


def lanczos(a, u1, steps) -> tuple[TridiagSym, list]:
    """Run ``steps`` Lanczos steps; returns the tridiagonal section and basis.

    The basis list holds the generated orthonormal vectors (at most
    ``steps``; fewer if an invariant subspace is found first).  Intended for
    desk-scale checks; the solvers never store the basis.
    """
    state = LanczosState(a, u1)
    basis = [state.u_curr.copy()]
    for _ in range(steps):
        out = state.step()
        if out is None or state.terminated:
            break
        basis.append(state.u_curr.copy())
    m = len(state.gammas)
    return TridiagSym(np.array(state.gammas), np.array(state.betas[: m - 1])), basis[:m]


def minres(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
            callback=None) -> SolveReport:
    """MINRES for symmetric A: minimize ||b - A x|| over the Krylov variety.

    History records |g_i|, the residual norm delivered for free by the
    rotation cascade; the recomputed true residual norms are in
    ``extras["true_residual_norms"]`` so drift between the two is
    observable.  Termination on beta_i = 0 (invariant subspace: the iterate
    is then exact) or on the residual test.  A vanishing diagonal entry of
    the triangular factor cannot occur while beta stays nonzero and is
    flagged defensively as a breakdown.
    """
    a_apply = as_matvec(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = max_iter if max_iter is not None else n
    r0 = b - a_apply(x)
    beta0 = float(np.linalg.norm(r0))
    history = [beta0]
    extras = {"true_residual_norms": [beta0]}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), beta0)
    if beta0 == 0.0:
        return SolveReport(x, 0, history, CONVERGED, extras=extras)
    u = r0 / beta0
    u_prev = np.zeros(n)
    beta_prev = 0.0
    g = beta0
    p_prev1 = np.zeros(n)
    p_prev2 = np.zeros(n)
    rot_prev1 = rot_prev2 = None  # Givens pairs (i-1) and (i-2)
    status, reason = MAX_ITER, None
    it = 0
    for i in range(1, max_iter + 1):
        it = i
        v = a_apply(u)
        gamma = float(u @ v)
        v = v - gamma * u - beta_prev * u_prev
        beta = float(np.linalg.norm(v))
        # Rotate the new tridiagonal column (0, beta_prev, gamma, beta)'.
        r_im2 = 0.0
        r_im1 = beta_prev
        r_ii = gamma
        p = u.copy()
        if i > 2:
            r_im2, r_im1 = rot_prev2.apply(0.0, beta_prev)
            p -= r_im2 * p_prev2
        if i > 1:
            r_im1, r_ii = rot_prev1.apply(r_im1, gamma)
            p -= r_im1 * p_prev1
        rot, r_ii = make_givens(r_ii, beta)
        if r_ii == 0.0:
            status, reason = BREAKDOWN, "singular-R"
            it = i - 1
            break
        p /= r_ii
        xi, g = rot.apply(g, 0.0)
        x = x + xi * p
        history.append(abs(g))
        extras["true_residual_norms"].append(float(np.linalg.norm(b - a_apply(x))))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "g": g})
        if beta <= _ZERO * beta0 or abs(g) <= threshold:
            status = CONVERGED
            break
        u_prev, u = u, v / beta
        beta_prev = beta
        p_prev2, p_prev1 = p_prev1, p
        rot_prev2, rot_prev1 = rot_prev1, rot
    if status is MAX_ITER and history[-1] <= threshold:
        status = CONVERGED
    return SolveReport(x, it, history, status, reason=reason, extras=extras)
