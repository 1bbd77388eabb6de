"""Krylov methods for general nonsingular systems: Arnoldi/GMRES, the
two-sided Lanczos process and its descendants Bi-CG, QMR (two
implementations), CGS and Bi-CGStab, plus the orthogonal bidiagonalization
solver.

The two-sided (nonsymmetric Lanczos) methods trade the long recurrences of
GMRES for three-term ones at the price of possible breakdowns; every zero
test here uses a 1e-14 relative threshold and breakdowns are reported in
the SolveReport, never silently perturbed (no look-ahead).

Left preconditioning is available on every solver through ``c_apply``: the
solver then runs on C A with right-hand side C b (for the transpose action
it uses (C A)' = A' C, valid for symmetric C).
"""

import numpy as np

from .core import make_givens
from .report import BREAKDOWN, CONVERGED, MAX_ITER, SolveReport, residual_threshold
from .storage import as_matvec, as_rmatvec

_ZERO = 1e-14

# Breakdown kinds
INVARIANT_SUBSPACE = "invariant_subspace"
SERIOUS_BREAKDOWN = "serious_breakdown"
LU_BREAKDOWN = "lu_breakdown"
STAGNATION = "stagnation"


def _operator(a, c_apply=None):
    """(matvec, rmatvec) pair, optionally left-preconditioned by symmetric C."""
    mv, rmv = as_matvec(a), None
    try:
        rmv = as_rmatvec(a)
    except ValueError:
        pass
    if c_apply is None:
        return mv, rmv
    pmv = lambda x: c_apply(mv(x))
    prmv = (lambda x: rmv(c_apply(x))) if rmv is not None else None
    return pmv, prmv


def _start(a_apply, b, x0):
    b = np.asarray(b, dtype=float)
    x = np.zeros(b.size) if x0 is None else np.array(x0, dtype=float)
    r0 = b - a_apply(x)
    return b, x, r0


class ArnoldiBasis:
    """Orthonormal Krylov basis with its upper Hessenberg projection.

    ``us`` holds the basis vectors; ``h[j, i]`` the Hessenberg entries
    (column i built at step i, subdiagonal entries nonnegative).
    ``invariant_at`` is the step where the subdiagonal vanished, or None.
    """

    def __init__(self, us, h, invariant_at):
        self.us = us
        self.h = h
        self.invariant_at = invariant_at


def arnoldi(a, u1, steps) -> ArnoldiBasis:
    """Modified Gram-Schmidt Arnoldi process from a unit start vector."""
    a_apply = as_matvec(a)
    u = np.asarray(u1, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("start vector must have unit norm")
    us = [u.copy()]
    cols = []
    invariant_at = None
    for i in range(steps):
        v = a_apply(us[i])
        scale = np.linalg.norm(v)
        col = np.zeros(i + 2)
        for j in range(i + 1):
            hji = float(us[j] @ v)
            col[j] = hji
            v = v - hji * us[j]
        hnext = float(np.linalg.norm(v))
        col[i + 1] = hnext
        cols.append(col)
        if hnext <= _ZERO * max(scale, 1.0):
            invariant_at = i + 1
            break
        us.append(v / hnext)
    m = len(cols)
    h = np.zeros((m + 1, m))
    for i, col in enumerate(cols):
        h[: i + 2, i] = col
    return ArnoldiBasis(us, h, invariant_at)


def gmres(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
          restart=None, c_apply=None, callback=None) -> SolveReport:
    """GMRES: minimize ||b - A x|| over the Arnoldi variety.

    The upper Hessenberg least-squares problem is kept in QR form by one
    new Givens rotation per step, so ||r_i|| = |g_i| is available without
    forming the residual; the history records these values.  With
    ``restart=k`` the basis is discarded and rebuilt from the current
    iterate every k steps (finite-termination is then lost, but memory is
    capped).  A vanished subdiagonal with the residual above tolerance
    means the Krylov space became invariant without containing the
    solution, which cannot happen for nonsingular A and is reported as a
    breakdown.
    """
    a_apply, _ = _operator(a, c_apply)
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r0 = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    cycle = restart if restart is not None else max_iter
    if cycle < 1:
        raise ValueError("restart must be at least 1")
    history = [float(np.linalg.norm(r0))]
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), history[0])
    total = 0
    while True:
        r0 = b_arr - a_apply(x)
        beta = float(np.linalg.norm(r0))
        if beta <= threshold:
            return SolveReport(x, total, history, CONVERGED)
        us = [r0 / beta]
        rcols = []   # columns of the triangular factor
        rots = []    # Givens pairs
        g1 = []      # rotated rhs components
        g = beta
        breakdown = None
        steps_here = 0
        while steps_here < cycle and total < max_iter:
            i = steps_here
            v = a_apply(us[i])
            scale = float(np.linalg.norm(v))
            col = np.zeros(i + 1)
            for j in range(i + 1):
                hji = float(us[j] @ v)
                col[j] = hji
                v = v - hji * us[j]
            hnext = float(np.linalg.norm(v))
            for j in range(i):
                col[j], col[j + 1] = rots[j].apply(col[j], col[j + 1])
            rot, rii = make_givens(col[i], hnext)
            col[i] = rii
            total += 1
            steps_here += 1
            if rii == 0.0:
                # Degenerate column: the least-squares system lost rank and
                # the rotation carries no information; stop before touching g.
                breakdown = "singular-R"
                break
            rots.append(rot)
            rcols.append(col)
            xi, g = rot.apply(g, 0.0)
            g1.append(xi)
            history.append(abs(g))
            if callback is not None:
                callback({"i": total, "g": g})
            lucky = hnext <= _ZERO * max(scale, 1.0)
            if abs(g) <= threshold or lucky:
                if lucky and abs(g) > threshold:
                    breakdown = INVARIANT_SUBSPACE
                break
            us.append(v / hnext)
        # Assemble the iterate from the triangular system R y = g1.
        m = len(rcols)
        if m:
            y = np.zeros(m)
            for j in range(m - 1, -1, -1):
                s = g1[j] - sum(rcols[l][j] * y[l] for l in range(j + 1, m))
                diag = rcols[j][j]
                if diag == 0.0:
                    return SolveReport(x, total, history, BREAKDOWN, reason="singular-R")
                y[j] = s / diag
            x = x + sum(y[j] * us[j] for j in range(m))
        if breakdown:
            if abs(g) <= threshold:
                return SolveReport(x, total, history, CONVERGED)
            return SolveReport(x, total, history, BREAKDOWN, reason=breakdown)
        if abs(g) <= threshold:
            return SolveReport(x, total, history, CONVERGED)
        if total >= max_iter:
            return SolveReport(x, total, history, MAX_ITER)


class BiLanczosState:
    """Two-sided Lanczos recurrence state (biorthonormal u/w sequences)."""

    def __init__(self, a, r0, r0_hat=None):
        self.a_apply = as_matvec(a)
        self.at_apply = as_rmatvec(a)
        r0 = np.asarray(r0, dtype=float)
        r0_hat = r0 if r0_hat is None else np.asarray(r0_hat, dtype=float)
        nrm = float(np.linalg.norm(r0))
        if nrm == 0.0:
            raise ValueError("start vector must be nonzero")
        eta = float(r0 @ r0_hat)
        if abs(eta) <= _ZERO * nrm * float(np.linalg.norm(r0_hat)):
            raise ValueError("start vectors are (nearly) orthogonal")
        self.u_curr = r0 / nrm
        self.w_curr = r0_hat / float(self.u_curr @ r0_hat)
        self.u_prev = np.zeros_like(r0)
        self.w_prev = np.zeros_like(r0)
        self.alpha_prev = 0.0
        self.beta_prev = 0.0
        self.gammas = []
        self.alphas = []
        self.betas = []


def bilanczos_step(state: BiLanczosState):
    """Advance the two-sided Lanczos recurrence by one step.

    Returns ``("ok", (gamma, alpha, beta))`` on success, or
    ``(breakdown_kind, partial)`` where the kind is "invariant_subspace"
    (the u sequence terminated: a right invariant subspace was found) or
    "serious_breakdown" (the new pair is orthogonal and the recurrence
    cannot continue without look-ahead).
    """
    u, w = state.u_curr, state.w_curr
    v = state.a_apply(u)
    gamma = float(w @ v)
    u_hat = v - gamma * u - state.beta_prev * state.u_prev
    w_hat = state.at_apply(w) - gamma * w - state.alpha_prev * state.w_prev
    alpha = float(np.linalg.norm(u_hat))
    state.gammas.append(gamma)
    if alpha <= _ZERO * max(float(np.linalg.norm(v)), 1.0):
        return INVARIANT_SUBSPACE, (gamma, alpha, None)
    u_next = u_hat / alpha
    beta = float(u_next @ w_hat)
    if abs(beta) <= _ZERO * float(np.linalg.norm(w_hat)) or w_hat @ w_hat == 0.0:
        return SERIOUS_BREAKDOWN, (gamma, alpha, beta)
    state.alphas.append(alpha)
    state.betas.append(beta)
    state.u_prev, state.u_curr = state.u_curr, u_next
    state.w_prev, state.w_curr = state.w_curr, w_hat / beta
    state.alpha_prev, state.beta_prev = alpha, beta
    return "ok", (gamma, alpha, beta)


def bicg(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
         c_apply=None, callback=None) -> SolveReport:
    """Bi-conjugate gradients with the shadow start r0_hat = r0.

    One matvec with A and one with A' per iteration.  For spd A the
    iterates coincide with those of plain CG.  The step-length and
    direction coefficients are recorded in ``extras["lambda_hat"]`` and
    ``extras["mu"]`` (they define the residual polynomials that CGS
    squares).  Breakdown when a pivot or an inner product vanishes.
    """
    a_apply, at_apply = _operator(a, c_apply)
    if at_apply is None:
        raise ValueError("bicg needs the transpose action of the operator")
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    r_hat = r.copy()
    p, p_hat = r.copy(), r.copy()
    eta = float(r_hat @ r)
    history = [float(np.linalg.norm(r))]
    extras = {"lambda_hat": [], "mu": []}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), history[0])
    scale0 = history[0] ** 2
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        if abs(eta) <= _ZERO ** 2 * scale0:
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        v = a_apply(p)
        v_hat = at_apply(p_hat)
        d = float(p_hat @ v)
        if abs(d) <= _ZERO * float(np.linalg.norm(p_hat)) * float(np.linalg.norm(v)):
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        lam = eta / d
        x = x + lam * p
        r = r - lam * v
        r_hat = r_hat - lam * v_hat
        eta_new = float(r_hat @ r)
        mu = eta_new / eta
        p = r + mu * p
        p_hat = r_hat + mu * p_hat
        eta = eta_new
        extras["lambda_hat"].append(lam)
        extras["mu"].append(mu)
        history.append(float(np.linalg.norm(r)))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy(),
                      "r_hat": r_hat.copy(), "p": p.copy(), "p_hat": p_hat.copy()})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)


def qmr(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
        c_apply=None, callback=None) -> SolveReport:
    """Quasi-minimal residual method on the two-sided Lanczos factorization.

    Minimizes the reduced least-squares surrogate; |g_i| (the history
    entries) is the quasi-residual, an upper proxy for the true residual up
    to the conditioning of the nonorthogonal basis.  True residual norms
    are recorded in ``extras["true_residual_norms"]``.  On symmetric A with
    the default shadow start the method coincides with MINRES.
    """
    a_apply, at_apply = _operator(a, c_apply)
    if at_apply is None:
        raise ValueError("qmr needs the transpose action of the operator")
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r0 = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    beta0 = float(np.linalg.norm(r0))
    history = [beta0]
    extras = {"true_residual_norms": [beta0]}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), beta0)
    if beta0 <= threshold:
        return SolveReport(x, 0, history, CONVERGED, extras=extras)
    u = r0 / beta0
    w = u.copy()
    u_prev = np.zeros(n)
    w_prev = np.zeros(n)
    alpha_prev = beta_prev = 0.0
    g = beta0
    p_prev1 = np.zeros(n)
    p_prev2 = np.zeros(n)
    rot_prev1 = rot_prev2 = None
    status, reason = MAX_ITER, None
    it = 0
    for i in range(1, max_iter + 1):
        it = i
        v = a_apply(u)
        gamma = float(w @ v)
        u_hat = v - gamma * u - beta_prev * u_prev
        alpha = float(np.linalg.norm(u_hat))
        r_im2, r_im1, r_ii = 0.0, beta_prev, gamma
        p = u.copy()
        if i > 2:
            r_im2, r_im1 = rot_prev2.apply(0.0, beta_prev)
            p -= r_im2 * p_prev2
        if i > 1:
            r_im1, r_ii = rot_prev1.apply(r_im1, gamma)
            p -= r_im1 * p_prev1
        rot, r_ii = make_givens(r_ii, alpha)
        if r_ii == 0.0:
            status, reason, it = BREAKDOWN, "singular-R", i - 1
            break
        p /= r_ii
        xi, g = rot.apply(g, 0.0)
        x = x + xi * p
        history.append(abs(g))
        extras["true_residual_norms"].append(float(np.linalg.norm(b_arr - a_apply(x))))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "g": g})
        if alpha <= _ZERO * max(float(np.linalg.norm(v)), 1.0) or abs(g) <= threshold:
            status = CONVERGED
            break
        u_next = u_hat / alpha
        w_hat = at_apply(w) - gamma * w - alpha_prev * w_prev
        beta = float(u_next @ w_hat)
        if abs(beta) <= _ZERO * float(np.linalg.norm(w_hat)):
            status, reason = BREAKDOWN, SERIOUS_BREAKDOWN
            break
        u_prev, u = u, u_next
        w_prev, w = w, w_hat / beta
        alpha_prev, beta_prev = alpha, beta
        p_prev2, p_prev1 = p_prev1, p
        rot_prev2, rot_prev1 = rot_prev1, rot
    if status is MAX_ITER and history[-1] <= threshold:
        status = CONVERGED
    return SolveReport(x, it, history, status, reason=reason, extras=extras)


def qmr_alt(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
            c_apply=None, callback=None) -> SolveReport:
    """QMR on the LU-normalized two-sided factorization (cheaper variant).

    Works with the rescaled pair (q, z) so the projected matrix becomes
    lower bidiagonal and only one old rotation is needed per step.  The
    price is an extra breakdown mode: the implicit LU factorization of the
    tridiagonal matrix may not exist, surfacing as a zero pivot ell_i
    ("lu_breakdown") while plain :func:`qmr` proceeds.
    """
    a_apply, at_apply = _operator(a, c_apply)
    if at_apply is None:
        raise ValueError("qmr_alt needs the transpose action of the operator")
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r0 = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    beta0 = float(np.linalg.norm(r0))
    history = [beta0]
    extras = {"true_residual_norms": [beta0]}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), beta0)
    if beta0 <= threshold:
        return SolveReport(x, 0, history, CONVERGED, extras=extras)
    u = r0 / beta0
    v = u.copy()
    q = u.copy()
    z = u.copy()
    f = 1.0
    g = beta0
    p_prev = np.zeros(n)
    rot_prev = None
    status, reason = MAX_ITER, None
    it = 0
    for i in range(1, max_iter + 1):
        it = i
        q_hat = a_apply(q)
        num = float(z @ q_hat)
        if abs(num) <= _ZERO * float(np.linalg.norm(z)) * float(np.linalg.norm(q_hat)):
            status, reason, it = BREAKDOWN, LU_BREAKDOWN, i - 1
            break
        ell = num / f
        u_hat = q_hat - ell * u
        alpha = float(np.linalg.norm(u_hat))
        r_im1, r_ii = 0.0, ell
        p = q.copy()
        if i > 1:
            r_im1, r_ii = rot_prev.apply(0.0, ell)
            p -= r_im1 * p_prev
        rot, r_ii = make_givens(r_ii, alpha)
        if r_ii == 0.0:
            status, reason, it = BREAKDOWN, "singular-R", i - 1
            break
        p /= r_ii
        xi, g = rot.apply(g, 0.0)
        x = x + xi * p
        history.append(abs(g))
        extras["true_residual_norms"].append(float(np.linalg.norm(b_arr - a_apply(x))))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "g": g})
        if alpha <= _ZERO * max(float(np.linalg.norm(q_hat)), 1.0) or abs(g) <= threshold:
            status = CONVERGED
            break
        u = u_hat / alpha
        v = (at_apply(z) - ell * v) / alpha
        f_next = float(v @ u)
        if abs(f_next) <= _ZERO:
            status, reason = BREAKDOWN, SERIOUS_BREAKDOWN
            break
        phi = alpha * f_next / (ell * f)
        q = u - phi * q
        z = v - phi * z
        f = f_next
        p_prev = p
        rot_prev = rot
    if status is MAX_ITER and history[-1] <= threshold:
        status = CONVERGED
    return SolveReport(x, it, history, status, reason=reason, extras=extras)


def bidiagonalize(a, u1_hat, steps):
    """Orthogonal bidiagonalization A V = U L, A' U = V L'.

    Returns ``(us, vs, alphas, betas)`` built by the alternating recurrence
    (L lower bidiagonal with diagonal alphas and subdiagonal betas).  A zero
    beta terminates the process early.  Note A'A V = V (L'L): the process
    is the symmetric Lanczos recurrence on the normal-equations matrix in
    disguise, with its squared conditioning.
    """
    a_apply = as_matvec(a)
    at_apply = as_rmatvec(a)
    u1_hat = np.asarray(u1_hat, dtype=float)
    nrm = float(np.linalg.norm(u1_hat))
    if nrm == 0.0:
        raise ValueError("start vector must be nonzero")
    u = u1_hat / nrm
    us, vs, alphas, betas = [u.copy()], [], [], []
    v_prev = 0.0
    beta_prev = 0.0
    for i in range(steps):
        v_hat = at_apply(u) - beta_prev * v_prev
        alpha = float(np.linalg.norm(v_hat))
        if alpha <= _ZERO * nrm:
            break
        v = v_hat / alpha
        alphas.append(alpha)
        vs.append(v.copy())
        if i == steps - 1:
            break
        u_hat = a_apply(v) - alpha * u
        beta = float(np.linalg.norm(u_hat))
        if beta <= _ZERO * nrm:
            break
        betas.append(beta)
        u = u_hat / beta
        us.append(u.copy())
        v_prev, beta_prev = v, beta
    return us, vs, np.array(alphas), np.array(betas)


def bidiag_solve(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
                 c_apply=None, callback=None) -> SolveReport:
    """Solver on the bidiagonalization started from the initial residual.

    The Galerkin conditions give the one-term update x_i = x_{i-1} + xi_i v_i
    with xi_1 = ||r_0||/alpha_1 and xi_i = -xi_{i-1} beta_{i-1}/alpha_i; a
    vanishing beta means the exact solution has been reached.  Equivalent to
    symmetric Lanczos on the normal equations, so the effective condition
    number is kappa(A)**2; of little practical interest but a useful
    cross-check.  History records true residual norms.
    """
    a_apply, at_apply = _operator(a, c_apply)
    if at_apply is None:
        raise ValueError("bidiag_solve needs the transpose action of the operator")
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r0 = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    beta0 = float(np.linalg.norm(r0))
    history = [beta0]
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), beta0)
    if beta0 <= threshold:
        return SolveReport(x, 0, history, CONVERGED)
    u = r0 / beta0
    v_prev = 0.0
    beta_prev = 0.0
    xi = None
    status, reason = MAX_ITER, None
    it = 0
    for i in range(1, max_iter + 1):
        it = i
        v_hat = at_apply(u) - beta_prev * v_prev
        alpha = float(np.linalg.norm(v_hat))
        if alpha <= _ZERO * beta0:
            status, reason, it = BREAKDOWN, "zero-alpha", i - 1
            break
        v = v_hat / alpha
        xi = beta0 / alpha if i == 1 else -xi * beta_prev / alpha
        x = x + xi * v
        history.append(float(np.linalg.norm(b_arr - a_apply(x))))
        if callback is not None:
            callback({"i": i, "x": x.copy()})
        if history[-1] <= threshold:
            status = CONVERGED
            break
        u_hat = a_apply(v) - alpha * u
        beta = float(np.linalg.norm(u_hat))
        if beta <= _ZERO * beta0:
            status = CONVERGED  # vanishing beta means the iterate is exact
            break
        u = u_hat / beta
        v_prev, beta_prev = v, beta
    if status is MAX_ITER and history[-1] <= threshold:
        status = CONVERGED
    return SolveReport(x, it, history, status, reason=reason)


def cgs(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
        c_apply=None, callback=None) -> SolveReport:
    """Conjugate gradients squared: Bi-CG's residual polynomial applied twice.

    Two matvecs with A per iteration and none with A', at the price of
    squaring whatever oscillation Bi-CG exhibits.  Breakdown when an inner
    product against the fixed shadow residual vanishes.
    """
    a_apply, _ = _operator(a, c_apply)
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    r_hat0 = r.copy()
    p = r.copy()
    gvec = r.copy()
    eta = float(r_hat0 @ r)
    history = [float(np.linalg.norm(r))]
    extras = {"lambda_hat": [], "mu": []}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), history[0])
    scale0 = max(history[0] ** 2, 1e-300)
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        if abs(eta) <= _ZERO ** 2 * scale0:
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        v = a_apply(p)
        d = float(r_hat0 @ v)
        if abs(d) <= _ZERO * history[0] * float(np.linalg.norm(v)):
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        lam = eta / d
        w = gvec - lam * v
        x = x + lam * (gvec + w)
        r = r - lam * a_apply(gvec + w)
        eta_new = float(r_hat0 @ r)
        mu = eta_new / eta
        gvec = r + mu * w
        p = gvec + mu * (w + mu * p)
        eta = eta_new
        extras["lambda_hat"].append(lam)
        extras["mu"].append(mu)
        history.append(float(np.linalg.norm(r)))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy()})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)


def bicgstab(a, b, x0=None, tol=1e-8, tol_kind="rel_to_b", max_iter=None,
             c_apply=None, callback=None) -> SolveReport:
    """Bi-CGStab: Bi-CG polynomial smoothed by a one-step residual minimizer.

    Each iteration takes the Bi-CG half step and then damps with the
    steepest-descent parameter omega_i = t'r / t't (t = A r_half), the
    value minimizing the new residual norm.  Both the half-step and
    full-step residual norms are checked against the tolerance and both are
    recorded: history interleaves them, with matching labels in
    ``extras["history_tags"]`` ("initial", then "half"/"full" pairs).
    Coefficient sequences are recorded for consistency checks.  A vanishing
    t with a nonzero half residual leaves omega undefined (breakdown).
    """
    a_apply, _ = _operator(a, c_apply)
    b_in = np.asarray(b, dtype=float)
    rhs = c_apply(b_in) if c_apply is not None else b_in
    b_arr, x, r = _start(a_apply, rhs, x0)
    n = b_arr.size
    max_iter = max_iter if max_iter is not None else n
    r_hat0 = r.copy()
    p = r.copy()
    eta = float(r_hat0 @ r)
    history = [float(np.linalg.norm(r))]
    extras = {"history_tags": ["initial"], "etas": [eta],
              "lambda_hat": [], "omegas": [], "mu": []}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b_arr)), history[0])
    scale0 = max(history[0] ** 2, 1e-300)
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        if abs(eta) <= _ZERO ** 2 * scale0:
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        v = a_apply(p)
        d = float(r_hat0 @ v)
        if abs(d) <= _ZERO * history[0] * float(np.linalg.norm(v)):
            return SolveReport(x, i - 1, history, BREAKDOWN,
                               reason=SERIOUS_BREAKDOWN, extras=extras)
        lam = eta / d
        x_half = x + lam * p
        r_half = r - lam * v
        half_norm = float(np.linalg.norm(r_half))
        history.append(half_norm)
        extras["history_tags"].append("half")
        if half_norm <= threshold:
            return SolveReport(x_half, i, history, CONVERGED, extras=extras)
        t = a_apply(r_half)
        t_norm2 = float(t @ t)
        if t_norm2 <= (_ZERO * half_norm) ** 2:
            return SolveReport(x_half, i, history, BREAKDOWN,
                               reason="omega-zero", extras=extras)
        omega = float(t @ r_half) / t_norm2
        x = x_half + omega * r_half
        r = r_half - omega * t
        eta_new = float(r_hat0 @ r)
        mu = (eta_new / eta) * (lam / omega)
        p = r + mu * (p - omega * v)
        eta = eta_new
        history.append(float(np.linalg.norm(r)))
        extras["history_tags"].append("full")
        extras["etas"].append(eta)
        extras["lambda_hat"].append(lam)
        extras["omegas"].append(omega)
        extras["mu"].append(mu)
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy(),
                      "r_half": r_half.copy(), "t": t.copy(), "omega": omega})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)
