"""Preconditioned CG and the preconditioner families it uses.

A preconditioner is exposed as an applier ``s = C @ r`` with C symmetric
positive definite and C approximately inv(A).  Four families are built
here: the diagonal (Jacobi) scaling, incomplete Cholesky on the
pentadiagonal Stieltjes structure (plain and modified), a block incomplete
factorization for block-tridiagonal matrices, and the Chebyshev polynomial
approximation of inv(A).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .report import BREAKDOWN, CONVERGED, MAX_ITER, SolveReport, residual_threshold
from .storage import as_matvec, to_dense, to_triplets


class IcBreakdownError(RuntimeError):
    """Nonpositive pivot met while building an incomplete factorization."""


def pcg(a, b, c_apply=None, x0=None, tol=1e-10, tol_kind="abs", max_iter=None,
        callback=None) -> SolveReport:
    """Preconditioned conjugate gradients.

    ``c_apply`` maps a residual to the preconditioned residual s = C r (the
    identity when omitted, which reproduces plain CG).  Per iteration:
    eta_i = r_i' s_i, step length eta_{i-1} / (p_i' A p_i), direction
    p_{i+1} = s_i + mu_i p_i.  A negative eta signals a non-spd
    preconditioner and stops the run as a breakdown.

    History records the Euclidean norms ||r_i|| of the recurrence residual
    (stopping uses these); ``extras["c_norms"]`` records sqrt(eta_i), the
    C-norm of the residual.
    """
    a_apply = as_matvec(a)
    if c_apply is None:
        c_apply = lambda r: r
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = max_iter if max_iter is not None else n
    r = b - a_apply(x)
    s = c_apply(r)
    eta = float(r @ s)
    history = [float(np.linalg.norm(r))]
    extras = {"c_norms": [math.sqrt(max(eta, 0.0))]}
    if eta < 0.0:
        return SolveReport(x, 0, history, BREAKDOWN, reason="precond-not-spd", extras=extras)
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), history[0])
    scale = history[0] ** 2
    p = s.copy()
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold or abs(eta) <= 1e-28 * scale:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        v = a_apply(p)
        d = float(p @ v)
        if d <= 0.0:
            return SolveReport(x, i - 1, history, BREAKDOWN, reason="not-spd", extras=extras)
        lam = eta / d
        x = x + lam * p
        r = r - lam * v
        s = c_apply(r)
        eta_new = float(r @ s)
        if eta_new < 0.0:
            return SolveReport(x, i, history, BREAKDOWN, reason="precond-not-spd", extras=extras)
        mu = eta_new / eta
        p = s + mu * p
        eta = eta_new
        history.append(float(np.linalg.norm(r)))
        extras["c_norms"].append(math.sqrt(eta))
        if callback is not None:
            callback({"i": i, "x": x.copy(), "r": r.copy(), "s": s.copy(), "p": p.copy()})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)


def jacobi_preconditioner(a):
    """Diagonal scaling C = inv(diag(A))."""
    t = to_triplets(a).coalesced()
    d = np.zeros(t.n)
    mask = t.rows == t.cols
    d[t.rows[mask]] = t.vals[mask]
    if np.any(d == 0.0):
        raise ValueError("matrix has a zero diagonal entry")
    return lambda r: r / d


# ---------------------------------------------------------------------------
# Incomplete Cholesky on the pentadiagonal Stieltjes structure
# ---------------------------------------------------------------------------

@dataclass
class IcFactors:
    """Incomplete LDL' factors of a pentadiagonal matrix with band offset N.

    Only the pivot vector ``dt`` is new storage: the factored form
    (L D)(inv(D))(L D)' reuses the matrix's own sub-band entries ``b``
    (first subdiagonal) and ``c`` (N-th subdiagonal) as the strict lower
    triangle of (L D).
    """

    n: int
    band: int  # offset of the outer band
    a: np.ndarray   # diagonal of A
    b: np.ndarray   # b[i] = A[i, i-1] (b[0] = 0)
    c: np.ndarray   # c[i] = A[i, i-N] (c[i] = 0 for i < N)
    dt: np.ndarray  # pivots


def _pentadiagonal_bands(a, band):
    """Extract (diag, sub1, subN) from a pentadiagonal Stieltjes matrix."""
    t = to_triplets(a).coalesced()
    n = t.n
    diag = np.zeros(n)
    b = np.zeros(n)
    c = np.zeros(n)
    for i, j, v in zip(t.rows, t.cols, t.vals):
        off = int(j - i)
        if off == 0:
            diag[i] = v
        elif off == -1:
            b[i] = v
        elif off == -band:
            c[i] = v
        elif off not in (1, band):
            raise ValueError(f"entry ({i}, {j}) off the pentadiagonal pattern")
    if np.any(diag <= 0.0) or np.any(b > 0.0) or np.any(c > 0.0):
        raise ValueError("expected positive diagonal and nonpositive bands")
    return diag, b, c


def ic0_pentadiagonal(a, band) -> IcFactors:
    """Incomplete Cholesky keeping exactly the sparsity pattern of A.

    Pivot recurrence: dt_i = a_i - b_i**2/dt_{i-1} - c_i**2/dt_{i-band}
    (terms with out-of-range indices dropped).  For a Stieltjes matrix all
    pivots stay positive; a nonpositive pivot raises IcBreakdownError.
    """
    diag, b, c = _pentadiagonal_bands(a, band)
    n = diag.size
    dt = np.empty(n)
    for i in range(n):
        v = diag[i]
        if i >= 1 and b[i] != 0.0:
            v -= b[i] * b[i] / dt[i - 1]
        if i >= band and c[i] != 0.0:
            v -= c[i] * c[i] / dt[i - band]
        if v <= 0.0:
            raise IcBreakdownError(f"ic-pivot: nonpositive pivot {v:g} at row {i}")
        dt[i] = v
    return IcFactors(n, band, diag, b, c, dt)


def mic_pentadiagonal(a, band) -> IcFactors:
    """Modified incomplete Cholesky: dropped fill compensated on the diagonal.

    Pivot recurrence:

        dt_i = a_i - b_i (b_i + c_{i+band-1}) / dt_{i-1}
                   - c_i (c_i + b_{i-band+1}) / dt_{i-band}

    with out-of-range b/c read as zero.  The compensation makes the error
    matrix R = M - A have zero row sums and nonpositive eigenvalues, so the
    smallest eigenvalue of inv(M) A is exactly 1 (constant eigenvector).
    """
    diag, b, c = _pentadiagonal_bands(a, band)
    n = diag.size

    def b_at(i):
        return b[i] if 0 <= i < n else 0.0

    def c_at(i):
        return c[i] if 0 <= i < n else 0.0

    dt = np.empty(n)
    for i in range(n):
        v = diag[i]
        if i >= 1:
            v -= b[i] * (b[i] + c_at(i + band - 1)) / dt[i - 1]
        if i >= band:
            v -= c[i] * (c[i] + b_at(i - band + 1)) / dt[i - band]
        if v <= 0.0:
            raise IcBreakdownError(f"ic-pivot: nonpositive pivot {v:g} at row {i}")
        dt[i] = v
    return IcFactors(n, band, diag, b, c, dt)


def apply_ic_solve(f: IcFactors, r):
    """Solve M s = r with M = (L D) inv(D) (L D)'.

    Forward sweep with (L D) (diagonal dt, strict lower = the b and c bands
    of A), scaling by dt, then the transposed backward sweep.
    """
    n, N = f.n, f.band
    b, c, dt = f.b, f.c, f.dt
    y = np.empty(n)
    for i in range(n):
        s = r[i]
        if i >= 1:
            s -= b[i] * y[i - 1]
        if i >= N:
            s -= c[i] * y[i - N]
        y[i] = s / dt[i]
    y *= dt  # w = D y
    s_out = np.empty(n)
    for i in range(n - 1, -1, -1):
        s = y[i]
        if i + 1 < n:
            s -= b[i + 1] * s_out[i + 1]
        if i + N < n:
            s -= c[i + N] * s_out[i + N]
        s_out[i] = s / dt[i]
    return s_out


def ic_matrix_apply(f: IcFactors, x):
    """Multiply M x for the factored M (used to check identities like M @ 1)."""
    n, N = f.n, f.band
    b, c, dt = f.b, f.c, f.dt
    u = dt * x
    u[:-1] += b[1:] * x[1:]
    if n > N:
        u[:-N] += c[N:] * x[N:]
    u /= dt
    w = dt * u
    w[1:] += b[1:] * u[:-1]
    if n > N:
        w[N:] += c[N:] * u[:-N]
    return w


# ---------------------------------------------------------------------------
# Block incomplete factorization for block-tridiagonal matrices
# ---------------------------------------------------------------------------

@dataclass
class BlockFactors:
    block_size: int
    d_blocks: list       # approximate pivot blocks (dense)
    sub_blocks: list     # B_i, sub_blocks[i] couples block i to block i-1
    factors: list        # LU factorizations of the pivot blocks


def block_precond(a, block_size, sigma_rule="tridiagonal") -> BlockFactors:
    """Block incomplete factorization M = L inv(D) L' of a block-tridiagonal A.

    The pivot blocks follow D_i = A_i - B_i S_{i-1} B_i' where S_{i-1}
    approximates inv(D_{i-1}): with ``sigma_rule="tridiagonal"`` it is the
    tridiagonal part of the exact block inverse (computed column by column
    from solves against unit vectors); ``sigma_rule="full"`` keeps the whole
    inverse, which reproduces the exact block factorization and hence M = A.
    """
    dense = to_dense(a)
    n = dense.shape[0]
    bs = block_size
    if bs < 1 or n % bs != 0:
        raise ValueError(f"block size {bs} does not divide n={n}")
    nb = n // bs
    d_blocks, sub_blocks, factors = [], [None], []
    sigma_prev = None
    for bi in range(nb):
        sl = slice(bi * bs, (bi + 1) * bs)
        d_i = dense[sl, sl].copy()
        if bi > 0:
            sub = dense[sl, (bi - 1) * bs: bi * bs].copy()
            sub_blocks.append(sub)
            d_i -= sub @ sigma_prev @ sub.T
        try:
            lu = scipy.linalg.lu_factor(d_i)
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise IcBreakdownError(f"block pivot failure at block {bi}") from exc
        if not np.all(np.isfinite(lu[0])):
            raise IcBreakdownError(f"block pivot failure at block {bi}")
        d_blocks.append(d_i)
        factors.append(lu)
        inv = scipy.linalg.lu_solve(lu, np.eye(bs))
        if sigma_rule == "tridiagonal":
            sigma_prev = np.triu(np.tril(inv, 1), -1)
        elif sigma_rule == "full":
            sigma_prev = inv
        else:
            raise ValueError(f"unknown sigma rule {sigma_rule!r}")
    return BlockFactors(bs, d_blocks, sub_blocks, factors)


def apply_block_solve(f: BlockFactors, r):
    """Solve M s = r by block forward/backward substitution."""
    bs = f.block_size
    nb = len(f.d_blocks)
    n = bs * nb
    y = np.empty(n)
    for bi in range(nb):
        sl = slice(bi * bs, (bi + 1) * bs)
        rhs = r[sl]
        if bi > 0:
            rhs = rhs - f.sub_blocks[bi] @ y[(bi - 1) * bs: bi * bs]
        y[sl] = scipy.linalg.lu_solve(f.factors[bi], rhs)
    for bi in range(nb):
        sl = slice(bi * bs, (bi + 1) * bs)
        y[sl] = f.d_blocks[bi] @ y[sl]
    s = np.empty(n)
    for bi in range(nb - 1, -1, -1):
        sl = slice(bi * bs, (bi + 1) * bs)
        rhs = y[sl]
        if bi + 1 < nb:
            rhs = rhs - f.sub_blocks[bi + 1].T @ s[(bi + 1) * bs: (bi + 2) * bs]
        s[sl] = scipy.linalg.lu_solve(f.factors[bi], rhs)
    return s


# ---------------------------------------------------------------------------
# Chebyshev polynomial preconditioner
# ---------------------------------------------------------------------------

@dataclass
class PolyPrecond:
    """Degree-(m-1) Chebyshev approximation C of inv(A) on [lmin, lmax].

    The preconditioned operator is p_m(A) = C(A) A = I - T_m(mu(A))/T_m(mu(0))
    with mu the affine map sending [lmin, lmax] to [-1, 1]; its spectrum lies
    in [1 - eps_m, 1 + eps_m] with eps_m = 1/T_m(mu(0)).
    """

    m: int
    lmin: float
    lmax: float
    t_mu0: np.ndarray   # T_k(mu(0)), k = 0..m
    gammas: np.ndarray  # expansion coefficients of C in second-kind polynomials

    @property
    def eps(self) -> float:
        return 1.0 / float(self.t_mu0[self.m])


def poly_precond_build(m, lmin, lmax) -> PolyPrecond:
    """Coefficients of the degree-(m-1) Chebyshev inverse approximation.

    All gammas lie in (0, 4/(lmax - lmin)) because the T_k(mu(0)) sequence
    is positive and strictly increasing.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not (0.0 < lmin < lmax):
        raise ValueError("need 0 < lmin < lmax")
    span = lmax - lmin
    mu0 = (lmax + lmin) / span
    t = np.empty(m + 1)
    t[0] = 1.0
    t[1] = mu0
    for k in range(1, m):
        t[k + 1] = 2.0 * mu0 * t[k] - t[k - 1]
    gammas = np.empty(m)
    gammas[0] = 2.0 / (span * t[m])
    for k in range(1, m):
        gammas[k] = 4.0 * t[k] / (span * t[m])
    return PolyPrecond(m, lmin, lmax, t, gammas)


def _g_apply(p: PolyPrecond, a_apply):
    """Action of G = 2 mu(A): v -> (2 (lmax+lmin) v - 4 A v)/(lmax - lmin)."""
    span = p.lmax - p.lmin
    shift = 2.0 * (p.lmax + p.lmin) / span
    return lambda v: shift * v - 4.0 / span * a_apply(v)


def poly_apply_pmA(p: PolyPrecond, a, v):
    """Product p_m(A) v = v - T_m(mu(A)) v / T_m(mu(0)), at m matvec cost.

    T_m(mu(A)) v is built by the three-term recurrence y_0 = v,
    y_1 = G v / 2, y_{k+1} = G y_k - y_{k-1} on G = 2 mu(A).
    """
    a_apply = as_matvec(a)
    g = _g_apply(p, a_apply)
    v = np.asarray(v, dtype=float)
    y_prev = v
    y = 0.5 * g(v)
    for _ in range(1, p.m):
        y, y_prev = g(y) - y_prev, y
    return v - y / p.t_mu0[p.m]


def poly_apply_Cb(p: PolyPrecond, a, b):
    """Product C(A) b by the Clenshaw recurrence, at m - 1 matvec cost.

    y_{-1} = 0, y_0 = gamma_0 b, y_k = G y_{k-1} - y_{k-2} + gamma_k b;
    the result is y_{m-1}.
    """
    a_apply = as_matvec(a)
    g = _g_apply(p, a_apply)
    b = np.asarray(b, dtype=float)
    y_prev = np.zeros_like(b)
    y = p.gammas[0] * b
    for k in range(1, p.m):
        y, y_prev = g(y) - y_prev + p.gammas[k] * b, y
    return y


def poly_monomial_coeffs(m, lmin, lmax):
    """Monomial coefficients of p_m: p_m(x) = sum_i c[i] x**(m-i).

    Computed in exact rational arithmetic and returned as floats.  The
    coefficients are huge and of alternating sign even for modest m, which
    is exactly why the power basis is not used for evaluation; this routine
    exists to demonstrate that ill-conditioning.
    """
    lmin_f = Fraction(lmin)
    lmax_f = Fraction(lmax)
    span = lmax_f - lmin_f
    # mu(x) = (lmax + lmin - 2x)/span as polynomial coefficients [x^0, x^1].
    mu = [(lmax_f + lmin_f) / span, Fraction(-2, 1) / span]

    def poly_mul(p1, p2):
        out = [Fraction(0)] * (len(p1) + len(p2) - 1)
        for i, ci in enumerate(p1):
            for j, cj in enumerate(p2):
                out[i + j] += ci * cj
        return out

    def poly_axpy(alpha, p1, p2):
        out = [alpha * c for c in p1]
        for j, cj in enumerate(p2):
            if j >= len(out):
                out.append(cj)
            else:
                out[j] += cj
        return out

    t_prev = [Fraction(1)]
    t_curr = mu
    for _ in range(1, m):
        t_next = poly_axpy(Fraction(-1), t_prev, poly_mul([Fraction(2)], poly_mul(mu, t_curr)))
        # poly_axpy computed -t_prev + 2 mu t_curr
        t_prev, t_curr = t_curr, t_next
    t_m = t_curr if m >= 1 else t_prev
    # Evaluate T_m at mu(0) = mu[0] by the scalar recurrence.
    mu0 = mu[0]
    tp, tc = Fraction(1), mu0
    for _ in range(1, m):
        tp, tc = tc, 2 * mu0 * tc - tp
    t_m_mu0 = tc if m >= 1 else tp
    # p_m(x) = 1 - T_m(mu(x))/T_m(mu(0)); t_m holds ascending-power coeffs.
    p = [-c / t_m_mu0 for c in t_m]
    p[0] += 1
    # Return descending powers, length m + 1.
    p = p + [Fraction(0)] * (m + 1 - len(p))
    return np.array([float(c) for c in reversed(p)])


def solve_poly_pcg(a, b, m, lmin, lmax, x0=None, tol=1e-10, tol_kind="abs",
                   max_iter=None, callback=None) -> SolveReport:
    """CG on the polynomially preconditioned system p_m(A) x = C(A) b.

    Plain CG runs with the formal substitutions A <- p_m(A) (m matvecs per
    application) and b <- C(A) b (computed once by Clenshaw); the solution
    of the original system is unchanged.  History and stopping use the true
    residual of the *original* system, one extra matvec per iteration, so
    runs are comparable with other preconditioners.  If the supplied
    [lmin, lmax] fails to enclose the spectrum the preconditioned operator
    may be indefinite and the run can break down or diverge.
    """
    p = poly_precond_build(m, lmin, lmax)
    a_apply = as_matvec(a)
    b = np.asarray(b, dtype=float)
    n = b.size
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    max_iter = max_iter if max_iter is not None else n
    pm = lambda v: poly_apply_pmA(p, a, v)
    b_t = poly_apply_Cb(p, a, b)
    r_t = b_t - pm(x)
    d_t = r_t.copy()
    eta = float(r_t @ r_t)
    history = [float(np.linalg.norm(b - a_apply(x)))]
    extras = {"transformed_residuals": [math.sqrt(eta)], "eps_m": p.eps}
    threshold = residual_threshold(tol, tol_kind, float(np.linalg.norm(b)), history[0])
    scale = max(eta, 1e-300)
    for i in range(1, max_iter + 1):
        if history[-1] <= threshold or eta <= 1e-28 * scale:
            return SolveReport(x, i - 1, history, CONVERGED, extras=extras)
        v = pm(d_t)
        dd = float(d_t @ v)
        if dd <= 0.0:
            return SolveReport(x, i - 1, history, BREAKDOWN, reason="not-spd", extras=extras)
        lam = eta / dd
        x = x + lam * d_t
        r_t = r_t - lam * v
        eta_new = float(r_t @ r_t)
        d_t = r_t + (eta_new / eta) * d_t
        eta = eta_new
        history.append(float(np.linalg.norm(b - a_apply(x))))
        extras["transformed_residuals"].append(math.sqrt(eta))
        if callback is not None:
            callback({"i": i, "x": x.copy()})
    status = CONVERGED if history[-1] <= threshold else MAX_ITER
    return SolveReport(x, max_iter, history, status, extras=extras)
