"""Conjugate gradients: convergence, eigenvalue estimates, conditioning.

Three classic observations at desk scale: CG beats every stationary method
on the Poisson problem; the tridiagonal matrix assembled from its
coefficients delivers the extreme eigenvalues of A after a couple dozen
iterations; and on the Hilbert matrix a tiny residual hides a large error.
"""

import numpy as np

import krylov as K

inst = K.poisson_test(20)
rep = K.cg(inst.a, inst.b, tol=1e-6, tol_kind="abs", max_iter=10 * inst.n)
print(f"Poisson N=20 (n={inst.n}): CG reached ||r|| = {rep.final_residual:.2e} "
      f"in {rep.iterations} iterations")

tbar = K.assemble_tbar(rep, steps=25)
lo, hi = K.sturm_extreme_eigs(tbar)
print(f"extreme eigenvalues from 25 CG steps: {lo:.5e}, {hi:.5f}")
print(f"analytic values:                      "
      f"{4 - 4*np.cos(np.pi/21):.5e}, {4 + 4*np.cos(np.pi/21):.5f}")

print("\nHilbert conditioning study (n = 10, b chosen so x* = ones):")
for shift in (1.0, 0.0):
    h = K.hilbert(10, shift=shift)
    rep = K.cg(h.a, h.b, tol=1e-12, tol_kind="abs", max_iter=40)
    res = np.linalg.norm(h.b - h.a @ rep.x)
    err = np.linalg.norm(rep.x - h.x_true)
    kappa = np.linalg.cond(h.a)
    print(f"  shift={shift}: kappa ~ {kappa:.1e}, {rep.iterations} iterations, "
          f"||r|| = {res:.1e}, ||x - x*|| = {err:.1e}")
print("with kappa ~ 1e13 the residual says nothing about the error;")
print("the bound ||e|| <= ||r||/lambda_min makes the gap quantitative:")
h = K.hilbert(10)
rep = K.cg(h.a, h.b, tol=1e-12, tol_kind="abs", max_iter=40)
r = h.b - h.a @ rep.x
lam_min = np.linalg.eigvalsh(h.a).min()
_, bound = K.stopping_check(r, 1e-10, "abs", lambda_min_est=lam_min)
print(f"  ||r|| = {np.linalg.norm(r):.1e}  ->  error bound {bound:.1e} "
      f"(actual error {np.linalg.norm(rep.x - h.x_true):.1e})")
