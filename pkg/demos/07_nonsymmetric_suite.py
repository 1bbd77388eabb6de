"""The nonsymmetric Krylov methods side by side.

GMRES minimizes the residual but pays with a growing basis; the two-sided
Lanczos family (Bi-CG, QMR, CGS, Bi-CGStab) keeps three-term recurrences
and risks breakdowns instead.  On a well-behaved sparse instance all of
them finish quickly; on an ill-conditioned one Bi-CG oscillates wildly,
CGS squares the oscillation, QMR smooths it, and restarts slow GMRES down.
"""

import numpy as np

import krylov as K

inst = K.random_sparse(100, 0.04, seed=1)
print(f"instance: {inst.label}, n = {inst.n}")
print(f"{'method':<12} {'status':<10} {'iters':>5}  final ||r||")
for name, solver, kwargs in [
        ("gmres", K.gmres, {}),
        ("gmres(5)", K.gmres, {"restart": 5}),
        ("bicg", K.bicg, {}),
        ("qmr", K.qmr, {}),
        ("qmr-alt", K.qmr_alt, {}),
        ("cgs", K.cgs, {}),
        ("bicgstab", K.bicgstab, {}),
        ("bidiag", K.bidiag_solve, {})]:
    rep = solver(inst.a, inst.b, tol=1e-10, tol_kind="rel_to_b",
                 max_iter=400, **kwargs)
    true = np.linalg.norm(inst.b - inst.a.matvec(rep.x))
    print(f"{name:<12} {rep.status:<10} {rep.iterations:>5}  {true:.2e}")

print("\nresidual oscillation on an ill-conditioned dense instance:")
rng = np.random.default_rng(3)
q1, _ = np.linalg.qr(rng.standard_normal((40, 40)))
q2, _ = np.linalg.qr(rng.standard_normal((40, 40)))
a = q1 @ np.diag(np.logspace(0, 5, 40)) @ q2.T
b = rng.standard_normal(40)
for name, solver in (("bicg", K.bicg), ("qmr", K.qmr)):
    rep = solver(a, b, tol=1e-10, tol_kind="rel_to_b", max_iter=150)
    h = np.array(rep.history)
    ups = int(np.sum(h[1:] > h[:-1]))
    print(f"  {name:<5} peak/initial residual ratio {h.max() / h[0]:9.1f}, "
          f"{ups} upward moves in {len(h) - 1} steps")
print("(QMR minimizes a surrogate of the same quantity, hence the smoother curve)")
