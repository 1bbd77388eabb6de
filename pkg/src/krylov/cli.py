"""Command-line harness: problem generation, solving, spectral-radius
studies, preconditioner comparisons, and eigenvalue estimation.

Subcommands: generate, solve, spectrum, precond-compare, eigs.  Output is
CSV (with a ``# key=value ...`` config echo line) and MatrixMarket files;
numbers carry 17 significant digits so identical arguments and seed yield
byte-identical files.  Exit codes: 0 converged/ok, 2 usage error, 3 not
converged, 4 breakdown.
"""

import argparse
import math
import os
import sys
import time

import numpy as np

from . import nonsymmetric as nonsym
from . import precond as pcmod
from . import problems, stationary, storage, symmetric
from .cg import assemble_tbar, cg, cg_basic, estimate_extremes_by_cg
from .chebyshev import semi_iterative
from .core import spectral_radius_estimate, sturm_extreme_eigs
from .report import BREAKDOWN, CONVERGED

_EXIT_NOT_CONVERGED = 3
_EXIT_BREAKDOWN = 4

_STATIONARY = {
    "jacobi": "jacobi",
    "gauss-seidel": "gauss_seidel",
    "sor": "sor",
    "ssor": "ssor",
    "block-jacobi": "block_jacobi",
    "block-gs": "block_gs",
}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _config_line(pairs) -> str:
    return "# " + " ".join(f"{k}={_fmt(v)}" for k, v in pairs)


def _write_csv(path, config_pairs, header, rows):
    lines = [_config_line(config_pairs), header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _resolve_seed(args):
    env = os.environ.get("KRYLOV_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _load_problem(args, parser):
    if getattr(args, "matrix", None):
        with open(args.matrix) as fh:
            t = storage.read_matrix_market(fh.read())
        a = storage.build(t, "row")
        if getattr(args, "rhs", None):
            b = _read_rhs(args.rhs, t.n)
        else:
            b = a.matvec(np.ones(t.n))
        return problems.ProblemInstance(a, b, None, f"file({args.matrix})"), None
    name = args.problem
    seed = _resolve_seed(args)
    if name == "poisson":
        return problems.poisson_test(args.n), args.n
    if name == "cavity":
        return problems.cavity_laplace(args.n, args.delta), args.n
    if name == "hilbert":
        return problems.hilbert(args.n, shift=args.shift), None
    if name == "indefinite":
        return problems.indefinite_kron(args.n), args.n
    if name == "random":
        return problems.random_sparse(args.n, args.density, seed=seed), None
    parser.error(f"unknown problem {name!r}")


def _read_rhs(path, n):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("%%MatrixMarket"):
        raise ValueError(f"{path}: not a MatrixMarket file")
    body = [ln for ln in lines[1:] if not ln.lstrip().startswith("%")]
    nrows, ncols, nnz = (int(t) for t in body[0].split())
    if nrows != n or ncols != 1:
        raise ValueError(f"{path}: expected a {n} x 1 vector")
    b = np.zeros(n)
    for ln in body[1:1 + nnz]:
        i, _, v = ln.split()
        b[int(i) - 1] = float(v)
    return b


def _write_rhs(path, b):
    lines = ["%%MatrixMarket matrix coordinate real general",
             f"{b.size} 1 {b.size}"]
    for i, v in enumerate(b):
        lines.append(f"{i + 1} 1 {v:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_symmetric_mtx(path, t):
    t = t.coalesced()
    keep = t.rows >= t.cols
    lines = ["%%MatrixMarket matrix coordinate real symmetric",
             f"{t.n} {t.n} {int(np.count_nonzero(keep))}"]
    for i, j, v in zip(t.rows[keep], t.cols[keep], t.vals[keep]):
        lines.append(f"{i + 1} {j + 1} {v:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_generate(args, parser):
    inst, _ = _load_problem(args, parser)
    t = storage.to_triplets(inst.a).coalesced()
    diags = stationary.diagnostics(inst.a)
    if isinstance(inst.a, np.ndarray):
        print("warning: matrix is dense; MatrixMarket output stores every entry",
              file=sys.stderr)
    if diags["symmetric"]:
        _write_symmetric_mtx(args.out, t)
    else:
        with open(args.out, "w") as fh:
            fh.write(storage.write_matrix_market(t))
    rhs_path = args.rhs_out or _default_rhs_path(args.out)
    _write_rhs(rhs_path, inst.b)
    print(f"n={t.n} nnz={t.nnz} matrix={args.out} rhs={rhs_path}")
    for key, val in sorted(diags.items()):
        print(f"{key}={val}")
    return 0


def _default_rhs_path(out):
    root, ext = os.path.splitext(out)
    return f"{root}_rhs{ext or '.mtx'}"


def _parse_method(spec):
    """Split "gmres,restart=5" into ("gmres", {"restart": 5})."""
    parts = spec.split(",")
    opts = {}
    for p in parts[1:]:
        k, _, v = p.partition("=")
        opts[k.strip()] = int(v)
    return parts[0].strip(), opts


def _build_preconditioner(spec, inst, band, block_size, parser):
    if spec in (None, "none"):
        return None, None
    if spec == "jacobi":
        return pcmod.jacobi_preconditioner(inst.a), None
    if spec in ("ic", "mic"):
        if band is None:
            parser.error(f"--precond {spec} needs the band offset (use --band)")
        factory = pcmod.ic0_pentadiagonal if spec == "ic" else pcmod.mic_pentadiagonal
        factors = factory(inst.a, band)
        return (lambda r: pcmod.apply_ic_solve(factors, r)), None
    if spec == "block":
        if block_size is None:
            block_size = int(round(math.sqrt(inst.n)))
        factors = pcmod.block_precond(inst.a, block_size)
        return (lambda r: pcmod.apply_block_solve(factors, r)), None
    if spec.startswith("poly:"):
        return None, int(spec.split(":", 1)[1])
    parser.error(f"unknown preconditioner {spec!r}")


def cmd_solve(args, parser):
    inst, problem_band = _load_problem(args, parser)
    method, mopts = _parse_method(args.method)
    restart = mopts.get("restart", args.restart)
    band = args.band if args.band is not None else problem_band
    tol, tol_kind, max_iter = args.tol, args.tol_kind, args.max_iter
    diags = stationary.diagnostics(inst.a)
    symmetric_methods = {"cg", "cg-basic", "minres", "chebyshev"}
    if method in symmetric_methods and not diags["symmetric"]:
        print(f"warning: method {method} assumes a symmetric matrix", file=sys.stderr)

    c_apply, poly_m = _build_preconditioner(args.precond, inst, band,
                                            args.block_size, parser)
    t0 = time.perf_counter()
    try:
        report = _dispatch_solve(method, inst, args, parser, restart=restart,
                                 tol=tol, tol_kind=tol_kind, max_iter=max_iter,
                                 c_apply=c_apply, poly_m=poly_m)
    except (ValueError, pcmod.IcBreakdownError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_BREAKDOWN
    wall_ms = (time.perf_counter() - t0) * 1e3

    rows, header = _history_rows(method, report)
    pairs = [("command", "solve"), ("problem", inst.label), ("method", args.method),
             ("precond", args.precond or "none"), ("tol", tol),
             ("tol_kind", tol_kind)]
    _write_csv(args.out, pairs, header, rows)
    status = report.status if report.status != BREAKDOWN else f"breakdown({report.reason})"
    print(f"{status} {report.iterations} {report.final_residual:.17g} "
          f"{wall_ms:.3f}")
    if report.status == CONVERGED:
        return 0
    return _EXIT_BREAKDOWN if report.status == BREAKDOWN else _EXIT_NOT_CONVERGED


def _dispatch_solve(method, inst, args, parser, restart, tol, tol_kind,
                    max_iter, c_apply, poly_m):
    a, b = inst.a, inst.b
    n = inst.n
    if method in _STATIONARY:
        cfg = stationary.StationaryConfig(method=_STATIONARY[method],
                                          omega=args.omega,
                                          block_size=args.block_size,
                                          tol=tol, tol_kind=tol_kind,
                                          max_iter=max_iter)
        return stationary.iterate(a, b, cfg)
    if method == "chebyshev":
        if args.alpha is None or args.beta is None:
            parser.error("chebyshev needs --alpha and --beta")
        base = stationary.split(a, _STATIONARY.get(args.base, args.base),
                                omega=args.omega, block_size=args.block_size)
        return semi_iterative(base, b, args.alpha, args.beta, tol=tol,
                                      tol_kind=tol_kind, max_iter=max_iter)
    if method == "cg-basic":
        return cg_basic(a, b, tol=tol, tol_kind=tol_kind, max_iter=max_iter)
    if method == "cg":
        if poly_m is not None:
            lmin, lmax = estimate_extremes_by_cg(a, b, iters=min(25, n))
            return pcmod.solve_poly_pcg(a, b, poly_m, lmin, lmax, tol=tol,
                                        tol_kind=tol_kind, max_iter=max_iter)
        if c_apply is not None:
            return pcmod.pcg(a, b, c_apply, tol=tol, tol_kind=tol_kind,
                             max_iter=max_iter)
        return cg(a, b, tol=tol, tol_kind=tol_kind, max_iter=max_iter)
    if method == "minres":
        return symmetric.minres(a, b, tol=tol, tol_kind=tol_kind, max_iter=max_iter)
    krylov_map = {
        "gmres": nonsym.gmres,
        "bicg": nonsym.bicg,
        "qmr": nonsym.qmr,
        "qmr-alt": nonsym.qmr_alt,
        "bidiag": nonsym.bidiag_solve,
        "cgs": nonsym.cgs,
        "bicgstab": nonsym.bicgstab,
    }
    if method not in krylov_map:
        parser.error(f"unknown method {method!r}")
    kwargs = dict(tol=tol, tol_kind=tol_kind, max_iter=max_iter, c_apply=c_apply)
    if method == "gmres":
        kwargs["restart"] = restart
        if restart is not None and max_iter is None:
            kwargs["max_iter"] = 10 * n  # restarts forfeit finite termination
    return krylov_map[method](a, b, **kwargs)


def _history_rows(method, report):
    true_norms = report.extras.get("true_residual_norms")
    tags = report.extras.get("history_tags")
    if tags is not None:  # bicgstab: interleaved half/full steps
        rows = []
        k = 0
        for tag, h in zip(tags, report.history):
            if tag == "half":
                rows.append((k + 0.5, h, 1))
            elif tag == "full":
                k += 1
                rows.append((float(k), h, 0))
            else:
                rows.append((0.0, h, 0))
        return rows, "iter,residual_norm,half_step"
    if true_norms is not None:  # minres/qmr family: true norm + quasi residual
        rows = [(float(i), t, q)
                for i, (t, q) in enumerate(zip(true_norms, report.history))]
        return rows, "iter,residual_norm,quasi_residual"
    rows = [(float(i), h) for i, h in enumerate(report.history)]
    return rows, "iter,residual_norm"


def cmd_spectrum(args, parser):
    inst, _ = _load_problem(args, parser)
    n = inst.n
    rows = []
    if args.methods:
        for name in args.methods.split(","):
            name = name.strip()
            if name not in _STATIONARY or name == "ssor":
                parser.error(f"spectrum --methods does not support {name!r}")
            g = stationary.iteration_matrix_applier(
                inst.a, _STATIONARY[name], omega=args.omega,
                block_size=args.block_size)
            rows.append((name, spectral_radius_estimate(g, n, m_max=args.power_steps)))
        header = "method,rho"
    elif args.sweep:
        if not (0.0 < args.omega_min < args.omega_max < 2.0):
            parser.error("sweep bounds must satisfy 0 < min < max < 2")
        omega = args.omega_min
        while omega <= args.omega_max + 1e-12:
            g = stationary.iteration_matrix_applier(
                inst.a, "ssor" if args.sweep == "ssor" else "sor",
                omega=omega, block_size=args.block_size)
            rows.append((omega, spectral_radius_estimate(g, n, m_max=args.power_steps)))
            omega += args.omega_step
        header = "omega,rho"
    else:
        parser.error("spectrum needs --methods or --sweep")
    pairs = [("command", "spectrum"), ("problem", inst.label),
             ("sweep", args.sweep or "none"), ("methods", args.methods or "none"),
             ("omega_step", args.omega_step)]
    _write_csv(args.out, pairs, header, rows)
    return 0


def cmd_precond_compare(args, parser):
    n_list = [int(tok) for tok in args.n_list.split(",")]
    methods = [tok.strip() for tok in args.methods.split(",")]
    rows = []
    for N in n_list:
        inst = problems.poisson_test(N)
        for name in methods:
            if name == "cg":
                rep = cg(inst.a, inst.b, tol=args.tol, tol_kind="abs",
                               max_iter=100 * inst.n)
            elif name in ("ic", "mic"):
                factory = pcmod.ic0_pentadiagonal if name == "ic" else pcmod.mic_pentadiagonal
                factors = factory(inst.a, N)
                rep = pcmod.pcg(inst.a, inst.b,
                                lambda r: pcmod.apply_ic_solve(factors, r),
                                tol=args.tol, tol_kind="abs", max_iter=100 * inst.n)
            elif name == "block":
                factors = pcmod.block_precond(inst.a, N)
                rep = pcmod.pcg(inst.a, inst.b,
                                lambda r: pcmod.apply_block_solve(factors, r),
                                tol=args.tol, tol_kind="abs", max_iter=100 * inst.n)
            elif name.startswith("poly:"):
                m = int(name.split(":", 1)[1])
                lmin, lmax = estimate_extremes_by_cg(
                    inst.a, inst.b, iters=min(25, inst.n))
                rep = pcmod.solve_poly_pcg(inst.a, inst.b, m, lmin, lmax,
                                           tol=args.tol, tol_kind="abs",
                                           max_iter=100 * inst.n)
            else:
                parser.error(f"unknown comparison method {name!r}")
            rows.append((N, name, rep.iterations))
    pairs = [("command", "precond-compare"), ("tol", args.tol),
             ("methods", args.methods)]
    _write_csv(args.out, pairs, "n,method,iterations", rows)
    return 0


def cmd_eigs(args, parser):
    inst, _ = _load_problem(args, parser)
    if args.estimates != "cg":
        parser.error(f"unknown estimator {args.estimates!r}")
    report = cg(inst.a, inst.b, tol=0.0, tol_kind="abs",
                      max_iter=min(args.iters, inst.n))
    tbar = assemble_tbar(report)
    lam_min, lam_max = sturm_extreme_eigs(tbar)
    pairs = [("command", "eigs"), ("problem", inst.label), ("iters", args.iters)]
    _write_csv(args.out, pairs, "which,value",
               [("lambda_min", lam_min), ("lambda_max", lam_max)])
    return 0


def _add_problem_args(p):
    p.add_argument("--problem", choices=["poisson", "cavity", "hilbert",
                                         "indefinite", "random"])
    p.add_argument("--matrix", help="MatrixMarket file instead of a generator")
    p.add_argument("--rhs", help="MatrixMarket n x 1 right-hand side file")
    p.add_argument("--n", type=int, default=10, help="problem size parameter")
    p.add_argument("--delta", type=float, default=0.3, help="cavity outlet width")
    p.add_argument("--shift", type=float, default=0.0, help="hilbert diagonal shift")
    p.add_argument("--density", type=float, default=0.04, help="random density")
    p.add_argument("--seed", type=int, default=0,
                   help="generator seed (KRYLOV_SEED overrides)")


def build_parser():
    parser = argparse.ArgumentParser(prog="krylov",
                                     description="sparse iterative solver harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a problem as MatrixMarket files")
    _add_problem_args(p)
    p.add_argument("--out", required=True, help="matrix output path")
    p.add_argument("--rhs-out", help="rhs output path (default: <out>_rhs)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve a problem, CSV residual history")
    _add_problem_args(p)
    p.add_argument("--method", required=True,
                   help="jacobi|gauss-seidel|sor|ssor|block-jacobi|block-gs|"
                        "chebyshev|cg|cg-basic|minres|gmres[,restart=k]|bicg|"
                        "qmr|qmr-alt|bidiag|cgs|bicgstab")
    p.add_argument("--precond", default="none",
                   help="none|jacobi|ic|mic|block|poly:m (cg and krylov methods)")
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--base", default="jacobi", help="chebyshev baseline splitting")
    p.add_argument("--band", type=int, default=None, help="ic/mic band offset")
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--restart", type=int, default=None, help="gmres restart length")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--tol-kind", default="rel_to_r0",
                   choices=["abs", "rel_to_b", "rel_to_r0"])
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectrum", help="spectral radii of iteration matrices")
    _add_problem_args(p)
    p.add_argument("--methods", help="comma list: jacobi,gauss-seidel,block-jacobi,block-gs")
    p.add_argument("--sweep", choices=["sor", "ssor"])
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--omega-min", type=float, default=0.05)
    p.add_argument("--omega-max", type=float, default=1.95)
    p.add_argument("--omega-step", type=float, default=0.05)
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--power-steps", type=int, default=1000)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("precond-compare",
                       help="iteration counts of CG vs preconditioned CG")
    p.add_argument("--n-list", default="10,20,30,40,50")
    p.add_argument("--methods", default="cg,ic,mic")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_precond_compare)

    p = sub.add_parser("eigs", help="extreme eigenvalue estimates")
    _add_problem_args(p)
    p.add_argument("--estimates", default="cg")
    p.add_argument("--iters", type=int, default=25)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eigs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
