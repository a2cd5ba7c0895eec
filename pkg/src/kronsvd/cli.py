"""Command-line front end.

Exit codes: 0 success, 2 usage or input error, 3 numeric failure or a
materialization refused by the cap (``KRONSVD_CAP``).

PSF and image arguments accept a file (``.pgm`` or ``.csv``) or a built-in
generator written ``NAME:N``: ``delta``, ``speckle``, ``motion`` and
``atmospheric`` for PSFs, ``satellite`` for images.
"""

import argparse
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baseline import baseline_build, baseline_pinv_apply
from .bounds import BoundReport, bound_sweep
from .exceptions import CapacityError, DimensionError, ParseError, check_cap
from .fileio import atomic_write_text, format_float, save_image, write_csv_table
from .kron_core import kron_sum_dense
from .krylov import ksum_operator, make_preconditioner, pcgls
from .ksum import DEFAULT_RANK_TOL, Psf, kron_rank_truncate, psf_kron_sum
from .oracle import dense_svd
from .problems import (
    atmospheric_psf,
    delta_psf,
    load_image,
    load_psf,
    make_problem,
    motion_psf,
    satellite_image,
    speckle_psf,
)
from .regularization import FilterSpec, filtered_solve
from .serialize import load_any_tsvd, load_kron_sum, save_kron_sum, save_tsvd
from .tsvd import build

log = logging.getLogger("kronsvd")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

_PSF_GENERATORS = {
    "delta": delta_psf,
    "speckle": speckle_psf,
    "motion": motion_psf,
    "atmospheric": atmospheric_psf,
}
_GEN = re.compile(r"^([a-z]+):(\d+)$")


class UsageError(Exception):
    pass


def _parse_center(text):
    if text is None:
        return None
    try:
        row, col = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--center expects ROW,COL, got {text!r}") from exc
    return row, col


def resolve_psf(spec, center=None):
    m = _GEN.match(spec)
    if m and not Path(spec).exists():
        name, n = m.group(1), int(m.group(2))
        if name not in _PSF_GENERATORS:
            raise UsageError(f"unknown PSF generator {name!r}; choose from {sorted(_PSF_GENERATORS)}")
        psf = _PSF_GENERATORS[name](n)
        return psf if center is None else Psf(psf.array, center)
    if not Path(spec).is_file():
        raise UsageError(f"PSF file not found: {spec}")
    return load_psf(spec, center)


def resolve_image(spec):
    m = _GEN.match(spec)
    if m and not Path(spec).exists():
        if m.group(1) != "satellite":
            raise UsageError(f"unknown image generator {m.group(1)!r}; only 'satellite' exists")
        return satellite_image(int(m.group(2)))
    if not Path(spec).is_file():
        raise UsageError(f"image file not found: {spec}")
    return load_image(spec)


def _write_config(out, args):
    items = sorted((k, v) for k, v in vars(args).items() if k != "func")
    text = "\n".join(f"{k}: {v}" for k, v in items) + "\n"
    atomic_write_text(Path(out) / "config.txt", text)


def _ksum_from_args(args):
    if getattr(args, "ksum", None):
        if not Path(args.ksum, "manifest.txt").is_file():
            raise UsageError(f"decomposition not found: {args.ksum}")
        return load_kron_sum(args.ksum), None
    if not getattr(args, "psf", None):
        raise UsageError("either --psf or --ksum is required")
    psf = resolve_psf(args.psf, _parse_center(args.center))
    return psf_kron_sum(psf, getattr(args, "r", None)), psf


def _default_k(N, k):
    k = min(N, 600) if k is None else k
    if not 1 <= k <= N:
        raise UsageError(f"--k must be in [1, {N}], got {k}")
    return k


def _problem(args, psf):
    if args.image is None:
        raise UsageError("--image is required")
    x = resolve_image(args.image)
    if x.shape != (psf.n, psf.n):
        raise UsageError(f"image shape {x.shape} does not match PSF shape {(psf.n, psf.n)}")
    if args.noise < 0:
        raise UsageError(f"--noise must be nonnegative, got {args.noise}")
    return make_problem(psf, x, args.noise, args.seed)


def cmd_decompose(args):
    out = Path(args.out)
    psf = resolve_psf(args.psf, _parse_center(args.center))
    ksum = psf_kron_sum(psf, args.r, args.tol)
    save_kron_sum(out, ksum)
    w = ksum.weights
    write_csv_table(
        out / "weights.csv",
        ("index", "weight", "relative"),
        [(i + 1, w[i], w[i] / w[0]) for i in range(w.size)],
    )
    _write_config(out, args)
    print(f"n={ksum.n} r={ksum.r} R={ksum.kron_rank_full}")
    tail = w[-1] / w[0] if w.size > 1 else 1.0
    print(f"weight decay: w1={format_float(w[0])} w_r/w1={format_float(tail)}")
    return EXIT_OK


def _spectrum_rows(fact, method, oracle_s=None):
    sig = np.asarray(fact.sigma)
    rows = []
    for i, s in enumerate(sig):
        row = [i + 1, s]
        if oracle_s is not None:
            rel = abs(abs(s) - oracle_s[i]) / oracle_s[i] if oracle_s[i] > 0 else abs(s)
            row += [oracle_s[i], rel]
        rows.append(row)
    return rows


def _build(method, ksum, k):
    if method == "reordered":
        return build(ksum, k)
    if method == "baseline":
        return baseline_build(ksum)
    raise UsageError(f"method {method!r} has no implicit factorization")


def cmd_tsvd(args):
    out = Path(args.out)
    ksum, _ = _ksum_from_args(args)
    k = _default_k(ksum.N, args.k)
    fact = _build(args.method, ksum, k)
    save_tsvd(out / "factorization", fact)
    oracle_s = None
    if args.oracle:
        check_cap(ksum.N, "operator")
        oracle_s = dense_svd(kron_sum_dense(ksum)).s
    rows = _spectrum_rows(fact, args.method, oracle_s)[:k]
    write_csv_table(out / "singular_values.csv", ("index", "sigma"), [r[:2] for r in rows])
    if oracle_s is not None:
        write_csv_table(out / "sv_error.csv", ("index", "approx", "exact", "rel_error"), rows)
        rel = np.array([r[3] for r in rows])
        top = np.median(rel[: max(k // 2, 1)])
        print(f"relative error: max {format_float(rel.max())}, median over top k/2 {format_float(top)}")
    _write_config(out, args)
    print(f"{args.method}: k={k} sigma_1={format_float(fact.sigma[0])} sigma_k={format_float(fact.sigma[k - 1])}")
    return EXIT_OK


def _restore(method, ksum, d, spec, k):
    if method == "oracle":
        check_cap(ksum.N, "operator")
        fact = dense_svd(kron_sum_dense(ksum))
    elif method == "reordered":
        fact = build(ksum, k)
    else:
        fact = baseline_build(ksum)
        if spec.effective_truncation is None:
            spec = FilterSpec(spec.kind, spec.alpha, k)
    return filtered_solve(fact, d, spec)


def cmd_deblur(args):
    out = Path(args.out)
    if args.alpha < 0:
        raise UsageError(f"--alpha must be nonnegative, got {args.alpha}")
    ksum, psf = _ksum_from_args(args)
    if psf is None:
        raise UsageError("deblur needs --psf")
    n = psf.n
    prob = _problem(args, psf)
    k = _default_k(ksum.N, args.k)
    kt = args.ktrunc if args.ktrunc is not None else k
    if not 1 <= kt <= k:
        raise UsageError(f"--ktrunc must be in [1, {k}], got {kt}")
    try:
        spec = FilterSpec(args.filter, args.alpha, kt)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    x = _restore(args.method, ksum, prob.d, spec, k)
    img = x.reshape((n, n), order="F")
    save_image(out / "restored.pgm", img)
    save_image(out / "restored.csv", img)
    save_image(out / "blurred.pgm", prob.data_image())
    xt = prob.x_true.ravel(order="F")
    xn = np.linalg.norm(xt)
    rows = [
        ("blurred_rel_error", np.linalg.norm(prob.d - xt) / xn),
        ("restored_rel_error", np.linalg.norm(x - xt) / xn),
    ]
    write_csv_table(out / "error.csv", ("quantity", "value"), rows)
    _write_config(out, args)
    print(f"relative error: blurred {format_float(rows[0][1])}, restored {format_float(rows[1][1])}")
    return EXIT_OK


def cmd_solve(args):
    out = Path(args.out)
    if args.maxit < 1:
        raise UsageError(f"--maxit must be >= 1, got {args.maxit}")
    if args.alpha < 0 or args.tol <= 0:
        raise UsageError("--alpha must be >= 0 and --tol > 0")
    ksum, psf = _ksum_from_args(args)
    if psf is None:
        raise UsageError("solve needs --psf")
    prob = _problem(args, psf)
    op = ksum_operator(ksum)
    k = _default_k(ksum.N, args.k)
    precond = None
    if args.precond == "reordered":
        precond = make_preconditioner(build(ksum, k), args.alpha)
    elif args.precond == "baseline":
        precond = make_preconditioner(baseline_build(ksum), args.alpha, k=k)
    rep = pcgls(op, prob.d, args.alpha, precond, args.tol, args.maxit)
    rows = [(0, rep.initial_residual)] + [(i + 1, v) for i, v in enumerate(rep.residual_history)]
    write_csv_table(out / "report.csv", ("iteration", "residual"), rows)
    xt = prob.x_true.ravel(order="F")
    summary = [
        ("precond", args.precond),
        ("iterations", rep.iterations),
        ("converged", rep.converged),
        ("rel_error", np.linalg.norm(rep.x - xt) / np.linalg.norm(xt)),
    ]
    write_csv_table(out / "summary.csv", ("quantity", "value"), summary)
    _write_config(out, args)
    print(f"{args.precond}: {rep.iterations} iterations, converged={rep.converged}")
    return EXIT_OK


def cmd_bounds(args):
    out = Path(args.out)
    ksum, psf = _ksum_from_args(args)
    check_cap(ksum.N, "operator")
    k = _default_k(ksum.N, args.k)
    K = kron_sum_dense(ksum)
    if psf is not None and args.image is not None:
        d = _problem(args, psf).d
    else:
        rng = np.random.default_rng(args.seed)
        d = K @ rng.random(ksum.N)
    tsvd = build(ksum, k)
    reports = bound_sweep(K, tsvd, d)
    write_csv_table(out / "bounds.csv", BoundReport.CSV_HEADER, [r.csv_row() for r in reports])
    _write_config(out, args)
    valid = sum(r.signal_bound.valid for r in reports)
    print(f"k_max={k}: signal bound valid for {valid} of {len(reports)} truncations")
    return EXIT_OK


def cmd_reproduce(args):
    from .experiments import run_all

    out = Path(args.out)
    rows = run_all(out)
    write_csv_table(out / "summary.csv", ("experiment", "quantity", "value"), rows)
    _write_config(out, args)
    width = max(len(r[0]) + len(r[1]) for r in rows) + 3
    for exp, qty, val in rows:
        shown = format_float(val) if isinstance(val, float) else str(val)
        print(f"{exp}: {qty}".ljust(width), shown)
    return EXIT_OK


def _add_psf(p, required=True):
    p.add_argument("--psf", required=required, help="PSF file (.pgm/.csv) or NAME:N generator")
    p.add_argument("--center", help="point-source location ROW,COL (default: brightest pixel)")


def _add_problem(p):
    p.add_argument("--image", help="true image file or satellite:N")
    p.add_argument("--noise", type=float, default=0.02, help="relative noise level (default 0.02)")
    p.add_argument("--seed", type=int, default=0, help="noise RNG seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kronsvd",
        description="Approximate truncated SVDs of blur operators via Kronecker sums.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="Kronecker sum decomposition of a PSF blur operator")
    _add_psf(p)
    p.add_argument("--r", type=int, help="number of terms (default: numerical rank)")
    p.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL, help="relative rank threshold")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("tsvd", help="build an approximate TSVD and report its spectrum")
    _add_psf(p, required=False)
    p.add_argument("--ksum", help="decomposition directory written by 'decompose'")
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, help="truncation index (default min(N, 600))")
    p.add_argument("--method", choices=("reordered", "baseline"), default="reordered")
    p.add_argument("--oracle", action="store_true", help="compare against the dense SVD")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tsvd)

    p = sub.add_parser("deblur", help="spectral-filter restoration of a synthetic blurred image")
    _add_psf(p)
    _add_problem(p)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, help="truncation index of the factorization")
    p.add_argument("--ktrunc", type=int, help="effective truncation used by the filter (<= k)")
    p.add_argument("--filter", choices=("tsvd", "tikhonov", "tsvd+tikhonov"), default="tsvd")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--method", choices=("reordered", "baseline", "oracle"), default="reordered")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_deblur)

    p = sub.add_parser("solve", help="(P)CGLS on the damped least-squares problem")
    _add_psf(p)
    _add_problem(p)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, help="rank of the preconditioner")
    p.add_argument("--precond", choices=("none", "baseline", "reordered"), default="none")
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--maxit", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bounds", help="desk-scale sweep of the error bounds over effective k")
    _add_psf(p, required=False)
    _add_problem(p)
    p.add_argument("--ksum", help="decomposition directory written by 'decompose'")
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, help="build truncation index; the sweep covers 1..k")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("reproduce", help="run the desk-scale experiment suite")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ParseError, DimensionError, FileNotFoundError, ValueError) as exc:
        print(f"kronsvd {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"kronsvd {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
