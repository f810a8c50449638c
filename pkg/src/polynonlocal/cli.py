"""Command-line front end: ``polynonlocal <command> ...``."""
import argparse
import logging
import math
import sys

from . import __version__
from .geometry import NeighborhoodSpec, Strategy
from .kernels import Family, make_kernel
from .operator import FIELDS, apply_operator, energy_norm_sq, k_gamma_estimate, rescaled_apply, sine_product
from .quadrature import QuadratureSpec
from .solver import DEFAULT_REFINE, ConvergenceError, build_grid, build_stencil, l2_error, solve
from .study import Path, StudyConfig, StudyReport, load_config, mesh_size, run_study, write_csv

__all__ = ["main", "build_parser"]


def _int_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _add_kernel(p):
    p.add_argument("--kernel", choices=[f.value for f in Family], default="constant")
    p.add_argument("--s", type=float, default=None, help="singularity exponent (singular kernel)")


def _add_neighborhood(p, strategies):
    p.add_argument("--delta", type=_positive, required=True)
    p.add_argument("--strategy", choices=strategies, default="ball")
    p.add_argument("--n", type=int, default=None, help="polygon side count")


def build_parser():
    parser = argparse.ArgumentParser(prog="polynonlocal", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sigma", help="second moments of regular polygons")
    _add_kernel(p)
    p.add_argument("--n-list", type=_int_list, required=True)

    p = sub.add_parser("apply", help="evaluate the operator at a point")
    p.add_argument("--func", choices=sorted(FIELDS), required=True)
    _add_neighborhood(p, [s.value for s in Strategy])
    p.add_argument("--grid-h", type=_positive, default=None, help="mesh pitch for nocaps")
    p.add_argument("--x", type=float, nargs=2, default=(0.5, 0.5), metavar=("X1", "X2"))
    p.add_argument("--order", type=int, default=16)
    p.add_argument("--rescaled", action="store_true", help="multiply by 4 / C_n")
    _add_kernel(p)

    p = sub.add_parser("solve", help="solve the manufactured problem once")
    _add_neighborhood(p, ["ball", "regular"])
    p.add_argument("--beta", type=float, default=1.5)
    p.add_argument("--refine", type=int, default=DEFAULT_REFINE)
    p.add_argument("--tol", type=_positive, default=1e-10)
    _add_kernel(p)

    p = sub.add_parser("study", help="run a study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV output path")

    p = sub.add_parser("norm-limit", help="energy of sin(pi x1) sin(pi x2) against pi^2/2")
    _add_neighborhood(p, ["ball", "regular"])
    p.add_argument("--h", type=_positive, default=None)
    p.add_argument("--beta", type=float, default=1.5)
    p.add_argument("--refine", type=int, default=DEFAULT_REFINE)
    _add_kernel(p)

    p = sub.add_parser("kgamma", help="kernel mass outside the polygon")
    p.add_argument("--delta", type=_positive, required=True)
    p.add_argument("--strategy", choices=["regular", "nocaps"], default="regular")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--grid-h", type=_positive, default=None)
    p.add_argument("--samples", type=int, default=16)
    _add_kernel(p)
    return parser


def _neighborhood(args):
    return NeighborhoodSpec(args.strategy, args.delta, args.n, grid_h=getattr(args, "grid_h", None))


def _run(args):
    if args.command == "study":
        cfg = load_config(args.config)
        report = run_study(cfg)
        print(report.format_table())
        if args.out:
            write_csv(report, args.out)
        return
    k = make_kernel(args.kernel, 2, args.s)
    if args.command == "sigma":
        cfg = StudyConfig(Path.SIGMA_TABLE, [], n_list=args.n_list, kernel=args.kernel, s=args.s)
        print(run_study(cfg).format_table())
    elif args.command == "apply":
        u = FIELDS[args.func]()
        op = rescaled_apply if args.rescaled else apply_operator
        val = op(u, args.x, k, _neighborhood(args), QuadratureSpec(args.order))
        print(f"{val:.6f}")
    elif args.command == "solve":
        h = mesh_size(args.delta, args.beta)
        grid = build_grid(h, args.delta)
        st = build_stencil(grid, k, _neighborhood(args), args.refine)
        u0 = FIELDS["manufactured"]()
        sol = solve(st, grid, lambda a, b: -2.0 * (b + 1.0), tol=args.tol, constraint=u0)
        row = (args.delta, args.n, grid.h, grid.dof, sol.iterations, l2_error(sol, u0))
        print(StudyReport(("delta", "n", "h", "dof", "iterations", "l2_error"), [row]).format_table())
    elif args.command == "norm-limit":
        h = args.h if args.h is not None else mesh_size(args.delta, args.beta)
        grid = build_grid(h, args.delta)
        e = energy_norm_sq(sine_product(), grid, k, _neighborhood(args), args.refine)
        cols = ("delta", "n", "h", "polygon", "truncated", "ball", "reference")
        row = (args.delta, args.n, grid.h, e.polygon, e.truncated, e.ball, math.pi ** 2 / 2)
        print(StudyReport(cols, [row]).format_table())
    elif args.command == "kgamma":
        val = k_gamma_estimate(k, _neighborhood(args), args.samples)
        print(f"{val:.6f}")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except (ValueError, TypeError, OSError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
