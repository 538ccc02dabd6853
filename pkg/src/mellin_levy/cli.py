"""Command line interface: ``mellin-levy {simulate,estimate,mc-study,tune}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .ecf import SmallDenominatorError
from .experiment import RunFailure, StudyConfig, emit_table, run_study, tune_parameters
from .kernels import GammaExpKernel
from .levy_models import ExponentialCPP, LevyTriplet
from .mellin import VARIANTS, estimate_levy_density
from .simulate import export_path, load_path, simulate_path


def _x_grid(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {spec!r}") from exc


def _sigma2(spec: str):
    return spec if spec == "estimate" else float(spec)


def _add_kernel_args(p):
    p.add_argument("--kernel-r", type=int, default=0)
    p.add_argument("--kernel-rho", type=float, default=1.0)
    p.add_argument("--one-sided", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mellin-levy", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a moving-average path and write it as CSV")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=0.0)
    _add_kernel_args(p)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="estimate the Lévy density from a path CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--variant", choices=VARIANTS, default="first-stab")
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--u-max", type=float, default=0.4)
    p.add_argument("--v-max", type=float, default=1.1)
    p.add_argument("--k-points", type=int, default=None)
    p.add_argument("--sigma2", type=_sigma2, default=0.0, help="known value or 'estimate'")
    p.add_argument("--sigma-u", type=float, default=None, help="frequency level for --sigma2 estimate")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="true intensity for the stabilized correction (default: plug-in from the mean)")
    _add_kernel_args(p)
    p.add_argument("--x-grid", type=_x_grid, default=_x_grid("0.25:4:256"))
    p.add_argument("--out", required=True)

    for name, helptext in (("mc-study", "run a Monte Carlo risk study"), ("tune", "grid-search U and V")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--paper-faithful", action="store_true",
                       help="tune on the reporting seeds")
    return parser


def _cmd_simulate(args) -> int:
    model = LevyTriplet(sigma2=args.sigma2, jumps=ExponentialCPP(args.lam))
    kernel = GammaExpKernel(args.kernel_r, args.kernel_rho, args.one_sided)
    path = simulate_path(model, kernel, args.delta, args.n, args.alpha, seed=args.seed)
    export_path(path, args.out)
    return 0


def _cmd_estimate(args) -> int:
    path = load_path(args.inp)
    kernel = GammaExpKernel(args.kernel_r, args.kernel_rho, args.one_sided)
    est = estimate_levy_density(path, kernel, args.x_grid, args.variant, args.c, args.u_max, args.v_max,
                                args.k_points, sigma2=args.sigma2, sigma_u=args.sigma_u, lam=args.lam)
    with open(args.out, "w") as fh:
        fh.write("# " + json.dumps({"target": est.target, **est.params}, default=str) + "\n")
        fh.write("x,nu_hat\n")
        for x, y in zip(est.x, est.values):
            fh.write(f"{float(x)!r},{float(y)!r}\n")
    return 0


def _load_config(args) -> StudyConfig:
    config = StudyConfig.from_file(args.config)
    if args.paper_faithful:
        config.paper_faithful = True
    return config


def _cmd_study(args) -> int:
    report = run_study(_load_config(args))
    emit_table(report, args.out)
    return 0


def _cmd_tune(args) -> int:
    config = _load_config(args)
    best = tune_parameters(config)
    with open(args.out, "w") as fh:
        fh.write("n,U,V,mean_risk\n")
        for n, (u, v, rows) in best.items():
            risk = next(r.mean for r in rows if r.u == u and r.v == v)
            fh.write(f"{n},{u!r},{v!r},{risk!r}\n")
    return 0


_COMMANDS = {"simulate": _cmd_simulate, "estimate": _cmd_estimate, "mc-study": _cmd_study, "tune": _cmd_tune}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (RunFailure, SmallDenominatorError, ValueError, OSError) as exc:
        print(f"mellin-levy {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
