"""Command-line front end: ``grenzero <experiment> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, run_experiment
from .limit_laws import ConvergenceError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grenzero", description="Grenander estimator at zero: experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--gamma", type=_floats, default=[], help="comma-separated gamma values")
    p.add_argument("--c", type=_floats, default=[], help="comma-separated window lengths")
    p.add_argument("--n", type=_ints, default=[], help="comma-separated sample sizes")
    p.add_argument("--reps", type=int, default=None, help="Monte Carlo replicates per cell")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--family", default=None,
                   help="uniform | beta:a=V | gammamix:c=V | subbotin:r=V,eps=V,mu=V | lehmann:gl=V,eps=V")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--xmax", type=float, default=20.0, help="ydist: upper end of the x grid")
    p.add_argument("--points", type=int, default=200, help="grid size for ydist/mle/mixture outputs")
    p.add_argument("--input", default=None, help="mixture-demo: one-column CSV of values in (0, 1]")
    p.add_argument("--window", type=int, default=1000, help="Y_gamma stopping window")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = ExperimentConfig(
            experiment=args.experiment, gammas=args.gamma, cs=args.c, ns=args.n,
            reps=args.reps if args.reps is not None else (1000 if args.experiment == "switching-demo" else 10000),
            seed=args.seed, family=args.family, out=args.out, threads=args.threads,
            xmax=args.xmax, points=args.points, input=args.input, window=args.window,
        )
        summary = run_experiment(cfg)
    except ConfigError as exc:
        print(f"grenzero: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"grenzero: numeric non-convergence: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_NUMERIC
    for cell in summary.cells:
        line = f"{cell['key']}: {cell['estimate']}"
        if cell.get("stderr") is not None:
            line += f" (se {cell['stderr']:.4f})"
        if "paper_target" in cell:
            line += f" [target {cell['paper_target']}]"
        print(line)
    print(f"wrote {', '.join(summary.files)} to {cfg.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
