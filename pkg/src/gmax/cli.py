"""Command-line front end: `gmax <experiment> [flags]`.

Subcommands map one-to-one onto the experiment runners; flags override values
from an optional JSON config file.  Exit codes: 0 success, 2 a documented
assertion or certificate failed, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import ExperimentConfig, run_experiment

__all__ = ["main", "build_parser"]

_SUBCOMMANDS = {
    "fig1": "FIG1",
    "fig2": "FIG2",
    "bounds": "BOUNDS_TABLE",
    "delta-study": "DELTA_STUDY",
    "limit-h0": "LIMIT_H0",
    "thm3-demo": "THM3_DEMO",
    "certify": "CERTIFY",
}

_HELP = {
    "fig1": "Monte Carlo E-max estimates over an (H, n) grid",
    "fig2": "estimates at one large n against the 1/(5 sqrt H) lower bound",
    "bounds": "closed-form bound table over an (H, n) grid",
    "delta-study": "coupled nested-grid gap estimates vs the gap bound",
    "limit-h0": "small-H estimates vs the H -> 0 limit",
    "thm3-demo": "grid-growth vs fixed-n behaviour of the expected maximum",
    "certify": "check a two-sided Holder certificate for a process spec",
}


def _csv_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _csv_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmax",
        description="Expected maxima of Holder-continuous Gaussian processes: "
                    "samplers, Monte Carlo estimates, closed-form bounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, exp in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", help="JSON file with ExperimentConfig fields")
        p.add_argument("--h-grid", type=_csv_floats, metavar="H1,H2,...",
                       help="comma-separated Hurst values")
        p.add_argument("--n-grid", type=_csv_ints, metavar="N1,N2,...",
                       help="comma-separated grid resolutions")
        p.add_argument("--paths", type=int, help="number of Monte Carlo paths (even)")
        p.add_argument("--seed", type=int, help="base seed for all random streams")
        p.add_argument("--ci", type=float, help="confidence level (default 0.999)")
        p.add_argument("--out", help="output CSV/JSON path")
        p.add_argument("--threads", type=int,
                       help="worker threads (default: GMAX_THREADS or 1)")
        p.add_argument("--no-figure", action="store_true",
                       help="skip the PNG companion figure")
        if exp == "DELTA_STUDY":
            p.add_argument("--fine-n", type=int,
                           help="fine grid resolution shared by all gap rows")
        if exp == "CERTIFY":
            p.add_argument("--spec", help="process spec JSON file")
            p.add_argument("--family", help="process family name (alternative to --spec)")
            p.add_argument("--H", type=float, help="Hurst parameter")
            p.add_argument("--K", type=float, help="second exponent (bi-fractional)")
            p.add_argument("--C", type=float, default=1.0, help="scale (default 1)")
            p.add_argument("--c1", type=float, help="lower Holder constant")
            p.add_argument("--h1", type=float, help="lower Holder exponent")
            p.add_argument("--c2", type=float, help="upper Holder constant")
            p.add_argument("--h2", type=float, help="upper Holder exponent")
            p.add_argument("--grid-size", type=int, help="certification grid points")
    return parser


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    experiment = _SUBCOMMANDS[args.command]
    doc: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        doc.pop("experiment", None)
    overrides = {
        "H_grid": args.h_grid, "n_grid": args.n_grid, "paths": args.paths,
        "seed": args.seed, "ci_level": args.ci, "output_path": args.out,
        "threads": args.threads,
        "fine_n": getattr(args, "fine_n", None),
        "spec_file": getattr(args, "spec", None),
        "family": getattr(args, "family", None),
        "H": getattr(args, "H", None), "K": getattr(args, "K", None),
        "const_c1": getattr(args, "c1", None), "const_h1": getattr(args, "h1", None),
        "const_c2": getattr(args, "c2", None), "const_h2": getattr(args, "h2", None),
        "grid_size": getattr(args, "grid_size", None),
    }
    if getattr(args, "C", None) is not None and args.command == "certify":
        overrides["C"] = args.C
    for key, val in overrides.items():
        if val is not None:
            doc[key] = val
    if args.no_figure:
        doc["figure"] = False
    if "threads" not in doc or doc["threads"] is None:
        doc["threads"] = int(os.environ.get("GMAX_THREADS", "1"))
    allowed = set(ExperimentConfig.__dataclass_fields__) - {"experiment"}
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    return ExperimentConfig(experiment=experiment, **doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _build_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gmax: configuration error: {exc}", file=sys.stderr)
        return 3
    try:
        code = run_experiment(cfg)
    except ValueError as exc:
        print(f"gmax: configuration error: {exc}", file=sys.stderr)
        return 3
    if code == 0:
        print(f"wrote {cfg.resolve_out()}")
    else:
        print(f"wrote {cfg.resolve_out()} (assertions failed, exit {code})",
              file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
