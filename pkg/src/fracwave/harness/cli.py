"""Command-line interface for the simulation and verification lab."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import ConfigError
from .config import ExperimentConfig, config_from_dict, load_config
from .experiment import fit_decay_file, run_experiment

DEFAULT_CONFIG = {
    "grid": {"half_length": 16.0, "num_points": 256},
    "s_list": [1.0, 2.0],
    "damping": {"kind": "random_dense", "cell_width": 4.0, "bump_fraction": 0.3, "level": 1.0, "seed": 7},
    "initial": {"kind": "gaussian", "center": 0.0, "width": 1.0},
    "seed": 0,
    "time": {"final_time": 40.0, "dt": 0.02, "sample_every": 10},
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="JSON config file")
    parser.add_argument("--out", type=Path, default=Path("fracwave-out"), help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--workers", type=int, default=None, help="parallel sweep workers")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
    parser.add_argument("--force", action="store_true", help="overwrite a differing manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description="Simulate damped fractional wave dynamics and probe the decay-rate estimates numerically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single run: integrate, fit, classify")
    _add_common(p)

    p = sub.add_parser("sweep", help="full sweep over s values and damping profiles")
    _add_common(p)

    p = sub.add_parser("fit-decay", help="fit decay models to an existing trace CSV")
    _add_common(p)
    p.add_argument("--trace", type=Path, required=True, help="trace CSV with header t,E")
    p.add_argument("--t0", type=float, default=None, help="explicit window start")
    p.add_argument("--t1", type=float, default=None, help="explicit window end")

    p = sub.add_parser("resolvent-scan", help="resolvent norms along the imaginary axis")
    _add_common(p)
    p.add_argument("--num-lambdas", type=int, default=41)

    p = sub.add_parser("ls-constant", help="band-limited sampling constant for the damping level set")
    _add_common(p)
    p.add_argument("--band-center", type=float, default=None)
    p.add_argument("--band-half-width", type=float, default=2.0)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("check-damping", help="window-average and level-set density curves")
    _add_common(p)
    p.add_argument("--num-radii", type=int, default=12)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("lemma-verify", help="infima behind the resolvent estimate")
    _add_common(p)
    p.add_argument("--resolution", type=int, default=4000)

    p = sub.add_parser("intervals", help="near-resonant frequency interval growth")
    _add_common(p)
    p.add_argument("--width", type=float, default=0.5)
    p.add_argument("--lam-max", type=float, default=1000.0)

    p = sub.add_parser("theorem2-demo", help="threshold mechanism: interval growth plus vanishing-damping ratio")
    _add_common(p)
    p.add_argument("--width", type=float, default=0.5)
    p.add_argument("--num-radii", type=int, default=16)

    return parser


_COMMAND_TASKS = {
    "simulate": ["simulate"],
    "sweep": ["simulate"],
    "resolvent-scan": ["resolvent_scan"],
    "ls-constant": ["ls_constant"],
    "check-damping": ["damping_check"],
    "lemma-verify": ["lemma"],
    "intervals": ["intervals"],
    "theorem2-demo": ["theorem2"],
}


def _load(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = config_from_dict(dict(DEFAULT_CONFIG))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.command == "simulate":
        # single run: first fractional order, first profile
        cfg.s_list = cfg.s_list[:1]
        cfg.damping_list = cfg.damping_list[:1]
    return cfg


def _options(args: argparse.Namespace) -> dict:
    opts: dict = {}
    for name in ("num_lambdas", "band_center", "band_half_width", "epsilon",
                 "num_radii", "resolution", "width", "lam_max"):
        value = getattr(args, name, None)
        if value is not None:
            opts[name] = value
    return opts


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fit-decay":
            window = None
            if args.t0 is not None and args.t1 is not None:
                window = (args.t0, args.t1)
            bundle = fit_decay_file(args.trace, args.out, window, fmt=args.format)
        else:
            cfg = _load(args)
            bundle = run_experiment(
                cfg,
                args.out,
                tasks=_COMMAND_TASKS[args.command],
                task_options=_options(args),
                fmt=args.format,
                force=args.force,
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2

    for run in bundle.manifest.get("runs", []):
        status = run["status"].upper()
        print(f"[{status}] {run['task']}:{run['key']}")
    print(f"report: {bundle.out_dir / 'report.json'}")
    if not bundle.ok:
        print(f"{len(bundle.failures)} sub-run(s) failed; see manifest.json", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
