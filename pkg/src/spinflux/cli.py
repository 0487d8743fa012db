"""Command line front end.

One subcommand per experiment plus ``report``.  Parameters resolve in
three layers: per-experiment defaults, then a JSON config file given
with ``--config``, then individual flags.  Exit codes: 0 on success,
2 for configuration errors, 3 when resources ran out or the run was
interrupted (in which case the printed resume token, the output
directory, lets ``--resume`` pick up the finished partial runs).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    ResourceError,
    emit_report,
    run_experiment,
)
from .transfer import ENGINES

_FLAG_TO_FIELD = {
    "qubits": "n_qubits",
    "runs": "n_runs",
    "traj_runs": "n_runs_trajectories",
    "delta": "delta",
    "relaxation": "relaxation_rate",
    "dephasing": "dephasing_rate",
    "nbar": "nbar",
    "steps": "n_steps",
    "grid_points": "grid_points",
    "t_max": "t_max",
    "seed": "master_seed",
    "workers": "workers",
    "out": "out_dir",
    "engine": "engine",
}


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="JSON config file")
    sub.add_argument("--seed", type=int, help="master RNG seed")
    sub.add_argument("--workers", type=int, help="parallel worker processes")
    sub.add_argument("--out", metavar="DIR", help="output directory")
    sub.add_argument("--engine", choices=ENGINES, help="evolution engine")
    sub.add_argument(
        "--resume",
        nargs="?",
        const="",
        metavar="DIR",
        help="reuse partial results (optionally naming the output directory)",
    )
    sub.add_argument("--qubits", type=int, help="chain length N")
    sub.add_argument("--runs", type=int, help="ensemble size M")
    sub.add_argument(
        "--traj-runs",
        type=int,
        help="ensemble size for the trajectory engine when it differs from M",
    )
    sub.add_argument("--delta", type=float, help="relative disorder strength")
    sub.add_argument("--relaxation", type=float, help="relaxation rate Gamma/J")
    sub.add_argument("--dephasing", type=float, help="dephasing rate gamma/J")
    sub.add_argument("--nbar", type=float, help="thermal occupation of the baths")
    sub.add_argument("--steps", type=int, help="time steps per evolution")
    sub.add_argument("--grid-points", type=int, help="points on unitary time grids")
    sub.add_argument("--t-max", type=float, help="last time on the curve, in 1/J")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinflux",
        description="spin-chain state transfer experiments",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for exp in EXPERIMENTS:
        sub = subs.add_parser(exp, help=f"run the {exp} experiment")
        _add_run_flags(sub)
    rep = subs.add_parser("report", help="summarize finished runs")
    rep.add_argument("manifests", nargs="*", help="manifest.json paths")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = {"experiment": args.command}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        if "experiment" in loaded and loaded["experiment"] != args.command:
            raise ConfigError(
                f"config file names experiment {loaded['experiment']!r} "
                f"but the command line says {args.command!r}"
            )
        data.update(loaded)
        data["experiment"] = args.command
    for flag, name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    if getattr(args, "resume", None):
        data["out_dir"] = args.resume
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "report":
            sys.stdout.write(emit_report(args.manifests))
            return 0
        config = _config_from_args(args)
        resume = args.resume is not None
        result = run_experiment(config, resume=resume)
        sys.stdout.write(f"wrote {result.manifest_path}\n")
        with open(result.out_dir / "summary.txt", encoding="utf-8") as f:
            sys.stdout.write(f.read())
        return 0
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ResourceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except KeyboardInterrupt:
        out = getattr(args, "out", None) or getattr(args, "resume", None)
        token = out or f"spinflux-runs/{args.command}"
        sys.stderr.write(f"interrupted; resume with --resume {token}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
