"""Command-line entry point: seeded experiment runs written to CSV.

Subcommands mirror the experiment kinds; flags override an optional TOML
config file, which overrides per-experiment defaults.
"""

from __future__ import annotations

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment, write_records_csv

DEFAULTS = {
    "heatmap": dict(graph="er", n=(10, 20, 30, 40, 50, 60, 70, 80, 90, 100),
                    c=(0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0),
                    reps=10),
    "schemes": dict(graph="er", n=(30,), c=tuple(float(v) for v in range(1, 11)),
                    reps=10, samples=10000),
    "discovery": dict(graph="er", n=(30,), c=(2.0,), reps=10, samples=10000,
                      scheme="sscm"),
    "timeseries": dict(graph="er", n=(10,), c=(1.0,), reps=20,
                       T=(2, 5, 10, 25, 50, 100, 200)),
    "bound": dict(graph="er", n=(2000,), c=(2.0, 5.0), reps=30),
}


def _int_list(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok)


def _float_list(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relsort",
        description="Seeded random-DAG sortability and discovery experiments.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", default=None, help="TOML file with defaults; flags win")
        p.add_argument("--graph", choices=("er", "sf", "chain", "order"),
                       default=argparse.SUPPRESS)
        p.add_argument("--n", type=_int_list, default=argparse.SUPPRESS,
                       help="comma-separated node counts")
        p.add_argument("--c", type=_float_list, default=argparse.SUPPRESS,
                       help="comma-separated density parameters")
        p.add_argument("--reps", type=int, default=argparse.SUPPRESS)
        p.add_argument("--samples", type=int, default=argparse.SUPPRESS,
                       help="observations per replicate")
        p.add_argument("--alpha", type=float, default=argparse.SUPPRESS)
        p.add_argument("--scheme", choices=("raw", "sscm", "iscm", "all"),
                       default=argparse.SUPPRESS)
        p.add_argument("--T", type=_int_list, default=argparse.SUPPRESS,
                       help="comma-separated unroll horizons")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--out", default=argparse.SUPPRESS, help="output CSV path")
        p.add_argument("--workers", type=int, default=argparse.SUPPRESS)
        p.add_argument("--signed-weights", dest="signed_weights", action="store_true",
                       default=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    provided = {k: v for k, v in vars(args).items() if k != "config"}
    experiment = provided.pop("experiment")
    merged: dict = dict(DEFAULTS.get(experiment, {}))
    if args.config:
        with open(args.config, "rb") as fh:
            file_cfg = tomllib.load(fh)
        unknown = set(file_cfg) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        for key, value in file_cfg.items():
            merged[key] = tuple(value) if isinstance(value, list) else value
    merged.update(provided)
    merged.pop("experiment", None)
    return ExperimentConfig(experiment=experiment, **merged)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = run_experiment(cfg)
    write_records_csv(cfg, records, cfg.out)
    na = sum(1 for r in records if r.value is None)
    print(f"{cfg.experiment}: wrote {len(records)} rows ({na} NA) to {cfg.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
