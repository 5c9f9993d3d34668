"""Command line entry point.

    bgklab <experiment> [--config FILE] [--seed N] [--out-dir DIR]
                        [--workers N] [--format csv|json]

Experiments: stationarity, homogeneous-oracle, converge-n, converge-eps,
combined, diagnostics.  Config files are TOML or JSON with ExperimentConfig
keys; command-line flags override file values.  Exit code 0 on PASS, 2 on
FAIL, 1 on configuration or runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, RUNNERS, ExperimentConfig
from .solver import ConfigurationError

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


def load_config_file(path: str) -> dict:
    if path.endswith(".toml"):
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    if path.endswith(".json"):
        with open(path) as fh:
            return json.load(fh)
    raise ConfigurationError(f"config file must be .toml or .json, got {path!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bgklab",
                                     description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="TOML or JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = load_config_file(args.config) if args.config else {}
        for key in ("seed", "out_dir", "workers", "fmt"):
            val = getattr(args, key)
            if val is not None:
                overrides[key] = val
        cfg = ExperimentConfig.build(args.experiment, overrides)
        report = RUNNERS[args.experiment](cfg)
    except (ConfigurationError, OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    verdict = report["verdict"]
    status = "PASS" if verdict["passed"] else "FAIL"
    print(f"{args.experiment}: {status}")
    for key, val in sorted(verdict.items()):
        if key != "passed":
            print(f"  {key}: {val}")
    return 0 if verdict["passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
