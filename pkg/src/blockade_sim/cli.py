"""Command-line front end: validate configs and run experiments.

Exit codes: 0 success, 2 config validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .dynamics import NumericalFailureError, StiffnessError
from .experiments import ConfigValidationError, run_to_files, validate_config


def _load_raw(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockade-sim",
        description="Two-resonator single-photon-source simulations from JSON configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment config")
    run_parser.add_argument("--config", required=True, help="path to the JSON config")
    run_parser.add_argument("--jobs", type=int, default=None,
                            help="parallel workers for sweeps (default: logical cores)")
    run_parser.add_argument("--out", default=None, help="output file (overrides config)")

    val_parser = sub.add_parser("validate", help="check a config against the schema")
    val_parser.add_argument("--config", required=True, help="path to the JSON config")

    args = parser.parse_args(argv)

    try:
        raw = _load_raw(args.config)
    except (OSError, json.JSONDecodeError) as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return 2

    if args.command == "validate":
        try:
            config = validate_config(raw)
        except ConfigValidationError as err:
            for problem in err.problems:
                print(f"config error: {problem}", file=sys.stderr)
            return 2
        print(f"config OK: experiment={config.experiment}")
        return 0

    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    try:
        _, out = run_to_files(raw, out_path=args.out, jobs=jobs)
    except ConfigValidationError as err:
        for problem in err.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (NumericalFailureError, StiffnessError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
