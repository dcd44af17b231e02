"""Command line interface.

Subcommands:

* ``sbmlab run --config cfg.json [--seed N] [--out DIR]`` runs one
  experiment and writes its artifacts; the exit status encodes the
  verdict (0 PASS, 2 FAIL, 3 INCONCLUSIVE).
* ``sbmlab list`` prints the experiment catalog.
* ``sbmlab validate --config cfg.json`` checks a config without running.

Usage errors (bad flags, malformed config files) exit with status 64.
The seed is resolved as: --seed flag, then the SBMLAB_SEED environment
variable, then the config, then a fixed default, so a bare rerun of the
same config is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    run_experiment,
    validate_config,
)
from .reports import FAIL, INCONCLUSIVE, PASS

EX_USAGE = 64

_EXIT_BY_VERDICT = {PASS: 0, FAIL: 2, INCONCLUSIVE: 3}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sbmlab",
                description="simulation and verification experiments for "
                            "jump functionals of subordinate Brownian motion")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment from a config",
                           parents=[], add_help=True)
    run_p.add_argument("--config", required=True, help="JSON config file")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the Monte Carlo seed")
    run_p.add_argument("--out", default=None,
                       help="override the output directory")
    run_p.error = p.error

    sub.add_parser("list", help="print the experiment catalog").error = p.error

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("--config", required=True, help="JSON config file")
    val_p.error = p.error
    return p


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        print(f"sbmlab: cannot read config: {exc}", file=sys.stderr)
        raise SystemExit(EX_USAGE)
    except json.JSONDecodeError as exc:
        print(f"sbmlab: config is not valid JSON: {exc}", file=sys.stderr)
        raise SystemExit(EX_USAGE)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list":
        for name in EXPERIMENTS:
            print(name)
        return 0

    if args.command == "validate":
        doc = _load_config(args.config)
        try:
            cfg = validate_config(doc)
        except ConfigError as exc:
            print(f"sbmlab: invalid config: {exc}", file=sys.stderr)
            return EX_USAGE
        print(f"ok: {cfg['experiment']}")
        return 0

    # run
    doc = _load_config(args.config)
    seed = args.seed
    if seed is None and "SBMLAB_SEED" in os.environ:
        try:
            seed = int(os.environ["SBMLAB_SEED"])
        except ValueError:
            print("sbmlab: SBMLAB_SEED must be an integer", file=sys.stderr)
            return EX_USAGE
    try:
        verdict, outdir = run_experiment(doc, out_override=args.out,
                                         seed_override=seed)
    except ConfigError as exc:
        print(f"sbmlab: invalid config: {exc}", file=sys.stderr)
        return EX_USAGE
    print(f"{doc.get('experiment', '?')}: {verdict} ({outdir})")
    return _EXIT_BY_VERDICT.get(verdict, 2)


if __name__ == "__main__":
    raise SystemExit(main())
