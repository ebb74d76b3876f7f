"""``bisys <mode> --config <path> [--out <dir>] [--verbose]``."""

import argparse
import logging
import sys
from pathlib import Path

from .config import MODES, parse_config
from .errors import ConfigError
from .runner import run

EXIT_CONFIG = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bisys",
        description="Two-body bound-state experiments in relative and individual coordinates.",
    )
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, type=Path, help="run configuration file")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (overrides [output] dir)")
    parser.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"bisys: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = parse_config(text, mode=args.mode)
    except ConfigError as exc:
        print(f"bisys: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    bundle = run(config, args.out)
    failed = [g for g in bundle.gates if not g.passed]
    for gate in failed:
        print(f"FAIL {gate.experiment}: {gate.name} measured={gate.measured:.3e} "
              f"threshold={gate.threshold:.3e}", file=sys.stderr)
    for err in bundle.errors:
        print(f"ERROR {err['experiment']}: {err['type']}: {err['message']}", file=sys.stderr)
    print(f"{len(bundle.gates) - len(failed)}/{len(bundle.gates)} gates passed, "
          f"{len(bundle.errors)} errors")
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
