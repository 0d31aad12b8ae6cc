"""``eamsim <scenario-kind> [--config PATH] [--out DIR] [--override key=value ...]``

Exit status: 0 on success, 2 on a configuration error, 3 when a numerical
contract (Hermiticity, normalization, ...) is violated.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KINDS, format_config, load_config
from .errors import ConfigError, ContractViolation
from .scenarios import RUNNERS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eamsim",
        description="Simulate quantum cutting into entangled exciton angular momentum states.",
    )
    ap.add_argument("kind", choices=KINDS, help="scenario to run")
    ap.add_argument("--config", type=Path, help="flat key = value config file (defaults if omitted)")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config value; may be repeated")
    ap.add_argument("--print-config", action="store_true",
                    help="print the resolved configuration and exit")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.kind, args.override)
    except ConfigError as exc:
        print(f"eamsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.print_config:
        sys.stdout.write(format_config(cfg))
        return EXIT_OK

    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"eamsim: cannot create output directory {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        results = RUNNERS[cfg.kind](cfg, args.out)
    except ContractViolation as exc:
        print(f"eamsim: numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    for key, value in results.items():
        print(f"{key} = {value}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
