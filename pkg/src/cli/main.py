"""
Command-line entry point.

Exit codes: 0 success, 2 configuration errors, 3 simulation errors,
4 I/O errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.cli.config import parse_scenario
from src.cli.runner import package_version, run_scenario
from src.config.settings import get_settings
from src.core.exceptions import SimulationError
from src.core.types import EngineKind
from src.utils.data_loader import DataLoader
from src.utils.logging_formatter import configure_logging

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_IO = 4

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etp-sim",
        description="Free-electron and quantum-light scattering simulator",
    )
    parser.add_argument("--log-level", default=None, help="Console log level")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a scenario and write its results")
    run.add_argument("--config", required=True, type=Path, help="Scenario JSON")
    run.add_argument("--out", default=None, help="Output directory")
    run.add_argument("--svg", action="store_true", default=None, help="Render SVG plots")
    run.add_argument(
        "--engine",
        choices=[k.value for k in EngineKind],
        default=None,
        help="Override the scenario's evolution engine",
    )

    validate = sub.add_parser("validate", help="Check a scenario document only")
    validate.add_argument("--config", required=True, type=Path, help="Scenario JSON")

    sub.add_parser("version", help="Print the package version")
    return parser


def _load(path: Path):
    raw = DataLoader(path.parent).load_json(path.name)
    return parse_scenario(raw)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "version":
        print(package_version())
        return EXIT_OK

    settings = get_settings()
    configure_logging(settings.run.logging_config, args.log_level or settings.run.log_level)

    try:
        config = _load(args.config)
    except (ValidationError, json.JSONDecodeError) as e:
        logger.error(f"Invalid scenario {args.config}: {e}")
        print(f"invalid scenario: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Cannot read {args.config}: {e}")
        print(f"cannot read scenario: {e}", file=sys.stderr)
        return EXIT_IO

    if args.command == "validate":
        print(f"{args.config}: valid {config.kind} scenario")
        return EXIT_OK

    engine = EngineKind(args.engine) if args.engine else None
    try:
        outcome = run_scenario(
            config,
            out_dir=args.out,
            svg=args.svg,
            engine=engine,
            base_path=args.config.parent,
        )
    except SimulationError as e:
        print(f"{e.name}: {e}", file=sys.stderr)
        return EXIT_SIMULATION
    except OSError as e:
        logger.error(f"I/O failure: {e}")
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO

    for path in outcome.paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
