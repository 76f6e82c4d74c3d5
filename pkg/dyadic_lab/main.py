"""
Dyadic Lab - Command-Line Entry Point
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from dyadic_lab import __version__
from dyadic_lab.commands import cauchy, norms, sweep, verify
from dyadic_lab.config import APP_NAME, get_settings
from dyadic_lab.core.types import DomainError
from dyadic_lab.schemas import ExperimentConfig

logger = logging.getLogger(__name__)

_COMMANDS = {
    "verify": verify.run,
    "norms": norms.run,
    "cauchy": cauchy.run,
    "sweep": sweep.run,
}

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Dyadic fractional-integral experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, type=Path, help="experiment JSON file")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default: config 'out')")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: config 'seed')")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: DYADIC_LAB_THREADS or 1)")
    return parser


def load_config(path: Path) -> ExperimentConfig:
    return ExperimentConfig.model_validate(json.loads(path.read_text(encoding="utf-8")))


def _format_validation(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        where = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"  {where}: {item['msg']}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        config = load_config(args.config)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"{args.config}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"{args.config}: invalid configuration\n{_format_validation(exc)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        threads = args.threads if args.threads is not None else get_settings().threads
    except ValidationError as exc:
        lines = [f"  DYADIC_LAB_{str(item['loc'][0]).upper()}: {item['msg']}" for item in exc.errors()]
        print("invalid environment settings\n" + "\n".join(lines), file=sys.stderr)
        return EXIT_USAGE
    if threads < 1:
        print(f"--threads must be >= 1, got {threads}", file=sys.stderr)
        return EXIT_USAGE

    updates = {key: value for key, value in (("out", args.out), ("seed", args.seed)) if value is not None}
    config = config.model_copy(update=updates)
    out = Path(config.out)

    logger.info(f"{APP_NAME} {__version__}: {args.command} (config {config.config_hash()}, seed {config.seed})")
    try:
        code = _COMMANDS[args.command](config, out, config.seed, threads)
    except DomainError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logger.info(f"{args.command} finished with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
