from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from hbm.cli.commands import router
from hbm.common.errors import HBMError, InputError, NumericalError
from hbm.common.output import (
    OutputFormat,
    build_document,
    render_csv,
    render_human,
    render_json,
    write_atomic,
)
from hbm.common.rng import MAX_SEED
from hbm.config.settings import USE_SENTRY  # type: ignore[attr-defined]

logger = logging.getLogger(__name__)

_INTERNAL = ("handler", "command", "format", "json", "output", "seed", "no_meta")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        msg = f"seed must be an unsigned 64-bit integer, got {text}"
        raise argparse.ArgumentTypeError(msg)
    return value


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("output")
    group.add_argument(
        "--format",
        choices=[item.value for item in OutputFormat],
        default="human",
    )
    group.add_argument("--json", action="store_true", help="shorthand for --format json")
    group.add_argument(
        "--output",
        type=Path,
        default=None,
        help="write here instead of stdout",
    )
    group.add_argument("--seed", type=_seed, default=0)
    group.add_argument(
        "--no-meta",
        action="store_true",
        help="omit version and timestamp",
    )


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_format: OutputFormat
    seed: int
    output: Path | None
    with_meta: bool
    parameters: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        return cls(
            command=args.command,
            output_format=OutputFormat.JSON if args.json else OutputFormat(args.format),
            seed=args.seed,
            output=args.output,
            with_meta=not args.no_meta,
            parameters={
                key: str(value) if isinstance(value, Path) else value
                for key, value in sorted(vars(args).items())
                if key not in _INTERNAL
            },
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "format": self.output_format.value,
            "seed": self.seed,
            "output": None if self.output is None else str(self.output),
            **self.parameters,
        }


def _rows(result: Any) -> list[dict[str, Any]]:
    if isinstance(result, list):
        return result
    if isinstance(result, dict) and isinstance(result.get("rows"), list):
        return result["rows"]
    return [result] if isinstance(result, dict) else [{"result": result}]


def render(config: RunConfig, result: Any) -> str:
    document = build_document(
        config.command,
        config.to_dict(),
        result,
        with_meta=config.with_meta,
    )
    if config.output_format is OutputFormat.JSON:
        return render_json(document)
    if config.output_format is OutputFormat.CSV:
        return render_csv(_rows(result))
    return render_human(document)


def _report(exc: HBMError) -> int:
    if isinstance(exc, NumericalError):
        logger.error("Numerical guard %r tripped: %s", exc.guard, exc)
        if USE_SENTRY:
            import sentry_sdk

            sentry_sdk.capture_exception(exc)
    else:
        logger.error("%s", exc)
    return exc.exit_code


def run(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand; exit 0 on success, 2 on bad input, 3 on numerical failure."""
    parser = router.build_parser(add_common=add_common_arguments)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        result = args.handler(args)
        # handlers fill in defaults such as the grid; read the config afterwards
        config = RunConfig.from_args(args)
        text = render(config, result)
        if config.output is None:
            sys.stdout.write(text)
        else:
            write_atomic(config.output, text)
            logger.info("Wrote %s output to %s", config.command, config.output)
    except HBMError as exc:
        return _report(exc)
    except OSError as exc:
        return _report(InputError(str(exc)))
    return 0
