from __future__ import annotations

import argparse

import pytest

from hbm.common.routers import CommandRouter


def _router() -> CommandRouter:
    router = CommandRouter(prog="demo")

    @router.register("echo")
    class EchoCommand:
        """Echo a word back."""

        @staticmethod
        def add_arguments(parser: argparse.ArgumentParser) -> None:
            parser.add_argument("--word", required=True)

        @staticmethod
        def handle(args: argparse.Namespace) -> dict[str, str]:
            return {"word": args.word}

    return router


def test_registered_commands_are_dispatched() -> None:
    router = _router()
    args = router.build_parser().parse_args(["echo", "--word", "hi"])

    assert list(router.commands) == ["echo"]
    assert args.handler(args) == {"word": "hi"}


def test_common_arguments_reach_every_subcommand() -> None:
    def add_common(parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--seed", type=int, default=0)

    parser = _router().build_parser(add_common=add_common)
    args = parser.parse_args(["echo", "--word", "x", "--seed", "4"])

    assert args.seed == 4


def test_duplicate_names_are_rejected() -> None:
    router = _router()

    with pytest.raises(ValueError, match="already registered"):
        router.register("echo")(object)
