from __future__ import annotations

import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol, TypeVar, cast


class Command(Protocol):
    """A CLI subcommand: declares its flags and turns parsed args into a result."""

    @staticmethod
    def add_arguments(parser: argparse.ArgumentParser) -> None: ...

    @staticmethod
    def handle(args: argparse.Namespace) -> Any: ...


T = TypeVar("T", bound=Any)


@dataclass
class CommandRouter:
    """Router for subcommand classes."""

    prog: str = "hbm"
    description: str = ""

    _commands: dict[str, type[Command]] = field(default_factory=dict)
    _help: dict[str, str] = field(default_factory=dict)

    def register(
        self,
        name: str,
        help: str | None = None,  # noqa: A002
    ) -> Callable[[T], T]:
        def decorator(command: T) -> T:
            if name in self._commands:
                msg = f"Subcommand {name!r} is already registered"
                raise ValueError(msg)
            self._commands[name] = command
            self._help[name] = help or (command.__doc__ or "").strip().split("\n")[0]
            return cast(T, command)

        return decorator

    @property
    def commands(self) -> dict[str, type[Command]]:
        return dict(self._commands)

    def build_parser(
        self,
        add_common: Callable[[argparse.ArgumentParser], None] | None = None,
    ) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=self.prog, description=self.description)
        subparsers = parser.add_subparsers(dest="command", required=True)
        for name, command in self._commands.items():
            subparser = subparsers.add_parser(name, help=self._help[name])
            if add_common is not None:
                add_common(subparser)
            command.add_arguments(subparser)
            subparser.set_defaults(handler=command.handle)
        return parser
