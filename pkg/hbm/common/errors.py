from __future__ import annotations


class HBMError(Exception):
    """Base class for every failure raised by the package."""

    exit_code = 3


class InputError(HBMError):
    exit_code = 2


class DSLParseError(InputError):
    def __init__(self, message: str, text: str, offset: int) -> None:
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at byte {offset} in {text!r}")


class GridError(InputError):
    pass


class NumericalError(HBMError):
    """A numerical guard tripped. ``guard`` names it in CLI diagnostics."""

    guard = "numerical"


class ConvexityError(NumericalError):
    guard = "convexity"

    def __init__(self, message: str, node: int | None = None) -> None:
        self.node = node
        super().__init__(message)


class ConditioningError(NumericalError):
    guard = "conditioning"


class SolverError(NumericalError):
    guard = "solver"

    def __init__(self, message: str, residual: float | None = None) -> None:
        self.residual = residual
        super().__init__(message)


class WulffError(NumericalError):
    guard = "wulff-hull"
