"""Custom error definitions.

Every error raised by the analysis modules derives from :class:`PathRankError`
and carries the process exit code the CLI returns for it: ``2`` for bad input,
``3`` for exhausted resource limits, ``4`` for measure/model combinations that
do not exist.  Numerical and evaluation failures use the generic ``1``.
"""

from __future__ import annotations

from typing import Iterable, Optional, Tuple


class PathRankError(Exception):
    """Base error for path centrality analyses."""

    exit_code: int = 1


class InputError(PathRankError):
    """Input data or arguments violate a documented contract."""

    exit_code = 2


class PathParseError(InputError):
    """A path file or temporal edge file could not be parsed."""

    def __init__(self, line_number: int, reason: str) -> None:
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class ConfigError(InputError):
    """Invalid configuration or invalid argument combination."""


class SplitError(InputError):
    """A train/test split produced an empty side."""


class ResourceLimitError(PathRankError):
    """An enumeration would exceed the configured limit."""

    exit_code = 3

    def __init__(self, message: str, *, limit: Optional[int] = None, required: Optional[int] = None) -> None:
        super().__init__(message)
        self.limit = limit
        self.required = required


class UnsupportedMeasureError(PathRankError):
    """The requested measure cannot be computed for the model kind."""

    exit_code = 4

    def __init__(self, measure: str, model_kind: str) -> None:
        super().__init__(
            f"{measure} cannot be computed for a {model_kind} model: "
            "it carries no information on path starts and ends"
        )
        self.measure = measure
        self.model_kind = model_kind


class NumericalError(PathRankError):
    """A linear solve failed or violated its residual tolerance."""


class SingularModelError(NumericalError):
    """``I - Q`` is singular: some transient states can never be absorbed."""

    def __init__(self, states: Iterable[str]) -> None:
        self.states: Tuple[str, ...] = tuple(states)
        super().__init__(
            "I - Q is singular; closed transient states without absorption: "
            + ", ".join(self.states)
        )


class EvaluationError(PathRankError):
    """A ranking evaluation is undefined (e.g. only one label class)."""


__all__ = [
    "PathRankError",
    "InputError",
    "PathParseError",
    "ConfigError",
    "SplitError",
    "ResourceLimitError",
    "UnsupportedMeasureError",
    "NumericalError",
    "SingularModelError",
    "EvaluationError",
]
