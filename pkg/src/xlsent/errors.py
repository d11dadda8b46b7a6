"""Exception hierarchy shared by every xlsent module."""

from __future__ import annotations


class XlsentError(Exception):
    """Base class for all errors raised by xlsent."""


class SizeError(XlsentError, ValueError):
    """Shapes or lengths do not agree, or an input is empty."""


class NumericDomainError(XlsentError, ValueError):
    """A value is non-finite or outside the domain of an operation."""


class DegenerateSystemError(XlsentError, ValueError):
    """A linear system is rank deficient or under-determined."""


class ArgumentError(XlsentError, ValueError):
    """A caller-supplied argument violates an operation's precondition."""


class FormatError(XlsentError, ValueError):
    """An input file does not follow its documented format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TrainingError(XlsentError, RuntimeError):
    """Training cannot make progress on the supplied data."""
