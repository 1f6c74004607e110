"""
Error types for ratnet.

Every error carries the process exit code the CLI uses when it reaches the top level.
"""

from typing import Optional


class RatnetError(Exception):
    """Base class for all ratnet errors."""

    exit_code = 1


class ConfigError(RatnetError, ValueError):
    """Invalid configuration, flag or model spec."""

    exit_code = 2


class SpecSyntaxError(ConfigError):
    """Model spec text that does not match the grammar."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class DataError(RatnetError, ValueError):
    """Unreadable or inconsistent input data."""

    exit_code = 3


class IdxFormatError(DataError):
    """IDX container that violates the format."""


class IdxMagicError(IdxFormatError):
    """IDX file with an unexpected magic number."""


class IdxTruncatedError(IdxFormatError):
    """IDX file shorter than its header announces."""


class IdxDimensionError(IdxFormatError):
    """IDX header dimensions that disagree with the payload or the companion file."""


class EmptyDatasetError(DataError):
    """Dataset without any rows."""


class DimensionMismatchError(DataError):
    """Shapes that cannot be combined."""


class NumericError(RatnetError, ArithmeticError):
    """Numeric failure such as a non-finite loss."""

    exit_code = 4


class NonFiniteError(NumericError):
    """A NaN or infinity where a finite value is required."""

    def __init__(
        self,
        message: str,
        index: Optional[int] = None,
        slot: Optional[str] = None,
        step: Optional[int] = None,
    ):
        super().__init__(message)
        self.index = index
        self.slot = slot
        self.step = step


class DegeneratePadeError(NumericError):
    """Padé linear system that is singular or nearly so."""


class PoleError(NumericError):
    """Rational function evaluated at (or next to) a pole."""

    def __init__(self, x: float):
        super().__init__(f"Denominator vanishes at x={x!r}")
        self.x = x


class StaleCacheError(RatnetError, RuntimeError):
    """Backward pass requested without a matching forward pass."""
