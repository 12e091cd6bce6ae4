"""Exceptions shared across the engine."""

from .scalars import PrecisionError

__all__ = ["InvariantViolation", "PrecisionError", "RegionError"]


class InvariantViolation(RuntimeError):
    """A structural law of the geometry or algebra failed to hold.

    This always indicates a bug or an unsound configuration, never bad user
    input; the command line maps it to a dedicated exit code.
    """


class RegionError(ValueError):
    """A query needs chambers outside the certified part of the explored ball."""
