"""Exception types shared across the engine.

Every error raised by ringforge derives from RingforgeError so callers can
catch the whole family; the CLI maps subclasses onto exit codes.
"""

from __future__ import annotations


class RingforgeError(Exception):
    """Base class for all ringforge errors."""


class ValidationError(RingforgeError):
    """Input violates a structural rule (bad value, broken invariant)."""


class FormatError(ValidationError):
    """Malformed text input; carries a 1-based line number or char offset."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line})"
        elif offset is not None:
            loc = f" (offset {offset})"
        super().__init__(message + loc)
        self.line = line
        self.offset = offset


class NotFoundError(RingforgeError):
    """A referenced id, edge, or group does not exist."""


class ConflictError(RingforgeError):
    """An id collides with one already registered."""


class BoundsError(RingforgeError):
    """An index or position is outside its valid range."""


class InfeasibleLayoutError(RingforgeError):
    """Layout parameters leave no angular room for region arcs."""


class VersionError(RingforgeError):
    """A project file declares an unsupported format version."""


class RasterizationError(RingforgeError):
    """PNG rasterization failed; carries the underlying cause."""
