"""Exception hierarchy with stable error codes.

Every library failure that the command line surfaces carries a ``code``
string; the CLI prints it verbatim in its error record.
"""

from typing import ClassVar


class StellarError(ValueError):
    """Base class for validation and computation errors."""

    code: ClassVar[str] = "INVALID_ARGUMENT"


class InvalidArgumentError(StellarError):
    """An argument is outside its documented domain."""


class EmptyStateError(StellarError):
    """All amplitudes (or coefficients, or stars) are zero or missing."""

    code = "EMPTY_STATE"


class DimensionMismatchError(StellarError):
    """Sizes of inputs do not agree."""

    code = "DIMENSION_MISMATCH"


class PermanentSizeError(StellarError):
    """Matrix too large for the exact permanent."""

    code = "PERMANENT_TOO_LARGE"


class OpenLoopError(StellarError):
    """A trajectory or path that must be closed is not."""

    code = "OPEN_LOOP"


class UnsupportedDriveError(StellarError):
    """The requested integrator cannot handle this drive."""

    code = "UNSUPPORTED_DRIVE"


class BasisRankError(StellarError):
    """Derivative augmentation did not yield an independent basis."""

    code = "BASIS_RANK_DEFICIENT"
