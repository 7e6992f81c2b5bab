"""Exception types shared across the package."""


class WindhelError(Exception):
    """Base class for all package errors."""


class FieldFormatError(WindhelError):
    """Malformed or inconsistent field/mask/series file."""


class OutOfDomainError(WindhelError):
    """Point outside the grid bounding box (tracers use this as a stop signal)."""


class CoincidentPointsError(WindhelError):
    """Two curve points coincide in the plane at a shared height."""


class UndersampledAngleError(WindhelError):
    """Consecutive angle samples jump by >= pi; the series is too coarse."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"angle jump >= pi between samples {index} and {index + 1}")


class RegimeError(WindhelError):
    """Input outside the validity regime of a closed-form formula."""
