"""Exception types shared across the package."""


class MatprobeError(Exception):
    """Base class for all package errors."""


class DimensionError(MatprobeError, ValueError):
    """Array shapes or lengths do not agree."""


class ValidationError(MatprobeError, ValueError):
    """A parameter is outside its admissible range."""


class CapabilityError(MatprobeError, RuntimeError):
    """The requested computation is not available for this object or size."""
