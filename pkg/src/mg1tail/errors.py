"""Exception types shared across the package."""


class Mg1TailError(Exception):
    """Base class for package-specific errors."""


class UnsupportedModelError(Mg1TailError):
    """Raised when an operation is not defined for the given model variant,
    e.g. a tail-index threshold for an exponential model or a CLT-corrected
    approximation for an infinite-variance model."""


class ResourceBudgetError(Mg1TailError):
    """Raised when a convolution would exceed the configured memory/work
    budget; the message states the required size."""


class NoCrossingError(Mg1TailError):
    """Raised when the exponential and power-law tail curves do not cross
    inside the search interval."""
