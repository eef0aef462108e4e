"""Exception types shared across the package."""


class DeepEsnError(Exception):
    """Base class for all errors raised by this package."""


class InitializationError(DeepEsnError):
    """Raised when a reservoir cannot be built from the given configuration."""


class NumericalError(DeepEsnError):
    """Raised when an iterative numerical routine fails to converge."""


class DataFormatError(DeepEsnError):
    """Raised when a dataset file violates the canonical piano-roll format."""


class ConfigError(DeepEsnError):
    """Raised when an experiment configuration is invalid."""
