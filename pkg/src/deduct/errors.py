"""Exception hierarchy shared across the package.

CLI exit codes are derived from these types: configuration problems exit
with 2, training divergence with 3, dataset I/O failures with 4.
"""


class DeductError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(DeductError):
    """Invalid or inconsistent configuration values."""

    exit_code = 2


class TrainingDivergenceError(DeductError):
    """Training produced a non-finite loss or gradient.

    ``path`` names the offending parameter when known.
    """

    exit_code = 3

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{message} (parameter: {path})")
        self.path = path


class DatasetIOError(DeductError):
    """Dataset file could not be read or written.

    ``line`` is the 1-based line number for parse failures.
    """

    exit_code = 4

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DimensionError(DeductError):
    """Tensor shapes are incompatible with the requested operation."""


class DomainError(DeductError):
    """Numeric input outside the mathematically valid domain."""
