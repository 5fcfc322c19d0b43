"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4. Everything else is a bug and propagates.
"""


class DdosflowError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(DdosflowError):
    """Bad CLI arguments, missing input paths, malformed catalog files."""


class SchemaError(ConfigError):
    """Catalog file violates the catalog contract."""


class DataError(DdosflowError):
    """CSV or dataset content that cannot be consumed (missing columns, empty data)."""


class NumericError(DdosflowError):
    """Numeric failure during computation (non-finite loss, bad shapes at runtime)."""


class NonFiniteLossError(NumericError):
    """Training hit a non-finite loss. Carries the history accumulated so far."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class ModelFormatError(DdosflowError):
    """A persisted model file is unreadable or internally inconsistent."""
