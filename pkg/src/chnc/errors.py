"""Exception types shared across the package.

ConfigError maps to CLI exit code 2, DataError to 3. Anything else that
escapes a pipeline stage is treated as an internal invariant failure (4).
"""


class ChncError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(ChncError):
    """Invalid configuration or violated operation precondition."""


class DataError(ChncError):
    """Malformed or unusable input data."""
