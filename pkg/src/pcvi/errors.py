"""Exception hierarchy.

The CLI maps each class to an exit code: ConfigError -> 2,
PhysicsContractError -> 3, NumericalQualityError -> 4.
"""


class PCVIError(Exception):
    """Base class for all package errors."""


class ConfigError(PCVIError):
    """Setup file failed schema or semantic validation."""


class PhysicsContractError(PCVIError, ValueError):
    """An operation was called outside its physical contract."""


class NumericalQualityError(PCVIError, RuntimeError):
    """A numerical procedure cannot deliver a trustworthy result."""
