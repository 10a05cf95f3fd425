"""Exception types shared across the package."""


class CaAdamError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(CaAdamError):
    """Operands have incompatible or invalid dimensions."""


class NonFiniteError(CaAdamError):
    """A NaN or Inf appeared where only finite values are allowed."""


class StructureError(CaAdamError):
    """A network or summary violates a structural requirement."""


class ConfigError(CaAdamError):
    """A configuration value is missing, malformed, or out of range."""


class DataError(CaAdamError):
    """A dataset could not be loaded, parsed, or partitioned."""
