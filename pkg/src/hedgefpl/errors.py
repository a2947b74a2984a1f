"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Incompatible or unsupported configuration (mismatched sizes, wrong family, ...)."""


class DataError(ValueError):
    """Bad data encountered at runtime (non-finite losses, exhausted replay, ...)."""


class NumericError(ArithmeticError):
    """A numerical routine could not reach the requested accuracy."""


class GraphError(ValueError):
    """Structural problem with a graph instance (no source-sink path, ...)."""


class CapacityError(RuntimeError):
    """An enumeration guard was exceeded."""
