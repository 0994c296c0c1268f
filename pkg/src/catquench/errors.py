"""Exception hierarchy shared across the package."""


class CatquenchError(Exception):
    """Base class for all package errors."""


class ConfigError(CatquenchError):
    """Invalid user configuration (CLI exit code 1)."""


class SizingError(ConfigError):
    """Requested Hilbert-space dimension is absurdly large."""


class DimensionMismatchError(CatquenchError):
    """Operands built over incompatible bases."""


class NumericalError(CatquenchError):
    """Numerical failure, e.g. an eigensolver not converging (CLI exit code 2)."""


class ConvergenceError(CatquenchError):
    """Truncation or iteration did not converge within resources (CLI exit code 3)."""


class ExtentError(ConfigError):
    """Phase-space grid does not capture the state's support (CLI exit code 1)."""


class InvertedWellError(CatquenchError):
    """Weak-coupling oscillator approximation has a non-positive stiffness."""
