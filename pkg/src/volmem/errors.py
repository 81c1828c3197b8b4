"""Exception types shared across the package."""


class VolmemError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(VolmemError, ValueError):
    """A model/config parameter violates its constraints."""


class DomainError(VolmemError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class InsufficientDataError(VolmemError, ValueError):
    """Not enough observations for the requested computation."""


class DivergenceError(VolmemError, RuntimeError):
    """A simulation produced a non-finite value.

    ``index`` is the internal step (warmup included) where the first bad
    value appeared.
    """

    def __init__(self, index: int, what: str = "simulation"):
        self.index = int(index)
        super().__init__(
            f"{what} diverged: first non-finite value at internal step {index}"
        )


class DegenerateWeightsError(VolmemError, RuntimeError):
    """All recall weights vanished (no usable similarity information)."""


class FitError(VolmemError, RuntimeError):
    """An estimator failed to converge; carries the attempt trace."""

    def __init__(self, message: str, trace=None):
        self.trace = trace
        super().__init__(message)


class SchemaError(VolmemError, ValueError):
    """A file (CSV/config) does not match the documented schema."""


class ConfigError(VolmemError, ValueError):
    """An experiment configuration is invalid."""
