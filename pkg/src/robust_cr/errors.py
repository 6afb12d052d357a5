"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes or Hilbert-space dimensions do not agree."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. non-Hermitian generator)."""


class StrongCouplingError(RuntimeError):
    """A dressed eigenstate cannot be assigned unambiguously to a bare label."""


class DegenerateQubitsError(ValueError):
    """The two qubit frequencies coincide, so the perturbative shifts diverge."""


class PulseFormatError(ValueError):
    """A pulse file is malformed.  ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(ValueError):
    """Structured input (pulse file, config) does not match the expected schema."""


class SolverError(RuntimeError):
    """The subproblem LP solver failed to converge."""


class SweepError(RuntimeError):
    """Every start failed for some duration of a sweep."""


class ConfigError(ValueError):
    """A run configuration is invalid.  Messages name the offending ``section.key``."""
