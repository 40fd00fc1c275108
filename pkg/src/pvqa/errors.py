"""Exception types shared across the package.

Domain errors subclass ``ValueError`` so callers that only care about bad input
can catch that; the CLI maps the specific classes onto exit codes.
"""


class CircuitError(ValueError):
    """Malformed gate or circuit (bad indices, arity, parameter binding)."""


class DimensionError(ValueError):
    """Operands whose qubit counts or matrix shapes do not line up."""


class NonHermitianError(ValueError):
    """An observable was required to be Hermitian and is not."""


class TooManyQubitsError(ValueError):
    """A dense representation was requested past its qubit cap."""


class ProblemError(ValueError):
    """Ill-posed Poisson problem (zero source, non-solvable periodic source...)."""


class SingularSystemError(ProblemError):
    pass


class TranspileError(ValueError):
    """Circuit cannot be lowered onto the requested target."""


class ConfigError(ValueError):
    """Run configuration could not be parsed or validated."""


class DegenerateCostError(ArithmeticError):
    """The quadratic form vanished, so the optimal scale r is undefined."""
