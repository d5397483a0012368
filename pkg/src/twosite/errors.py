"""Exception types raised by the twosite package.

Each error also derives from the closest builtin so callers that only know
about ``ValueError``/``RuntimeError`` keep working.
"""
from typing import Optional, Sequence


class TwoSiteError(Exception):
    """Base class for all twosite errors"""


class InvalidParameterError(TwoSiteError, ValueError):
    """Physical parameter outside its allowed range"""


class InvalidStateError(TwoSiteError, ValueError):
    """Density matrix is not Hermitian, unit-trace or positive semidefinite"""


class BasisMismatchError(TwoSiteError, ValueError):
    """Operands are expressed in different bases"""


class ModelMismatchError(TwoSiteError, ValueError):
    """Rates, statistics or model tags do not fit together"""


class DivergentRateError(TwoSiteError, ArithmeticError):
    """Zero-frequency rate diverges (sub-ohmic exponent)"""


class NoExchangeError(TwoSiteError, ValueError):
    """Quantity undefined without inter-site coupling (delta == 0)"""


class ConfigError(TwoSiteError, ValueError):
    """Invalid run configuration"""


class IllConditionedSolveError(TwoSiteError, RuntimeError):
    """No usable null vector, or closed forms with vanishing total rate"""


class DegenerateSteadyStateError(TwoSiteError, RuntimeError):
    """Steady state is not unique; no arbitrary pick is made"""

    def __init__(self, multiplicity: int, singular_values: Optional[Sequence[float]] = None, detail: str = ""):
        self.multiplicity = multiplicity
        self.singular_values = tuple(singular_values) if singular_values is not None else ()
        message = f"Degenerate steady state: null space has dimension {multiplicity}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


# Process exit codes of the command-line interface
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SOLVE_FAILED = 2
