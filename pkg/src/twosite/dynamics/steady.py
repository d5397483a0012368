"""Stationary states: null space of the generator, closed forms and the Gibbs state."""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.special import expit

from ..baths import RateSet
from ..errors import DegenerateSteadyStateError, IllConditionedSolveError, InvalidParameterError
from ..model import Basis, DensityMatrix, SystemParams, change_basis, diagonalize
from .liouvillian import Liouvillian, Model, unvec

logger = logging.getLogger(__name__)

DEFAULT_NULL_RTOL = 1e-12
DEFAULT_GAP_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class SteadyStateSolution:
    state: DensityMatrix
    singular_values: Tuple[float, ...]
    residual: float

    @property
    def null_ratio(self) -> float:
        """Smallest over largest singular value of L."""
        return self.singular_values[-1] / self.singular_values[0]


def _rate_determined_state(liouvillian: Liouvillian) -> Optional[DensityMatrix]:
    """Closed-form steady state when slow transition rates fall under the SVD tolerance.

    In the eigen-basis models the coherences rotate at omega > 0, so the null
    space is one-dimensional exactly when Gamma_tot(+-) + Gamma_tot(-+) > 0.
    Classical rates obey Gamma(+-) = Gamma(-+) at every temperature, so their
    limit is I/2 even where both underflow to zero.
    """
    if liouvillian.model == Model.LOCAL or liouvillian.eig.no_exchange:
        return None
    rates = liouvillian.rates
    if rates.gamma_total > 0.0:
        return steady_state_analytic(rates)
    if liouvillian.model == Model.CLASSICAL:
        logger.warning("Classical transition rates underflow to zero; using the symmetric-rate limit I/2")
        return DensityMatrix(0.5 * np.eye(2), Basis.EIGEN)
    return None


def solve_steady_state(liouvillian: Liouvillian, rtol: float = DEFAULT_NULL_RTOL) -> SteadyStateSolution:
    """Null vector of L from its singular-value decomposition.

    Rates too slow for the relative tolerance, or too slow to separate the
    null vector from the next singular vector (below DEFAULT_GAP_RTOL * max),
    are resolved from the rate structure of the eigen-basis models instead of
    being reported as degenerate.

    Raises:
        DegenerateSteadyStateError: two or more singular values below rtol * max
            and no transition between the eigenstates.
        IllConditionedSolveError: no singular value below rtol * max.
    """
    _, singular_values, vh = scipy.linalg.svd(liouvillian.matrix)
    largest = float(singular_values[0])
    tolerance = rtol * largest
    multiplicity = int(np.count_nonzero(singular_values <= tolerance))
    logger.debug(f"{liouvillian.model.value} singular values: {singular_values}")

    # a null vector is accurate only to eps * sigma_max / sigma_gap
    unresolved_gap = multiplicity == 1 and singular_values[-2] <= DEFAULT_GAP_RTOL * largest
    if largest > 0.0 and (multiplicity >= 2 or unresolved_gap):
        fallback = _rate_determined_state(liouvillian)
        if fallback is not None:
            logger.debug(f"Smallest singular values {singular_values[-2:]} against {tolerance:.3e}; "
                         f"steady state from the rates")
            return SteadyStateSolution(
                state=fallback,
                singular_values=tuple(float(s) for s in singular_values),
                residual=liouvillian.residual(fallback),
            )
    if largest == 0.0 or multiplicity >= 2:
        detail = "no exchange between sites" if liouvillian.eig.no_exchange else f"{liouvillian.model.value} model"
        raise DegenerateSteadyStateError(max(multiplicity, 2), singular_values, detail)
    if multiplicity == 0:
        raise IllConditionedSolveError(
            f"Smallest singular value {singular_values[-1]:.3e} is not below {tolerance:.3e}; no null vector")

    null_vector = vh[-1].conj()
    rho = unvec(null_vector)
    trace = np.trace(rho)
    if abs(trace) == 0.0:
        raise IllConditionedSolveError("Null vector of the Liouvillian is traceless")
    state = DensityMatrix(rho / trace, liouvillian.basis).hermitized()
    return SteadyStateSolution(
        state=state,
        singular_values=tuple(float(s) for s in singular_values),
        residual=liouvillian.residual(state),
    )


def steady_state_numeric(liouvillian: Liouvillian, rtol: float = DEFAULT_NULL_RTOL) -> DensityMatrix:
    return solve_steady_state(liouvillian, rtol).state


def steady_state_analytic(rates: RateSet) -> DensityMatrix:
    """Eigen-diagonal steady state with P++ = Gamma_tot(-+)/Gamma and P-- = Gamma_tot(+-)/Gamma.

    Raises:
        IllConditionedSolveError: when the total transition rate vanishes.
    """
    total = rates.gamma_total
    if total <= 0.0:
        raise IllConditionedSolveError("Total transition rate is zero; closed-form steady state undefined")
    p_plus = rates.gamma_tot_mp / total
    p_minus = rates.gamma_tot_pm / total
    return DensityMatrix(np.diag([p_plus, p_minus]), Basis.EIGEN)


def steady_state_from_occupations(n_bar: float) -> DensityMatrix:
    """n_bar/(2 n_bar + 1) |+><+| + (n_bar + 1)/(2 n_bar + 1) |-><-| (equal spectral densities)."""
    if n_bar < 0.0 or math.isnan(n_bar):
        raise InvalidParameterError(f"Mean occupation must be >= 0, got {n_bar!r}")
    if math.isinf(n_bar):
        return DensityMatrix(0.5 * np.eye(2), Basis.EIGEN)
    denominator = 2.0 * n_bar + 1.0
    return DensityMatrix(np.diag([n_bar / denominator, (n_bar + 1.0) / denominator]), Basis.EIGEN)


def gibbs_state(params: SystemParams, temperature: float, basis: Union[Basis, str] = Basis.SITE) -> DensityMatrix:
    """exp(-H/k_B T)/Z, returned in the site basis by default; |-><-| at T = 0."""
    if temperature < 0.0 or math.isnan(temperature):
        raise InvalidParameterError(f"Temperature must be >= 0, got {temperature!r}")
    eig = diagonalize(params)
    if temperature == 0.0:
        p_plus = 0.0
    elif math.isinf(temperature):
        p_plus = 0.5
    else:
        p_plus = float(expit(-eig.omega / temperature))
    eigen_state = DensityMatrix(np.diag([p_plus, 1.0 - p_plus]), Basis.EIGEN)
    return change_basis(eigen_state, eig, basis)
