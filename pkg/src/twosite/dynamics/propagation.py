"""Time evolution: exact exponential of the generator and the closed forms."""
import logging
import math
from typing import Iterable, List, Optional

import numpy as np
import scipy.linalg

from ..baths import RateSet
from ..errors import BasisMismatchError, InvalidParameterError
from ..model import Basis, DensityMatrix, Eigensystem
from .liouvillian import Liouvillian, Model, unvec, vec

logger = logging.getLogger(__name__)

DEFAULT_COND_LIMIT = 1e8
HORIZON_RELAXATION_TIMES = 10.0


def propagator(liouvillian: Liouvillian, t: float, cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """exp(L t) by eigendecomposition, falling back to scaling-and-squaring.

    The fallback is used when the eigenvector matrix is ill-conditioned
    (generator defective or close to it).
    """
    eigenvalues, vectors, condition = liouvillian.spectrum
    if not math.isfinite(condition) or condition > cond_limit:
        logger.debug(f"Eigenvector condition number {condition:.3e} > {cond_limit:.1e}; using scipy expm")
        return scipy.linalg.expm(liouvillian.matrix * t)
    return vectors @ np.diag(np.exp(eigenvalues * t)) @ np.linalg.inv(vectors)


def propagate(liouvillian: Liouvillian, rho0: DensityMatrix, t: float,
              cond_limit: float = DEFAULT_COND_LIMIT) -> DensityMatrix:
    """rho(t) = exp(L t) rho0.

    Raises:
        InvalidParameterError: if t < 0.
        BasisMismatchError: if rho0 is not in the Liouvillian's basis.
    """
    if not t >= 0.0:
        raise InvalidParameterError(f"Propagation time must be >= 0, got {t!r}")
    if rho0.basis != liouvillian.basis:
        raise BasisMismatchError(
            f"Initial state is in the {rho0.basis.value} basis, Liouvillian in {liouvillian.basis.value}")
    if t == 0.0:
        return rho0
    vector = propagator(liouvillian, t, cond_limit) @ vec(rho0.data)
    return DensityMatrix(unvec(vector), liouvillian.basis).hermitized()


def trajectory(liouvillian: Liouvillian, rho0: DensityMatrix, times: Iterable[float],
               cond_limit: float = DEFAULT_COND_LIMIT) -> List[DensityMatrix]:
    return [propagate(liouvillian, rho0, float(t), cond_limit) for t in times]


def analytic_state(rates: RateSet, eig: Eigensystem, rho0_eigen: DensityMatrix, t: float) -> DensityMatrix:
    """Closed-form solution of the global model in the eigen basis.

    Populations relax at Gamma_tot(+-) + Gamma_tot(-+) towards the steady state,
    the coherence <+|rho|-> rotates at the gap omega and decays at
    (Gamma_tot(+-) + Gamma_tot(-+) + gamma_phi) / 2.
    """
    if rho0_eigen.basis != Basis.EIGEN:
        raise BasisMismatchError("analytic_state needs the initial state in the eigen basis")
    if not t >= 0.0:
        raise InvalidParameterError(f"Time must be >= 0, got {t!r}")

    total = rates.gamma_total
    p_plus0, p_minus0 = rho0_eigen.populations
    coherence0 = rho0_eigen.coherence
    if total == 0.0:
        logger.warning("Zero total transition rate (no exchange): populations stay at their initial values")
        p_plus, p_minus = p_plus0, p_minus0
    else:
        relax = math.exp(-total * t)
        p_plus_ss = rates.gamma_tot_mp / total
        p_minus_ss = rates.gamma_tot_pm / total
        p_plus = p_plus_ss + (p_plus0 - p_plus_ss) * relax
        p_minus = p_minus_ss + (p_minus0 - p_minus_ss) * relax

    decay = 0.5 * (total + rates.gamma_phi_eigen)
    coherence = coherence0 * np.exp((-1j * eig.omega - decay) * t)
    return DensityMatrix([[p_plus, coherence], [np.conj(coherence), p_minus]], Basis.EIGEN)


def relaxation_horizon(liouvillian: Liouvillian) -> float:
    """Default time after which the state is considered stationary.

    10 / (Gamma_tot(+-) + Gamma_tot(-+)) for the eigen-basis models; the local
    model has no such rate, so its slowest Liouvillian decay rate is used.
    """
    if liouvillian.model == Model.LOCAL:
        rate = liouvillian.slowest_decay_rate()
    else:
        rate = liouvillian.rates.gamma_total
    if rate <= 0.0:
        raise InvalidParameterError("No relaxation: the dynamics never reaches a unique steady state")
    return HORIZON_RELAXATION_TIMES / rate


def steady_state_by_propagation(liouvillian: Liouvillian, rho0: DensityMatrix,
                                horizon: Optional[float] = None) -> DensityMatrix:
    """Propagate rho0 to ``horizon`` (default ``relaxation_horizon``) as a steady-state cross-check."""
    if horizon is None:
        horizon = relaxation_horizon(liouvillian)
    logger.debug(f"Propagating to t = {horizon:.6g} for a steady-state estimate")
    return propagate(liouvillian, rho0, horizon)
