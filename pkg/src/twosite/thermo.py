"""Heat currents, the coherence-current identity and Fourier-law diagnostics.

Sign convention: J_i > 0 means energy flows from bath i into the system.
Currents carry units of energy squared (energy per unit time with hbar = 1).
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .baths import BathSpec, RateSet, SpectralDensity, Statistics, effective_spectral_density, occupation
from .dynamics.liouvillian import Liouvillian, Model
from .dynamics.propagation import propagate
from .errors import BasisMismatchError, InvalidParameterError, InvalidStateError, ModelMismatchError, NoExchangeError
from .model import Basis, DensityMatrix, Eigensystem, SystemParams, change_basis, site_coherence

logger = logging.getLogger(__name__)

# Saturation prefactor printed in the figure caption (kappa * delta^2 / 4);
# the closed form from the steady state gives 1/2.
CAPTION_SATURATION_FACTOR = 0.25
CLOSED_FORM_SATURATION_FACTOR = 0.5


@dataclass(frozen=True, eq=False)
class CurrentReport:
    """Input currents of both baths and the energy balance of the system."""
    j1: float
    j2: float
    dH_dt: float
    model: Model
    state: DensityMatrix

    @property
    def first_law_residual(self) -> float:
        return self.j1 + self.j2 - self.dH_dt


@dataclass(frozen=True)
class OccupationGradient:
    n_bar: float
    delta_n: float
    delta_n_linearized: float
    relative_error: float


def energy_expectation(liouvillian: Liouvillian, rho: DensityMatrix) -> float:
    """<H_S> = Tr(rho H_S) with H_S in the Liouvillian's basis."""
    if rho.basis != liouvillian.basis:
        raise BasisMismatchError(f"State in {rho.basis.value} basis, Liouvillian in {liouvillian.basis.value}")
    return float(np.trace(rho.data @ liouvillian.hamiltonian).real)


def current_trace(liouvillian: Liouvillian, bath_index: int, rho: DensityMatrix) -> float:
    """Tr{L_i[rho] H_S} for bath i (0 or 1)."""
    if bath_index not in (0, 1):
        raise InvalidParameterError(f"bath_index must be 0 or 1, got {bath_index}")
    dissipated = liouvillian.apply_dissipator(bath_index, rho)
    return float(np.trace(dissipated @ liouvillian.hamiltonian).real)


def energy_rate(liouvillian: Liouvillian, rho: DensityMatrix) -> float:
    """d<H_S>/dt = Tr{L[rho] H_S}; the coherent part contributes nothing."""
    return float(np.trace(liouvillian.apply(rho) @ liouvillian.hamiltonian).real)


def current_report(liouvillian: Liouvillian, rho: DensityMatrix) -> CurrentReport:
    return CurrentReport(
        j1=current_trace(liouvillian, 0, rho),
        j2=current_trace(liouvillian, 1, rho),
        dH_dt=energy_rate(liouvillian, rho),
        model=liouvillian.model,
        state=rho,
    )


def energy_rate_finite_difference(liouvillian: Liouvillian, rho0: DensityMatrix, t: float, step: float) -> float:
    """Second-order finite difference of <H_S>(t) along the propagated trajectory."""
    if step <= 0.0:
        raise InvalidParameterError(f"Finite-difference step must be > 0, got {step!r}")

    def energy_at(time: float) -> float:
        return energy_expectation(liouvillian, propagate(liouvillian, rho0, time))

    if t >= step:
        return (energy_at(t + step) - energy_at(t - step)) / (2.0 * step)
    # one-sided near t = 0
    return (-3.0 * energy_at(t) + 4.0 * energy_at(t + step) - energy_at(t + 2.0 * step)) / (2.0 * step)


def current_rates(rates: RateSet, eig: Eigensystem, rho: DensityMatrix, bath_index: int = 0) -> float:
    """J_i = -omega Gamma^(i)_{+-} P++ + omega Gamma^(i)_{-+} P--, valid for any state."""
    p_plus, p_minus = change_basis(rho, eig, Basis.EIGEN).populations
    return eig.omega * (-rates.gamma_plus_minus[bath_index] * p_plus
                        + rates.gamma_minus_plus[bath_index] * p_minus)


def _require_eigen_diagonal(rho: DensityMatrix, eig: Eigensystem, tol: float = 1e-10) -> DensityMatrix:
    eigen = change_basis(rho, eig, Basis.EIGEN)
    if not eigen.is_diagonal(tol):
        raise InvalidStateError(f"State must be diagonal in the eigen basis (|<+|rho|->| = {abs(eigen.coherence):.3e})")
    return eigen


def current_analytic(rates: RateSet, eig: Eigensystem, rho_ss: DensityMatrix) -> float:
    """J_1 = -J~_1(omega) omega (P-- - P++) delta_n / 2 with delta_n = n2 - n1.

    Returns 0 (and logs a warning) when delta == 0.

    Raises:
        ModelMismatchError: for classical rates or unequal spectral densities.
    """
    if rates.statistics != Statistics.QUANTUM:
        raise ModelMismatchError("current_analytic applies to the global quantum model only")
    if not rates.equal_spectral_densities:
        raise ModelMismatchError("current_analytic assumes identical spectral densities; use current_closed_form")
    eigen = _require_eigen_diagonal(rho_ss, eig)
    if eig.no_exchange:
        logger.warning("delta = 0: heat current is identically zero (no exchange)")
        return 0.0
    p_plus, p_minus = eigen.populations
    delta_n = rates.occupations[1] - rates.occupations[0]
    return -rates.j_tilde[0] * eig.omega * (p_minus - p_plus) * delta_n / 2.0


def current_closed_form(rates: RateSet, eig: Eigensystem) -> float:
    """Steady-state J_1 = omega J~_1 J~_2 (n1 - n2) / (Gamma_tot(+-) + Gamma_tot(-+)).

    For equal ohmic baths this is kappa delta^2 (n1 - n2) / (2 (n1 + n2 + 1)).
    """
    if rates.statistics != Statistics.QUANTUM:
        raise ModelMismatchError("current_closed_form applies to the global quantum model only")
    numerator = eig.omega * rates.j_tilde[0] * rates.j_tilde[1] * (rates.occupations[0] - rates.occupations[1])
    if numerator == 0.0:
        return 0.0
    return numerator / rates.gamma_total


def saturation_current(spectral: SpectralDensity, eig: Eigensystem) -> float:
    """Limit of J_1 for n1 >> 1 >> n2: J~(omega) omega / 2 (kappa delta^2 / 2 when ohmic)."""
    return CLOSED_FORM_SATURATION_FACTOR * effective_spectral_density(spectral, eig) * eig.omega


def caption_saturation_current(spectral: SpectralDensity, eig: Eigensystem) -> float:
    """The kappa delta^2 / 4 plateau value quoted with the temperature sweep figure."""
    return CAPTION_SATURATION_FACTOR * effective_spectral_density(spectral, eig) * eig.omega


def coherence_current_identity(rho_ss: DensityMatrix, eig: Eigensystem) -> Tuple[complex, float]:
    """Return (rho_12, P-- - P++) for an eigen-diagonal state.

    The two are tied by P-- - P++ = -rho_12 / (alpha+ alpha-).

    Raises:
        NoExchangeError: when delta == 0.
    """
    if eig.no_exchange:
        raise NoExchangeError("The coherence-current identity needs delta > 0")
    eigen = _require_eigen_diagonal(rho_ss, eig)
    p_plus, p_minus = eigen.populations
    return site_coherence(eigen, eig), p_minus - p_plus


def coherence_identity_residual(rho_ss: DensityMatrix, eig: Eigensystem) -> float:
    rho12, population_difference = coherence_current_identity(rho_ss, eig)
    return abs(population_difference + rho12 / eig.exchange_coupling)


def current_local(rates: RateSet, params: SystemParams, rho: DensityMatrix) -> float:
    """J_1 of the local model: -gamma_1(0) delta Re[rho_12] (site basis)."""
    if rho.basis != Basis.SITE:
        raise BasisMismatchError("current_local needs the state in the site basis")
    return -rates.gamma0[0] * params.delta * rho.coherence.real


def current_classical(rates: RateSet, eig: Eigensystem, rho: DensityMatrix) -> float:
    """J_1 of the classical model: -(Gamma^(1)c / alpha+ alpha-) omega Re[rho_12].

    Gamma^(1)c = gamma_1c(omega) (alpha+ alpha-)^2 is the classical transition
    rate; for eigen-diagonal states this equals Tr{L_1[rho] H_S}.

    Raises:
        ModelMismatchError: for quantum rates.
        NoExchangeError: when delta == 0.
    """
    if rates.statistics != Statistics.CLASSICAL:
        raise ModelMismatchError("current_classical needs classical bath rates")
    if eig.no_exchange:
        raise NoExchangeError("The classical current formula divides by alpha+ alpha- and needs delta > 0")
    rho12 = site_coherence(rho, eig)
    return -(rates.gamma_plus_minus[0] / eig.exchange_coupling) * eig.omega * rho12.real


def occupation_gradient(bath1: BathSpec, bath2: BathSpec, omega: float) -> OccupationGradient:
    """Mean occupation, delta_n = n2 - n1 and its high-temperature form (T2 - T1)/omega."""
    if not omega > 0.0:
        raise InvalidParameterError(f"omega must be > 0, got {omega!r}")
    n1 = occupation(omega, bath1.temperature)
    n2 = occupation(omega, bath2.temperature)
    delta_n = n2 - n1
    linearized = (bath2.temperature - bath1.temperature) / omega
    if delta_n == 0.0:
        relative_error = 0.0 if linearized == 0.0 else math.inf
    else:
        relative_error = abs(linearized - delta_n) / abs(delta_n)
    return OccupationGradient(
        n_bar=0.5 * (n1 + n2),
        delta_n=delta_n,
        delta_n_linearized=linearized,
        relative_error=relative_error,
    )
