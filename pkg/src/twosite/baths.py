"""Reservoir description: spectral densities, occupations and transition rates.

Temperatures are given as k_B*T in energy units. The bath oscillators and
their couplings g_k never appear explicitly; they are folded into the
spectral density J(nu) and the rate functions built on it.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

from .errors import DivergentRateError, InvalidParameterError, ModelMismatchError
from .model import Eigensystem

logger = logging.getLogger(__name__)

# exp(nu/T) overflows double precision a little above 709
OVERFLOW_EXPONENT = 700.0

FLAG_NO_EXCHANGE = 'no-exchange'
FLAG_VANISHING_DEPHASING = 'vanishing-dephasing'


class Statistics(str, Enum):
    QUANTUM = 'quantum'
    CLASSICAL = 'classical'


@dataclass(frozen=True)
class SpectralDensity:
    """Power-law spectral density J(nu) = kappa * |nu|**exponent (ohmic for exponent 1)."""
    kappa: float = 1.0
    exponent: float = 1.0
    kind: str = 'power-law'

    def __post_init__(self):
        if self.kind != 'power-law':
            raise InvalidParameterError(f"Unsupported spectral density kind '{self.kind}'. Allowed: power-law")
        for name in ('kappa', 'exponent'):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidParameterError(f"Spectral density {name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    def __call__(self, nu: float) -> float:
        return self.kappa * abs(nu) ** self.exponent

    @property
    def vanishing_dephasing(self) -> bool:
        return self.exponent > 1.0

    def zero_frequency_slope(self) -> float:
        """lim_{nu->0} J(nu)/nu.

        Raises:
            DivergentRateError: for sub-ohmic exponents (s < 1).
        """
        if self.exponent < 1.0:
            raise DivergentRateError(
                f"lim J(nu)/nu diverges for exponent s={self.exponent} < 1; zero-frequency dephasing rate is undefined")
        if self.exponent > 1.0:
            return 0.0
        return self.kappa


@dataclass(frozen=True)
class BathSpec:
    """One thermal dephasing reservoir."""
    temperature: float
    spectral: SpectralDensity = field(default_factory=SpectralDensity)
    statistics: Statistics = Statistics.QUANTUM

    def __post_init__(self):
        temperature = float(self.temperature)
        if not math.isfinite(temperature) or temperature < 0.0:
            raise InvalidParameterError(f"Bath temperature must be finite and >= 0, got {temperature!r}")
        object.__setattr__(self, 'temperature', temperature)
        object.__setattr__(self, 'statistics', Statistics(self.statistics))


@dataclass(frozen=True)
class RateSet:
    """All rates entering the master equation for one (eigensystem, bath pair).

    Tuples are indexed by bath: position 0 is bath 1, position 1 is bath 2.
    """
    omega: float
    gamma_plus_minus: Tuple[float, float]
    gamma_minus_plus: Tuple[float, float]
    gamma0: Tuple[float, float]
    gamma_phi_eigen: float
    j_tilde: Tuple[float, float]
    occupations: Tuple[float, float]
    statistics: Statistics = Statistics.QUANTUM
    flags: Tuple[str, ...] = ()

    @property
    def gamma_tot_pm(self) -> float:
        return self.gamma_plus_minus[0] + self.gamma_plus_minus[1]

    @property
    def gamma_tot_mp(self) -> float:
        return self.gamma_minus_plus[0] + self.gamma_minus_plus[1]

    @property
    def gamma_total(self) -> float:
        """Population relaxation rate Gamma_tot(+-) + Gamma_tot(-+)."""
        return self.gamma_tot_pm + self.gamma_tot_mp

    @property
    def equal_spectral_densities(self) -> bool:
        return self.j_tilde[0] == self.j_tilde[1]


def occupation(nu: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(nu/T) - 1); 0 at T = 0.

    Raises:
        InvalidParameterError: if nu <= 0 or the temperature is negative.
    """
    if not nu > 0.0:
        raise InvalidParameterError(f"Occupation needs nu > 0, got {nu!r}; use the rate functions for signed frequencies")
    if temperature < 0.0 or not math.isfinite(temperature):
        raise InvalidParameterError(f"Temperature must be finite and >= 0, got {temperature!r}")
    if temperature == 0.0:
        return 0.0
    x = nu / temperature
    if x > OVERFLOW_EXPONENT:
        return 0.0
    return 1.0 / math.expm1(x)


def gamma_zero(bath: BathSpec) -> float:
    """Zero-frequency dephasing rate lim J(nu)/nu * k_B T.

    Super-ohmic baths (s > 1) return 0.0 without raising; callers read
    ``SpectralDensity.vanishing_dephasing``, and ``rate_set`` records it as
    ``FLAG_VANISHING_DEPHASING`` on ``RateSet.flags``.
    """
    slope = bath.spectral.zero_frequency_slope()
    if slope == 0.0:
        logger.debug(f"Exponent {bath.spectral.exponent} > 1: zero-frequency dephasing vanishes")
    return slope * bath.temperature


def gamma_quantum(bath: BathSpec, nu: float) -> float:
    """gamma(nu) of a thermal oscillator bath: J(nu)(1+n) emission, J(|nu|) n absorption.

    At nu = 0 this is ``gamma_zero``: 0.0 for s > 1, flagged by ``rate_set``
    rather than here.
    """
    if bath.statistics != Statistics.QUANTUM:
        raise ModelMismatchError("gamma_quantum called with a classical bath")
    if nu > 0.0:
        return bath.spectral(nu) * (1.0 + occupation(nu, bath.temperature))
    if nu < 0.0:
        return bath.spectral(-nu) * occupation(-nu, bath.temperature)
    return gamma_zero(bath)


def gamma_classical(bath: BathSpec, nu: float) -> float:
    """Symmetric rate of a classical stochastic dephasing field.

    The noise power is pinned so that gamma_c(+-nu) = J(|nu|) n_|nu|(T), i.e. the
    quantum bath with spontaneous emission removed; gamma_c(0) equals the
    quantum zero-frequency rate, 0.0 for s > 1 (flagged by ``rate_set``).
    """
    if bath.statistics != Statistics.CLASSICAL:
        raise ModelMismatchError("gamma_classical called with a quantum bath")
    if nu == 0.0:
        return gamma_zero(bath)
    return bath.spectral(abs(nu)) * occupation(abs(nu), bath.temperature)


def gamma(bath: BathSpec, nu: float) -> float:
    """Dispatch on the bath statistics."""
    if bath.statistics == Statistics.CLASSICAL:
        return gamma_classical(bath, nu)
    return gamma_quantum(bath, nu)


def effective_spectral_density(spec: SpectralDensity, eig: Eigensystem) -> float:
    """J~(omega) = J(omega) delta^2 / omega^2, the neighbour-dressed spectral density."""
    if not eig.omega > 0.0:
        raise InvalidParameterError(f"Effective spectral density needs omega > 0, got {eig.omega!r}")
    return spec(eig.omega) * eig.exchange_coupling ** 2


def dephasing_rate_uncoupled(bath1: BathSpec, bath2: BathSpec) -> float:
    """Combined dephasing rate of uncoupled sites, gamma_1(0) + gamma_2(0)."""
    return gamma_zero(bath1) + gamma_zero(bath2)


def rate_set(eig: Eigensystem, bath1: BathSpec, bath2: BathSpec) -> RateSet:
    """Assemble every rate of the global master equation.

    Raises:
        ModelMismatchError: if the two baths have different statistics.
        DivergentRateError: if a zero-frequency rate diverges.
    """
    if bath1.statistics != bath2.statistics:
        raise ModelMismatchError(
            f"Mixed bath statistics ({bath1.statistics.value}/{bath2.statistics.value}) are not supported")
    baths = (bath1, bath2)
    omega = eig.omega
    coupling_sq = eig.exchange_coupling ** 2
    plus_minus = tuple(gamma(b, omega) * coupling_sq for b in baths)
    minus_plus = tuple(gamma(b, -omega) * coupling_sq for b in baths)
    gamma0 = tuple(gamma_zero(b) for b in baths)
    # (alpha+^2 - alpha-^2)^2 == (beta+^2 - beta-^2)^2 == h^2/omega^2
    contrast = (eig.alpha_plus ** 2 - eig.alpha_minus ** 2) ** 2

    flags = []
    if eig.no_exchange:
        flags.append(FLAG_NO_EXCHANGE)
    if any(b.spectral.vanishing_dephasing for b in baths):
        flags.append(FLAG_VANISHING_DEPHASING)
        logger.warning("Spectral exponent > 1: zero-frequency dephasing rate is 0")

    rates = RateSet(
        omega=omega,
        gamma_plus_minus=plus_minus,
        gamma_minus_plus=minus_plus,
        gamma0=gamma0,
        gamma_phi_eigen=(gamma0[0] + gamma0[1]) * contrast,
        j_tilde=tuple(effective_spectral_density(b.spectral, eig) for b in baths),
        occupations=tuple(occupation(omega, b.temperature) for b in baths),
        statistics=bath1.statistics,
        flags=tuple(flags),
    )
    logger.debug(f"Rates: Gamma+-={rates.gamma_plus_minus}, Gamma-+={rates.gamma_minus_plus}, "
                 f"gamma0={rates.gamma0}, gamma_phi={rates.gamma_phi_eigen:.6g}")
    return rates
