"""Two-site system definition, exact eigenstructure and basis changes.

Conventions used throughout the package:

- hbar = k_B = 1; energies, temperatures and rates share one reference unit.
- Site basis is ordered {|1>, |2>}; eigen basis is ordered {|+>, |->}.
- Eigen amplitudes are real with alpha_minus > 0, so that
  alpha_plus == -beta_minus and alpha_minus == beta_plus hold literally.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from .errors import BasisMismatchError, InvalidParameterError, InvalidStateError

logger = logging.getLogger(__name__)

STATE_PRESETS = ('site1', 'site2', 'ground', 'excited', 'mixed')


class Basis(str, Enum):
    """Basis tag carried by density matrices and Liouvillians"""
    SITE = 'site'
    EIGEN = 'eigen'


def _require_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise InvalidParameterError(f"{name} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """On-site splitting h = h2 - h1 and inter-site coupling delta."""
    h: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, 'h', _require_nonnegative('h', self.h))
        object.__setattr__(self, 'delta', _require_nonnegative('delta', self.delta))
        if self.h == 0.0 and self.delta == 0.0:
            raise InvalidParameterError("h and delta cannot both be zero (fully degenerate Hamiltonian)")

    @property
    def no_exchange(self) -> bool:
        """True when the sites are uncoupled and the baths only dephase."""
        return self.delta == 0.0


@dataclass(frozen=True)
class Eigensystem:
    """Closed-form eigenstructure of H_S.

    |+> = alpha_plus|1> + beta_plus|2>, |-> = alpha_minus|1> + beta_minus|2>.
    """
    eps_plus: float
    eps_minus: float
    omega: float
    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float

    @property
    def exchange_coupling(self) -> float:
        """alpha_plus * alpha_minus, equal to delta / omega."""
        return self.alpha_plus * self.alpha_minus

    @property
    def no_exchange(self) -> bool:
        return self.exchange_coupling == 0.0

    def unitary(self) -> np.ndarray:
        """Real orthogonal matrix whose columns are |+> and |-> in the site basis."""
        return np.array([[self.alpha_plus, self.alpha_minus],
                         [self.beta_plus, self.beta_minus]], dtype=float)

    def eigenvector(self, sign: int) -> np.ndarray:
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        column = 0 if sign == 1 else 1
        return self.unitary()[:, column]

    def hamiltonian_eigen(self) -> np.ndarray:
        """H_S in the eigen basis, diag(eps_plus, eps_minus)."""
        return np.diag([self.eps_plus, self.eps_minus]).astype(float)


class DensityMatrix:
    """2x2 density matrix tagged with the basis it is expressed in.

    The stored array is a read-only complex copy. Physicality (Hermitian, unit
    trace, PSD) is checked by ``validate`` so that intermediate numerical
    states can still be wrapped and inspected.
    """

    __slots__ = ('data', 'basis')

    def __init__(self, data, basis: Union[Basis, str]):
        array = np.array(data, dtype=complex)
        if array.shape != (2, 2):
            raise InvalidStateError(f"Density matrix must be 2x2, got shape {array.shape}")
        array.setflags(write=False)
        self.data = array
        self.basis = Basis(basis)

    def __repr__(self) -> str:
        return f"DensityMatrix(basis={self.basis.value}, data={self.data.tolist()})"

    @property
    def populations(self) -> Tuple[float, float]:
        return float(self.data[0, 0].real), float(self.data[1, 1].real)

    @property
    def coherence(self) -> complex:
        """Off-diagonal element <0|rho|1> in this matrix's own basis."""
        return complex(self.data[0, 1])

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def min_eigenvalue(self) -> float:
        hermitian = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(hermitian)[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def validate(self, trace_tol: float = 1e-12, psd_tol: float = 1e-12, herm_tol: float = 1e-12) -> 'DensityMatrix':
        """Raise InvalidStateError unless the matrix is a physical state."""
        if not np.all(np.isfinite(self.data)):
            raise InvalidStateError("Density matrix contains non-finite entries")
        if self.hermiticity_error() > herm_tol:
            raise InvalidStateError(f"Density matrix is not Hermitian (error {self.hermiticity_error():.3e})")
        if abs(self.trace() - 1.0) > trace_tol:
            raise InvalidStateError(f"Density matrix trace is {self.trace():.15g}, expected 1")
        if self.min_eigenvalue() < -psd_tol:
            raise InvalidStateError(f"Density matrix is not positive semidefinite (min eigenvalue {self.min_eigenvalue():.3e})")
        return self

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        return abs(self.data[0, 1]) <= tol and abs(self.data[1, 0]) <= tol

    def hermitized(self) -> 'DensityMatrix':
        return DensityMatrix(0.5 * (self.data + self.data.conj().T), self.basis)


def hamiltonian(params: SystemParams) -> np.ndarray:
    """H_S = h|2><2| + delta(|1><2| + |2><1|) in the site basis."""
    return np.array([[0.0, params.delta],
                     [params.delta, params.h]], dtype=float)


def diagonalize(params: SystemParams) -> Eigensystem:
    """Closed-form eigenvalues and real amplitudes of H_S.

    eps_minus is evaluated as -delta**2 / eps_plus and the amplitudes through
    eps_plus only, which avoids the cancellation in (h - omega) when
    delta << h. At delta == 0 the limits |+> = |2>, |-> = |1> are used.
    """
    h, delta = params.h, params.delta
    omega = math.hypot(h, 2.0 * delta)
    eps_plus = 0.5 * (h + omega)
    eps_minus = -delta * delta / eps_plus
    norm = math.hypot(delta, eps_plus)
    alpha_plus = delta / norm
    alpha_minus = eps_plus / norm
    eig = Eigensystem(
        eps_plus=eps_plus,
        eps_minus=eps_minus,
        omega=omega,
        alpha_plus=alpha_plus,
        alpha_minus=alpha_minus,
        beta_plus=alpha_minus,
        beta_minus=-alpha_plus,
    )
    if eig.no_exchange:
        logger.debug("delta = 0: no-exchange regime, baths act as pure dephasing")
    return eig


def change_basis(rho: DensityMatrix, eig: Eigensystem, target: Union[Basis, str]) -> DensityMatrix:
    """Conjugate rho with the amplitude matrix into the target basis."""
    target = Basis(target)
    if rho.basis == target:
        return rho
    u = eig.unitary()
    if target == Basis.EIGEN:
        data = u.T @ rho.data @ u
    else:
        data = u @ rho.data @ u.T
    return DensityMatrix(data, target)


def site_coherence(rho: DensityMatrix, eig: Eigensystem) -> complex:
    """rho_12 = <1|rho|2> whatever basis rho is stored in."""
    return change_basis(rho, eig, Basis.SITE).coherence


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of a - b."""
    if a.basis != b.basis:
        raise BasisMismatchError(f"Cannot compare states in {a.basis.value} and {b.basis.value} bases")
    diff = a.data - b.data
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def basis_state(name: str, eig: Eigensystem, basis: Union[Basis, str] = Basis.SITE) -> DensityMatrix:
    """Named initial states: site1, site2, ground (|->), excited (|+>), mixed."""
    if name == 'site1':
        rho = DensityMatrix([[1.0, 0.0], [0.0, 0.0]], Basis.SITE)
    elif name == 'site2':
        rho = DensityMatrix([[0.0, 0.0], [0.0, 1.0]], Basis.SITE)
    elif name == 'excited':
        rho = DensityMatrix([[1.0, 0.0], [0.0, 0.0]], Basis.EIGEN)
    elif name == 'ground':
        rho = DensityMatrix([[0.0, 0.0], [0.0, 1.0]], Basis.EIGEN)
    elif name == 'mixed':
        rho = DensityMatrix(0.5 * np.eye(2), Basis(basis))
    else:
        raise InvalidStateError(f"Unknown state preset '{name}'. Allowed: {', '.join(STATE_PRESETS)}")
    return change_basis(rho, eig, basis)


def unitary_site1_population(params: SystemParams, t: float) -> float:
    """rho_11(t) = 1 - 2 (delta/omega)^2 (1 - cos(omega t)) for rho(0) = |1><1| without baths."""
    omega = math.hypot(params.h, 2.0 * params.delta)
    return 1.0 - 2.0 * (params.delta / omega) ** 2 * (1.0 - math.cos(omega * t))
