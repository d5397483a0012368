"""Liouvillian superoperators for the global, local and classical models.

Vectorization is column stacking: vec(A X B) = (B^T kron A) vec(X), so
``vec`` and ``unvec`` use Fortran ordering. The 4x4 matrices built here are
bit-comparable with any other column-stacking implementation.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Tuple, Union

import numpy as np

from ..baths import RateSet, Statistics
from ..errors import BasisMismatchError, ModelMismatchError
from ..model import Basis, DensityMatrix, Eigensystem, SystemParams, hamiltonian

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=complex)
# <I| acting on vec(rho) gives Tr(rho); a left null vector of every trace-preserving generator
TRACE_ROW = IDENTITY.reshape(-1, order='F').conj()

# Eigen basis is ordered (|+>, |->)
LOWERING = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |-><+|
RAISING = LOWERING.T.copy()                                     # |+><-|


class Model(str, Enum):
    GLOBAL = 'global'
    LOCAL = 'local'
    CLASSICAL = 'classical'


MODEL_BASIS = {
    Model.GLOBAL: Basis.EIGEN,
    Model.CLASSICAL: Basis.EIGEN,
    Model.LOCAL: Basis.SITE,
}


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix, dtype=complex).reshape(-1, order='F')


def unvec(vector: np.ndarray) -> np.ndarray:
    return np.asarray(vector, dtype=complex).reshape((2, 2), order='F')


def commutator_superoperator(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[H, rho]."""
    h = np.asarray(h, dtype=complex)
    return -1j * (np.kron(IDENTITY, h) - np.kron(h.T, IDENTITY))


def dissipator_superoperator(a: np.ndarray) -> np.ndarray:
    """Matrix of rho -> A rho A^dag - 1/2 {A^dag A, rho}."""
    a = np.asarray(a, dtype=complex)
    ada = a.conj().T @ a
    return np.kron(a.conj(), a) - 0.5 * (np.kron(IDENTITY, ada) + np.kron(ada.T, IDENTITY))


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of the master equation acting on column-stacked density matrices.

    ``dissipators`` keeps the contribution of each bath separately so that
    heat currents can be evaluated per reservoir.
    """
    matrix: np.ndarray
    coherent_part: np.ndarray
    dissipators: Tuple[np.ndarray, np.ndarray]
    hamiltonian: np.ndarray
    model: Model
    basis: Basis
    params: SystemParams
    eig: Eigensystem
    rates: RateSet

    def _check_basis(self, rho: DensityMatrix):
        if rho.basis != self.basis:
            raise BasisMismatchError(
                f"{self.model.value} Liouvillian acts in the {self.basis.value} basis, state is in {rho.basis.value}")

    def apply(self, rho: DensityMatrix) -> np.ndarray:
        """L[rho] as a 2x2 matrix."""
        self._check_basis(rho)
        return unvec(self.matrix @ vec(rho.data))

    def apply_dissipator(self, bath_index: int, rho: DensityMatrix) -> np.ndarray:
        """L_i[rho] for bath i (0 for bath 1, 1 for bath 2)."""
        self._check_basis(rho)
        return unvec(self.dissipators[bath_index] @ vec(rho.data))

    def residual(self, rho: DensityMatrix) -> float:
        """||L vec(rho)||_2, zero for a fixed point."""
        self._check_basis(rho)
        return float(np.linalg.norm(self.matrix @ vec(rho.data)))

    def trace_residual(self) -> float:
        return float(np.max(np.abs(TRACE_ROW @ self.matrix)))

    @cached_property
    def spectrum(self) -> Tuple[np.ndarray, np.ndarray, float]:
        """Eigenvalues, right eigenvectors and the eigenvector condition number."""
        eigenvalues, vectors = np.linalg.eig(self.matrix)
        condition = float(np.linalg.cond(vectors))
        return eigenvalues, vectors, condition

    def slowest_decay_rate(self) -> float:
        """Smallest nonzero |Re(lambda)|, the inverse of the longest relaxation time."""
        eigenvalues = self.spectrum[0]
        decay = np.abs(eigenvalues.real)
        scale = max(float(np.max(np.abs(eigenvalues))), 1.0)
        nonzero = decay[decay > 1e-12 * scale]
        return float(np.min(nonzero)) if nonzero.size else 0.0


def _global_dissipators(eig: Eigensystem, rates: RateSet) -> Tuple[np.ndarray, np.ndarray]:
    dephasing_ops = (
        np.diag([eig.alpha_plus ** 2, eig.alpha_minus ** 2]),
        np.diag([eig.beta_plus ** 2, eig.beta_minus ** 2]),
    )
    down = dissipator_superoperator(LOWERING)
    up = dissipator_superoperator(RAISING)
    parts = []
    for i in range(2):
        parts.append(rates.gamma0[i] * dissipator_superoperator(dephasing_ops[i])
                     + rates.gamma_plus_minus[i] * down
                     + rates.gamma_minus_plus[i] * up)
    return parts[0], parts[1]


def _local_dissipators(rates: RateSet) -> Tuple[np.ndarray, np.ndarray]:
    projectors = (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    return tuple(rates.gamma0[i] * dissipator_superoperator(projectors[i]) for i in range(2))


def build_liouvillian(model: Union[Model, str], params: SystemParams, eig: Eigensystem, rates: RateSet) -> Liouvillian:
    """Assemble -i[H_S, .] plus the model's dissipators.

    global/classical live in the eigen basis with jumps |-><+|, |+><-| and
    dephasing operators A_i(0); local lives in the site basis with the
    projectors |i><i| at rates gamma_i(0).

    Raises:
        ModelMismatchError: global with classical rates or classical with quantum rates.
    """
    model = Model(model)
    if model == Model.GLOBAL and rates.statistics != Statistics.QUANTUM:
        raise ModelMismatchError("The global model needs quantum bath rates")
    if model == Model.CLASSICAL and rates.statistics != Statistics.CLASSICAL:
        raise ModelMismatchError("The classical model needs classical bath rates")

    basis = MODEL_BASIS[model]
    if basis == Basis.EIGEN:
        h = eig.hamiltonian_eigen()
        dissipators = _global_dissipators(eig, rates)
    else:
        h = hamiltonian(params)
        dissipators = _local_dissipators(rates)

    coherent = commutator_superoperator(h)
    matrix = coherent + dissipators[0] + dissipators[1]
    for array in (matrix, coherent, *dissipators):
        array.setflags(write=False)

    liouvillian = Liouvillian(
        matrix=matrix,
        coherent_part=coherent,
        dissipators=dissipators,
        hamiltonian=h,
        model=model,
        basis=basis,
        params=params,
        eig=eig,
        rates=rates,
    )
    logger.debug(f"Built {model.value} Liouvillian in {basis.value} basis, trace residual {liouvillian.trace_residual():.2e}")
    return liouvillian
