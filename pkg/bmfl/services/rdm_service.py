"""
RDM service - reduced density matrices and energies evaluated from them.
"""
import logging
import math

import numpy as np
import scipy.sparse as sp

from bmfl.core.exceptions import (
    DimensionMismatchException,
    InvariantViolationException,
    OrderOutOfRangeException,
)
from bmfl.models.density import DensityMatrix
from bmfl.models.fock import MixedState, OccupationBasis, PureState, ensemble_of
from bmfl.models.operators import ModelSpec
from bmfl.services.fock_service import fock_service, sqrt_multinomial
from bmfl.services.model_service import model_service
from bmfl.utils.linalg import hermitize, trace_norm

logger = logging.getLogger(__name__)

ENERGY_TOL = 1e-10

State = PureState | MixedState


class RDMService:
    """Service for partial traces on symmetric spaces."""

    def annihilation_map(self, basis: OccupationBasis, order: int) -> sp.csr_matrix:
        """
        Stacked maps a^m = prod_j a_j^{m_j} for every m in the (d, k) basis.

        Rows are grouped by m: block m holds a^m as a map into the
        (d, N - k) basis, entries sqrt(n! / (n - m)!).
        """
        d = basis.modes
        small = fock_service.build_basis(d, order)
        blocks = []
        for m in small.states:
            ops = [(j, -1) for j in range(d) for _ in range(int(m[j]))]
            _, block = fock_service.ladder(basis, ops)
            blocks.append(block)
        return sp.vstack(blocks, format="csr")

    def _reduce_ensemble(self, basis: OccupationBasis, weights: np.ndarray, vectors: np.ndarray,
                         order: int) -> np.ndarray:
        d, n = basis.modes, basis.particles
        if order == 0:
            return np.array([[np.sum(weights)]], dtype=complex)
        small = fock_service.build_basis(d, order)
        rest = fock_service.dimension(d, n - order)

        stacked = self.annihilation_map(basis, order) @ vectors
        blocks = np.asarray(stacked).reshape(small.dim, rest, -1)
        scale = sqrt_multinomial(order, small.states)
        gamma = np.einsum("mai,nai,i->mn", blocks, blocks.conj(), weights)
        gamma *= np.outer(scale, scale) / math.perm(n, order)
        return hermitize(gamma)

    def reduce(self, state: State, order: int) -> DensityMatrix:
        """
        k-particle reduced density matrix with trace one.

        gamma[m, n] = sqrt(c_m c_n) <a+^n a^m> (N-k)!/N!, c_m = k!/prod m_j!.

        Args:
            state: Pure or mixed N-particle state
            order: k with 0 <= k <= N

        Returns:
            DensityMatrix on the (d, k) occupation basis

        Raises:
            OrderOutOfRangeException: If k is outside [0, N]
        """
        basis = state.basis
        if not 0 <= order <= basis.particles:
            raise OrderOutOfRangeException(f"order {order} outside [0, {basis.particles}]")
        weights, vectors = ensemble_of(state)
        matrix = self._reduce_ensemble(basis, weights, vectors, order)
        return DensityMatrix(order, basis.modes, matrix)

    def partial_trace(self, operator: np.ndarray, basis: OccupationBasis, order: int) -> np.ndarray:
        """
        Normalized partial trace Tr_{k+1 -> K} of a hermitian operator on the (d, K) space.

        Linear and trace-preserving; maps |Psi><Psi| to gamma^(k)_Psi.
        """
        if not 0 <= order <= basis.particles:
            raise OrderOutOfRangeException(f"order {order} outside [0, {basis.particles}]")
        operator = np.asarray(operator, dtype=complex)
        if operator.shape != (basis.dim, basis.dim):
            raise DimensionMismatchException(
                f"operator has shape {operator.shape}, basis has dimension {basis.dim}"
            )
        if order == basis.particles:
            return hermitize(operator)
        values, vectors = np.linalg.eigh(hermitize(operator))
        return self._reduce_ensemble(basis, values, vectors, order)

    def consistency_defect(self, state: State, order: int, extra: int) -> float:
        """Trace norm of Tr_{k+1 -> k+n} gamma^(k+n) - gamma^(k)."""
        if extra == 0:
            return 0.0
        upper = self.reduce(state, order + extra)
        lower = self.reduce(state, order)
        upper_basis = fock_service.build_basis(state.basis.modes, order + extra)
        traced = self.partial_trace(upper.matrix, upper_basis, order)
        return trace_norm(traced - lower.matrix)

    def energy_components(self, model: ModelSpec, state: State) -> tuple[float, float]:
        """
        (Tr(T g1) + 1/2 Tr(w g2), 1/2 Tr(H_2 g2)), computed independently.

        For N = 1 both entries are Tr(T g1).
        """
        if state.basis.modes != model.modes:
            raise DimensionMismatchException(
                f"state has {state.basis.modes} modes, model has {model.modes}"
            )
        gamma1 = self.reduce(state, 1).matrix
        one_body = float(np.real(np.trace(model.one_body.matrix @ gamma1)))
        if state.basis.particles == 1:
            return one_body, one_body

        gamma2 = self.reduce(state, 2).matrix
        pair = model_service.symmetric_pair_operator(model)
        direct = one_body + 0.5 * float(np.real(np.trace(pair @ gamma2)))
        two_body_hamiltonian = model_service.assemble(model, 2).dense()
        alternative = 0.5 * float(np.real(np.trace(two_body_hamiltonian @ gamma2)))
        return direct, alternative

    def energy_per_particle(self, model: ModelSpec, state: State) -> float:
        """
        Energy per particle <H_N>/N from gamma^(1) and gamma^(2).

        Raises:
            DimensionMismatchException: If the state and model disagree on d
            InvariantViolationException: If the two evaluations differ by more than 1e-10
        """
        direct, alternative = self.energy_components(model, state)
        if abs(direct - alternative) > ENERGY_TOL * max(1.0, abs(direct)):
            raise InvariantViolationException(
                f"energy forms disagree: {direct!r} vs {alternative!r}"
            )
        return direct


rdm_service = RDMService()
