"""
Localize service - geometric localization of N-particle states.
"""
import logging
import math
from fractions import Fraction
from typing import Callable

import numpy as np

from bmfl.core.exceptions import InvariantViolationException, ValidationException
from bmfl.models.fock import MixedState, PureState, ensemble_of
from bmfl.models.localization import LocalizedState, LocalizingOperator
from bmfl.services.fock_service import fock_service
from bmfl.services.rdm_service import rdm_service
from bmfl.utils.linalg import hermitize, trace_norm

logger = logging.getLogger(__name__)

State = PureState | MixedState


class LocalizeService:
    """Service for localized states G^A_{N,k}."""

    def _split(self, state: State, operator: LocalizingOperator):
        """
        Image of the state in F(h) (x) F(h) under u -> Au + sqrt(1 - A^2)u.

        Returns (weights, images, inside, outside): rows of `images` are
        indexed by pairs of occupation vectors (inside, outside).
        """
        basis = state.basis
        if operator.modes != basis.modes:
            raise ValidationException(
                f"localizing operator has {operator.modes} modes, state has {basis.modes}", path="A"
            )
        weights, vectors = ensemble_of(state)
        mask = operator.site_mask()
        if mask is not None:
            inside = basis.states * mask
            outside = basis.states * ~mask
            return weights, vectors, inside, outside

        d = basis.modes
        isometry = np.vstack([operator.matrix, operator.complement().matrix])
        images = fock_service.second_quantize(isometry, basis.particles) @ vectors
        doubled = fock_service.build_basis(2 * d, basis.particles)
        return weights, images, doubled.states[:, :d], doubled.states[:, d:]

    def localize(self, state: State, operator: LocalizingOperator) -> LocalizedState:
        """
        Components G^A_{N,0}, ..., G^A_{N,N}.

        Diagonal 0/1 projectors split occupations by site directly; any
        other A goes through the Fock functor of [A; sqrt(1 - A^2)].

        Raises:
            ValidationException: If A and the state disagree on d
            CapacityException: If the doubled mode space exceeds the cap
        """
        weights, images, inside, outside = self._split(state, operator)
        d, n = state.basis.modes, state.basis.particles
        counts = inside.sum(axis=1)
        components = []
        for k in range(n + 1):
            small = fock_service.build_basis(d, k)
            rest = fock_service.build_basis(d, n - k)
            rows = np.nonzero(counts == k)[0]
            block = np.zeros((small.dim, rest.dim, images.shape[1]), dtype=complex)
            if rows.size:
                block[small.index_of(inside[rows]), rest.index_of(outside[rows])] = images[rows]
            components.append(hermitize(np.einsum("aoi,boi,i->ab", block, block.conj(), weights)))
        logger.debug(f"Localized N={n} state over {d} modes")
        return LocalizedState(d, n, tuple(components))

    def localized_traces(self, state: State, operator: LocalizingOperator) -> np.ndarray:
        """Tr G^A_{N,k} for k = 0..N without forming the components."""
        weights, images, inside, _ = self._split(state, operator)
        counts = inside.sum(axis=1)
        mass = np.abs(images) ** 2 @ weights
        return np.bincount(counts, weights=mass, minlength=state.basis.particles + 1)

    def duality_defect(self, state: State, operator: LocalizingOperator) -> float:
        """max_k |Tr G^A_{N,k} - Tr G^{sqrt(1-A^2)}_{N,N-k}|."""
        direct = self.localized_traces(state, operator)
        dual = self.localized_traces(state, operator.complement())
        return float(np.max(np.abs(direct - dual[::-1])))

    def reconstruction_defect(self, state: State, operator: LocalizingOperator, order: int) -> float:
        """
        Trace norm of A^{(x)n} gamma^(n) A^{(x)n} - sum_k C(k,n)/C(N,n) Tr_{n+1->k} G_k.
        """
        n = state.basis.particles
        gamma = rdm_service.reduce(state, order).matrix
        lifted = fock_service.second_quantize(operator.matrix, order)
        lhs = lifted @ gamma @ lifted.conj().T

        localized = self.localize(state, operator)
        rhs = np.zeros_like(lhs)
        for k in range(order, n + 1):
            coefficient = math.comb(k, order) / math.comb(n, order)
            basis_k = fock_service.build_basis(state.basis.modes, k)
            rhs += coefficient * rdm_service.partial_trace(localized.components[k], basis_k, order)
        return trace_norm(lhs - rhs)

    def binomial_ratio_bound(self, particles: int, order: int) -> tuple[float, float]:
        """
        max_k |(k/N)^n - C(k,n)/C(N,n)| over n <= k <= N, and (n-1)^2/(N-n+1).

        Evaluated in exact rational arithmetic.

        Raises:
            ValidationException: Unless 1 <= n <= N
            InvariantViolationException: If a difference is negative or exceeds the bound
        """
        if not 1 <= order <= particles:
            raise ValidationException(f"need 1 <= n <= N, got n={order}, N={particles}")
        bound = Fraction((order - 1) ** 2, particles - order + 1)
        worst = Fraction(0)
        for k in range(order, particles + 1):
            difference = Fraction(k ** order, particles ** order) - Fraction(
                math.comb(k, order), math.comb(particles, order)
            )
            if difference < 0:
                raise InvariantViolationException(f"negative binomial ratio defect at k={k}")
            worst = max(worst, difference)
        if worst > bound:
            raise InvariantViolationException(f"binomial ratio defect {float(worst)} exceeds {float(bound)}")
        return float(worst), float(bound)

    def statistic_from_traces(self, traces: np.ndarray, f: Callable[[float], float]) -> float:
        """sum_k f(k/N) traces[k]."""
        n = traces.size - 1
        grid = np.arange(n + 1) / n if n else np.zeros(1)
        return float(sum(float(f(x)) * t for x, t in zip(grid, traces)))

    def mass_statistic(self, state: State, operator: LocalizingOperator, f: Callable[[float], float]) -> float:
        """sum_k f(k/N) Tr G^A_{N,k}."""
        return self.statistic_from_traces(self.localized_traces(state, operator), f)

    def escape_statistic(self, state: State, operator: LocalizingOperator, f: Callable[[float], float]) -> float:
        """sum_k f(k/N) Tr G^{sqrt(1-A^2)}_{N,k}."""
        return self.statistic_from_traces(self.localized_traces(state, operator.complement()), f)

    def moment_bound(self, state: State, operator: LocalizingOperator, order: int) -> tuple[float, float]:
        """
        (|Tr[A^{(x)n} gamma^(n) A^{(x)n}] - sum_k (k/N)^n Tr G_k|, (n-1)^2/(N-n+1)).
        """
        n = state.basis.particles
        _, bound = self.binomial_ratio_bound(n, order)
        gamma = rdm_service.reduce(state, order).matrix
        lifted = fock_service.second_quantize(operator.matrix, order)
        localized_moment = float(np.real(np.trace(lifted @ gamma @ lifted.conj().T)))
        statistic = self.mass_statistic(state, operator, lambda x: x ** order)
        return abs(localized_moment - statistic), bound


localize_service = LocalizeService()
