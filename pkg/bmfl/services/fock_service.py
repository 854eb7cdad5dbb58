"""
Fock service - occupation bases, product states and second quantization.
"""
import itertools
import logging
import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from bmfl.config import settings
from bmfl.core.exceptions import CapacityException, DimensionMismatchException, ValidationException
from bmfl.models.fock import NORM_TOL, OccupationBasis, PureState
from bmfl.utils.linalg import frozen

logger = logging.getLogger(__name__)

EXACT_FACTORIAL_LIMIT = 20
TENSOR_SPACE_CAP = 1_000_000

_FACTORIALS = np.array([math.factorial(i) for i in range(EXACT_FACTORIAL_LIMIT + 1)], dtype=np.int64)


def _pascal(rows: int, cols: int) -> np.ndarray:
    table = np.zeros((rows + 1, cols + 1), dtype=np.int64)
    table[:, 0] = 1
    for a in range(1, rows + 1):
        table[a, 1:] = table[a - 1, 1:] + table[a - 1, :-1]
    return table


@lru_cache(maxsize=1024)
def _compositions(modes: int, particles: int) -> np.ndarray:
    """All occupation vectors of `particles` in `modes`, reverse-lexicographic."""
    if modes == 1:
        return frozen(np.array([[particles]], dtype=np.int64))
    blocks = []
    for first in range(particles, -1, -1):
        tail = _compositions(modes - 1, particles - first)
        head = np.full((tail.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, tail]))
    return frozen(np.vstack(blocks))


@lru_cache(maxsize=256)
def _cached_basis(modes: int, particles: int) -> OccupationBasis:
    pascal = _pascal(particles + modes, modes)
    return OccupationBasis(modes, particles, _compositions(modes, particles), frozen(pascal))


@lru_cache(maxsize=4096)
def _cached_ladder(modes: int, particles: int, ops: tuple) -> tuple[Optional[OccupationBasis], sp.csr_matrix]:
    basis = _cached_basis(modes, particles)
    net = sum(step for _, step in ops)
    target_particles = particles + net
    if target_particles < 0:
        return None, sp.csr_matrix((1, basis.dim))
    target = _cached_basis(modes, target_particles)

    occ = basis.states.copy()
    amp = np.ones(basis.dim)
    for mode, step in ops:
        if step < 0:
            amp *= np.sqrt(np.clip(occ[:, mode], 0, None))
            occ[:, mode] -= 1
        else:
            occ[:, mode] += 1
            amp *= np.sqrt(np.clip(occ[:, mode], 0, None))
    alive = (amp != 0) & np.all(occ >= 0, axis=1)
    cols = np.nonzero(alive)[0]
    rows = target.index_of(occ[alive]) if cols.size else np.zeros(0, dtype=np.int64)
    matrix = sp.csr_matrix((amp[alive], (rows, cols)), shape=(target.dim, basis.dim))
    matrix.sort_indices()
    return target, matrix


def sqrt_multinomial(particles: int, states: np.ndarray) -> np.ndarray:
    """sqrt(N! / prod_j n_j!) per occupation row; exact integers up to N = 20."""
    states = np.atleast_2d(states)
    if particles <= EXACT_FACTORIAL_LIMIT:
        ratio = _FACTORIALS[particles] // np.prod(_FACTORIALS[states], axis=1)
        return np.sqrt(ratio.astype(float))
    log_ratio = gammaln(particles + 1) - np.sum(gammaln(states + 1), axis=1)
    return np.exp(0.5 * log_ratio)


class FockService:
    """Service for symmetric-space bookkeeping."""

    def dimension(self, modes: int, particles: int) -> int:
        return math.comb(particles + modes - 1, modes - 1)

    def build_basis(self, modes: int, particles: int, cap: Optional[int] = None) -> OccupationBasis:
        """
        Build the occupation basis of the N-particle symmetric space.

        Args:
            modes: Mode count d >= 1
            particles: Particle count N >= 0
            cap: Largest allowed dimension, defaults to settings.DIM_CAP

        Returns:
            OccupationBasis of dimension binomial(N + d - 1, d - 1)

        Raises:
            ValidationException: If d < 1 or N < 0
            CapacityException: If the dimension exceeds the cap
        """
        if modes < 1 or particles < 0:
            raise ValidationException(f"need modes >= 1 and particles >= 0, got ({modes}, {particles})")
        cap = cap or settings.DIM_CAP
        dim = self.dimension(modes, particles)
        if dim > cap:
            raise CapacityException(
                f"symmetric space of {particles} particles in {modes} modes has dimension {dim} > cap {cap}"
            )
        return _cached_basis(modes, particles)

    def tensor_power(self, basis: OccupationBasis, u: np.ndarray) -> np.ndarray:
        """
        Amplitudes of u^{(x)N} in the occupation basis, for any u.

        The amplitude at n is sqrt(N!/prod n_j!) prod_j u_j^{n_j}.
        """
        u = np.asarray(u, dtype=complex)
        if u.shape != (basis.modes,):
            raise DimensionMismatchException(f"vector has length {u.size}, basis has {basis.modes} modes")
        states = basis.states
        magnitude = np.prod(np.abs(u)[None, :] ** states, axis=1)
        phase = np.exp(1j * (states @ np.angle(u)))
        return sqrt_multinomial(basis.particles, states) * magnitude * phase

    def product_state(self, basis: OccupationBasis, u: np.ndarray) -> PureState:
        """
        Uncorrelated state u^{(x)N} for a normalized u.

        Raises:
            ValidationException: If ||u|| differs from 1 by more than 1e-12
        """
        norm = float(np.linalg.norm(u))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationException(f"product state needs a unit vector, got norm {norm!r}")
        return PureState(basis, self.tensor_power(basis, u))

    def ladder(self, basis: OccupationBasis,
               ops: Sequence[tuple[int, int]]) -> tuple[Optional[OccupationBasis], sp.csr_matrix]:
        """
        Sparse matrix of a product of ladder operators.

        Args:
            basis: Source basis
            ops: (mode, step) pairs applied in the given order, step = +1 for
                a creation and -1 for an annihilation operator

        Returns:
            (target basis, CSR matrix target.dim x basis.dim); the target is
            None when more particles are annihilated than present
        """
        ops = tuple((int(mode), int(step)) for mode, step in ops)
        for mode, step in ops:
            if not 0 <= mode < basis.modes or step not in (-1, 1):
                raise ValidationException(f"invalid ladder operator ({mode}, {step})")
        return _cached_ladder(basis.modes, basis.particles, ops)

    def transition_matrix(self, basis: OccupationBasis, i: int, j: int) -> sp.csr_matrix:
        """a^dagger_i a_j on the symmetric space."""
        _, matrix = self.ladder(basis, [(j, -1), (i, +1)])
        return matrix

    def apply_transition(self, basis: OccupationBasis, psi, i: int, j: int) -> np.ndarray:
        """
        Move one particle from mode j to mode i.

        Amplitude factors are sqrt(n_i + 1) sqrt(n_j) for i != j and n_i for
        i == j. The result is not normalized and may vanish.
        """
        amplitudes = psi.amplitudes if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
        return self.transition_matrix(basis, i, j) @ amplitudes

    def second_quantize(self, matrix: np.ndarray, particles: int) -> np.ndarray:
        """
        Fock functor Gamma(V) restricted to N particles.

        For V: C^{d_in} -> C^{d_out} this is V^{(x)N} between symmetric
        spaces, built level by level from
        Gamma(V)|n> = b^dagger(V e_j) Gamma(V)|n - e_j> / sqrt(n_j).

        Returns:
            Dense array of shape (dim(d_out, N), dim(d_in, N))
        """
        matrix = np.asarray(matrix, dtype=complex)
        d_out, d_in = matrix.shape
        self.build_basis(d_in, particles)
        self.build_basis(d_out, particles)

        current = np.ones((1, 1), dtype=complex)
        for level in range(1, particles + 1):
            src = _cached_basis(d_in, level)
            src_prev = _cached_basis(d_in, level - 1)
            dst_prev = _cached_basis(d_out, level - 1)
            creators = [self.ladder(dst_prev, [(p, +1)])[1] for p in range(d_out)]
            dst_dim = self.dimension(d_out, level)

            nxt = np.zeros((dst_dim, src.dim), dtype=complex)
            first = np.argmax(src.states > 0, axis=1)
            for j in range(d_in):
                cols = np.nonzero(first == j)[0]
                if cols.size == 0:
                    continue
                reduced = src.states[cols].copy()
                reduced[:, j] -= 1
                previous = current[:, src_prev.index_of(reduced)]
                block = np.zeros((dst_dim, cols.size), dtype=complex)
                for p in range(d_out):
                    if matrix[p, j] != 0:
                        block += matrix[p, j] * (creators[p] @ previous)
                nxt[:, cols] = block / np.sqrt(src.states[cols, j])
            current = nxt
        return current

    def symmetric_embedding(self, basis: OccupationBasis) -> np.ndarray:
        """
        Isometry from the occupation basis into the d^N tensor space.

        Column n is binomial-normalized: sum over words with counts n of
        e_{i_1} (x) ... (x) e_{i_N}, divided by sqrt(N!/prod n_j!).
        """
        d, n = basis.modes, basis.particles
        size = d ** n
        if size > TENSOR_SPACE_CAP:
            raise CapacityException(f"tensor space of dimension {size} exceeds {TENSOR_SPACE_CAP}")
        embedding = np.zeros((size, basis.dim))
        if n == 0:
            embedding[0, 0] = 1.0
            return embedding
        words = np.array(list(itertools.product(range(d), repeat=n)))
        counts = np.stack([(words == mode).sum(axis=1) for mode in range(d)], axis=1)
        columns = basis.index_of(counts)
        embedding[np.arange(size), columns] = 1.0 / sqrt_multinomial(n, counts)
        return embedding

    def permutation_action(self, basis: OccupationBasis, perm: Sequence[int]) -> sp.csr_matrix:
        """Lift the mode permutation j -> perm[j] to the symmetric space."""
        perm = np.asarray(perm, dtype=np.int64)
        moved = np.empty_like(basis.states)
        moved[:, perm] = basis.states
        rows = basis.index_of(moved)
        cols = np.arange(basis.dim)
        return sp.csr_matrix((np.ones(basis.dim), (rows, cols)), shape=(basis.dim, basis.dim))


fock_service = FockService()
