"""
Symmetric-space domain types: occupation bases and N-particle states.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bmfl.core.exceptions import DimensionMismatchException, ValidationException
from bmfl.utils.linalg import frozen, hermitize

NORM_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OccupationBasis:
    """
    Occupation-number basis of the N-particle symmetric space over d modes.

    States are listed in reverse-lexicographic order, (N, 0, ..., 0) first and
    (0, ..., 0, N) last. `index_of` is the stars-and-bars rank of that order.
    """

    modes: int
    particles: int
    states: np.ndarray
    pascal: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def index_of(self, occupations) -> np.ndarray | int:
        """
        Position of one occupation vector (returns int) or of a stack of them.

        The rank counts the vectors that precede n in reverse-lex order: at
        position j with R particles still to place, every larger n_j
        contributes binomial(R - n_j - 1 + m, m) completions, m = d - j - 1.
        """
        occ = np.asarray(occupations, dtype=np.int64)
        single = occ.ndim == 1
        occ = np.atleast_2d(occ)
        remaining = np.full(occ.shape[0], self.particles, dtype=np.int64)
        rank = np.zeros(occ.shape[0], dtype=np.int64)
        for j in range(self.modes - 1):
            m = self.modes - j - 1
            slack = remaining - occ[:, j]
            hit = slack >= 1
            rank[hit] += self.pascal[slack[hit] - 1 + m, m]
            remaining = slack
        return int(rank[0]) if single else rank

    def __repr__(self):
        return f"<OccupationBasis(modes={self.modes}, particles={self.particles}, dim={self.dim})>"


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized vector of the symmetric space."""

    basis: OccupationBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.basis.dim,):
            raise DimensionMismatchException(
                f"amplitudes have shape {amplitudes.shape}, basis has dimension {self.basis.dim}"
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL * max(1, self.basis.particles):
            raise ValidationException(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", frozen(amplitudes))

    @property
    def particles(self) -> int:
        return self.basis.particles

    def density(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True, eq=False)
class MixedState:
    """
    Density matrix on the symmetric space, stored as an ensemble.

    The state is sum_i weights[i] |vectors[:, i]><vectors[:, i]| with unit
    columns and weights summing to one. `from_matrix` obtains the ensemble
    from the spectral decomposition, `from_ensemble` keeps a given one, which
    avoids ever forming the dense matrix for large bases.
    """

    basis: OccupationBasis
    weights: np.ndarray
    vectors: np.ndarray
    _matrix: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_matrix(cls, basis: OccupationBasis, matrix: np.ndarray) -> "MixedState":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (basis.dim, basis.dim):
            raise DimensionMismatchException(
                f"matrix has shape {matrix.shape}, basis has dimension {basis.dim}"
            )
        matrix = hermitize(matrix)
        trace = float(np.real(np.trace(matrix)))
        if abs(trace - 1.0) > PSD_TOL:
            raise ValidationException(f"mixed state trace is {trace!r}, expected 1")
        values, vectors = np.linalg.eigh(matrix)
        if values.size and values[0] < -PSD_TOL * trace:
            raise ValidationException(f"mixed state has negative eigenvalue {values[0]!r}")
        keep = values > 0
        return cls(basis, frozen(values[keep]), frozen(vectors[:, keep]), frozen(matrix))

    @classmethod
    def from_ensemble(cls, basis: OccupationBasis, weights, vectors) -> "MixedState":
        weights = np.asarray(weights, dtype=float)
        vectors = np.asarray(vectors, dtype=complex).reshape(basis.dim, -1)
        if weights.shape != (vectors.shape[1],):
            raise DimensionMismatchException("one weight per ensemble vector is required")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > PSD_TOL:
            raise ValidationException("ensemble weights must be non-negative and sum to 1")
        norms = np.linalg.norm(vectors, axis=0)
        if np.any(np.abs(norms - 1.0) > NORM_TOL * max(1, basis.particles)):
            raise ValidationException("ensemble vectors must be normalized")
        keep = weights > 0
        return cls(basis, frozen(weights[keep]), frozen(vectors[:, keep]))

    @classmethod
    def from_pure(cls, state: PureState) -> "MixedState":
        return cls.from_ensemble(state.basis, [1.0], state.amplitudes[:, None])

    @property
    def particles(self) -> int:
        return self.basis.particles

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        return (self.vectors * self.weights) @ self.vectors.conj().T


def ensemble_of(state: "PureState | MixedState") -> tuple[np.ndarray, np.ndarray]:
    """(weights, column vectors) of a pure or mixed state."""
    if isinstance(state, PureState):
        return np.ones(1), state.amplitudes[:, None]
    return state.weights, state.vectors
