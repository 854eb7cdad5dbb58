"""
Geometric localization domain types.
"""
from dataclasses import dataclass

import numpy as np

from bmfl.core.exceptions import SymmetryViolationException, ValidationException
from bmfl.utils.linalg import frozen, hermitize, max_asymmetry

SPECTRAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LocalizingOperator:
    """Hermitian d x d operator with 0 <= A <= 1."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        asymmetry = max_asymmetry(matrix)
        if asymmetry > SPECTRAL_TOL:
            raise SymmetryViolationException("localizing operator is not hermitian",
                                             max_asymmetry=asymmetry)
        values = np.linalg.eigvalsh(hermitize(matrix))
        if values[0] < -SPECTRAL_TOL or values[-1] > 1 + SPECTRAL_TOL:
            raise ValidationException(
                f"localizing operator spectrum [{values[0]:.3g}, {values[-1]:.3g}] not in [0, 1]"
            )
        object.__setattr__(self, "matrix", frozen(hermitize(matrix)))

    @classmethod
    def projector_onto_sites(cls, modes: int, sites) -> "LocalizingOperator":
        diagonal = np.zeros(modes)
        diagonal[list(sites)] = 1.0
        return cls(np.diag(diagonal))

    @classmethod
    def projector_onto(cls, vector) -> "LocalizingOperator":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @property
    def modes(self) -> int:
        return int(self.matrix.shape[0])

    def complement(self) -> "LocalizingOperator":
        """sqrt(1 - A^2) by spectral calculus."""
        values, vectors = np.linalg.eigh(self.matrix)
        roots = np.sqrt(np.clip(1.0 - values ** 2, 0.0, None))
        return LocalizingOperator((vectors * roots) @ vectors.conj().T)

    def site_mask(self) -> np.ndarray | None:
        """Boolean site mask when A is a diagonal 0/1 projector, else None."""
        diagonal = np.real(np.diag(self.matrix))
        off = self.matrix - np.diag(np.diag(self.matrix))
        if np.max(np.abs(off), initial=0.0) > SPECTRAL_TOL:
            return None
        ones = np.abs(diagonal - 1.0) <= SPECTRAL_TOL
        zeros = np.abs(diagonal) <= SPECTRAL_TOL
        if not np.all(ones | zeros):
            return None
        return ones


@dataclass(frozen=True, eq=False)
class LocalizedState:
    """Components G_{N,0}, ..., G_{N,N}; component k lives on the (d, k) symmetric space."""

    modes: int
    particles: int
    components: tuple

    def traces(self) -> np.ndarray:
        return np.array([float(np.real(np.trace(g))) for g in self.components])

    @property
    def total_mass(self) -> float:
        return float(self.traces().sum())
