"""
Atomic de Finetti measures on the unit ball of the one-particle space.
"""
from dataclasses import dataclass

import numpy as np

from bmfl.core.exceptions import DimensionMismatchException, ValidationException
from bmfl.utils.linalg import canonical_phase, frozen

WEIGHT_TOL = 1e-12
BALL_TOL = 1e-12
SPHERE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DeFinettiMeasure:
    """
    Finite probability measure sum_i w_i delta_{u_i} with ||u_i|| <= 1.

    Atoms are stored phase-canonicalized (largest-modulus coefficient real
    and non-negative), so atoms equal up to a global phase compare equal.
    """

    weights: np.ndarray
    atoms: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=complex))
        if weights.shape != (atoms.shape[0],):
            raise DimensionMismatchException("one weight per atom is required", path="atoms")
        if np.any(weights < 0):
            raise ValidationException("weights must be non-negative", path="atoms")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValidationException(f"weights sum to {weights.sum()!r}, expected 1", path="atoms")
        masses = np.sum(np.abs(atoms) ** 2, axis=1)
        if np.any(masses > 1.0 + BALL_TOL):
            raise ValidationException("atom outside the closed unit ball", path="atoms")
        canonical = np.array([canonical_phase(u) for u in atoms])
        object.__setattr__(self, "weights", frozen(weights))
        object.__setattr__(self, "atoms", frozen(canonical))

    @property
    def modes(self) -> int:
        return int(self.atoms.shape[1])

    @property
    def masses(self) -> np.ndarray:
        return np.sum(np.abs(self.atoms) ** 2, axis=1)

    @property
    def sphere_supported(self) -> bool:
        return bool(np.all(np.abs(self.masses - 1.0) <= SPHERE_TOL))

    def __len__(self):
        return int(self.weights.size)
