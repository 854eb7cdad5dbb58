"""
Operator domain types: one- and two-body operators, model bundles and
assembled many-body Hamiltonians.
"""
import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse as sp

from bmfl.models.fock import OccupationBasis
from bmfl.utils.linalg import frozen

HERMITIAN_TOL = 1e-12
SHIFT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OneBodyOperator:
    """Hermitian d x d matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", frozen(np.asarray(self.matrix, dtype=complex)))

    @property
    def modes(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class TwoBodyOperator:
    """
    Hermitian d^2 x d^2 matrix on the two-particle tensor space.

    Pair index (i, j) of e_i (x) e_j is i * d + j.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", frozen(np.asarray(self.matrix, dtype=complex)))

    @property
    def modes(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def as_tensor(self) -> np.ndarray:
        """Entries w[i, j, k, l] = <e_i e_j, w e_k e_l>."""
        d = self.modes
        return self.matrix.reshape(d, d, d, d)

    def swapped(self) -> np.ndarray:
        """Conjugation by the swap of tensor factors."""
        return self.as_tensor().transpose(1, 0, 3, 2).reshape(self.matrix.shape)


def cyclic_shift(modes: int) -> np.ndarray:
    return np.roll(np.eye(modes), 1, axis=0)


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """
    Ingredients of H_N: one-body T = K + V and two-body w.

    `kinetic` is K, `external_potential` the diagonal V; `one_body` holds the
    sum. `pair_values` is set when w is a multiplication operator w(x_i - x_j)
    on the declared geometry (pair potential or on-site kinds).
    """

    modes: int
    kinetic: OneBodyOperator
    external_potential: np.ndarray
    two_body: TwoBodyOperator
    name: str = "model"
    geometry: str = "chain"
    pair_values: Optional[tuple[float, ...]] = None
    one_body: OneBodyOperator = field(init=False)

    def __post_init__(self):
        potential = frozen(np.asarray(self.external_potential, dtype=float))
        object.__setattr__(self, "external_potential", potential)
        object.__setattr__(
            self, "one_body", OneBodyOperator(self.kinetic.matrix + np.diag(potential))
        )

    @property
    def translation_invariant(self) -> bool:
        """True when T and w both commute with the cyclic shift of modes."""
        shift = cyclic_shift(self.modes)
        t = self.one_body.matrix
        if np.max(np.abs(shift @ t - t @ shift), initial=0.0) > SHIFT_TOL:
            return False
        pair_shift = np.kron(shift, shift)
        w = self.two_body.matrix
        return bool(np.max(np.abs(pair_shift @ w - w @ pair_shift), initial=0.0) <= SHIFT_TOL)

    @property
    def has_interaction(self) -> bool:
        return bool(np.any(self.two_body.matrix != 0))

    @property
    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.one_body.matrix).tobytes())
        digest.update(np.ascontiguousarray(self.two_body.matrix).tobytes())
        return digest.hexdigest()

    @property
    def seed(self) -> int:
        """Deterministic integer seed derived from the operators."""
        return int(self.fingerprint[:16], 16)

    def without_potential(self) -> "ModelSpec":
        return replace(self, external_potential=np.zeros(self.modes), name=f"{self.name}/V=0")

    def scaled(self, coupling: float) -> "ModelSpec":
        """Same model with the interaction multiplied by `coupling`."""
        pairs = None if self.pair_values is None else tuple(coupling * v for v in self.pair_values)
        return replace(
            self,
            two_body=TwoBodyOperator(coupling * self.two_body.matrix),
            pair_values=pairs,
            name=f"{self.name}*{coupling:g}",
        )

    def shifted_kinetic(self) -> "ModelSpec":
        """Kinetic part shifted so that min sigma(K) = 0."""
        lowest = float(np.linalg.eigvalsh(self.kinetic.matrix)[0])
        kinetic = OneBodyOperator(self.kinetic.matrix - lowest * np.eye(self.modes))
        return replace(self, kinetic=kinetic, name=f"{self.name}/K>=0")

    def __repr__(self):
        return f"<ModelSpec(name='{self.name}', modes={self.modes}, geometry={self.geometry})>"


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    """Sparse hermitian H_N on a symmetric space (CSR, sorted columns)."""

    basis: OccupationBasis
    matrix: sp.csr_matrix
    coupling: float = 1.0

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, vector: np.ndarray) -> float:
        return float(np.real(np.vdot(vector, self.matrix @ vector)))
