"""
Reduced density matrix domain type.
"""
from dataclasses import dataclass

import numpy as np

from bmfl.utils.linalg import frozen


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    k-particle density matrix on the symmetric k-space over d modes.

    Rows and columns follow the occupation basis of (d, k). Matrices produced
    by reduction have trace one; de Finetti hierarchies of ball-valued
    measures may have smaller trace.
    """

    order: int
    modes: int
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", frozen(np.asarray(self.matrix, dtype=complex)))

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def __repr__(self):
        return f"<DensityMatrix(order={self.order}, modes={self.modes}, trace={self.trace:.6g})>"
