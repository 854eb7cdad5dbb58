"""
Small dense linear-algebra helpers shared by the services.
"""
import numpy as np


def max_asymmetry(matrix: np.ndarray) -> float:
    """Largest entry of |M - M^H|."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def trace_norm(matrix: np.ndarray) -> float:
    """Trace norm of a hermitian matrix (sum of absolute eigenvalues)."""
    if matrix.size == 0:
        return 0.0
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(matrix)))))


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Square root of a positive semidefinite matrix by spectral calculus."""
    values, vectors = np.linalg.eigh(hermitize(matrix))
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """
    Uhlmann fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2.

    For a rank-one sigma = |phi><phi| this is <phi, rho phi>.
    """
    root = psd_sqrt(sigma)
    inner = np.linalg.eigvalsh(hermitize(root @ rho @ root))
    return float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)


def canonical_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-modulus entry is real and non-negative."""
    vector = np.asarray(vector, dtype=complex)
    if vector.size == 0:
        return vector.copy()
    pivot = int(np.argmax(np.abs(vector)))
    if np.abs(vector[pivot]) == 0:
        return vector.copy()
    return vector * (np.abs(vector[pivot]) / vector[pivot])


def frozen(array: np.ndarray) -> np.ndarray:
    """Read-only copy of an array."""
    array = np.array(array)
    array.flags.writeable = False
    return array
