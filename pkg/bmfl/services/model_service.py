"""
Model service - model ingestion and many-body Hamiltonian assembly.
"""
import itertools
import json
import logging
from pathlib import Path
from typing import Any, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from pydantic import ValidationError

from bmfl.core.exceptions import (
    DimensionMismatchException,
    ParseException,
    SymmetryViolationException,
    ValidationException,
)
from bmfl.models.fock import OccupationBasis
from bmfl.models.operators import (
    HERMITIAN_TOL,
    ManyBodyOperator,
    ModelSpec,
    OneBodyOperator,
    TwoBodyOperator,
)
from bmfl.schemas.model import (
    DenseTwoBody,
    ModelFile,
    OnsiteTwoBody,
    PairPotentialTwoBody,
    translate_validation_error,
)
from bmfl.schemas.results import InteractionBounds
from bmfl.services.fock_service import fock_service
from bmfl.utils.linalg import hermitize

logger = logging.getLogger(__name__)

SYMMETRY_MODE_LIMIT = 7
SYMMETRY_TOL = 1e-10


def _complex_matrix(rows: list, path: str, shape: tuple[int, int]) -> np.ndarray:
    if len(rows) != shape[0]:
        raise DimensionMismatchException(f"expected {shape[0]} rows, got {len(rows)}", path=path)
    for r, row in enumerate(rows):
        if len(row) != shape[1]:
            raise DimensionMismatchException(
                f"expected {shape[1]} columns, got {len(row)}", path=f"{path}[{r}]"
            )
    pairs = np.asarray(rows, dtype=float)
    return pairs[..., 0] + 1j * pairs[..., 1]


def _check_hermitian(matrix: np.ndarray, path: str, reference: Optional[np.ndarray] = None) -> None:
    """Raise with the JSON path of the worst entry of |M - reference|."""
    reference = matrix.conj().T if reference is None else reference
    defect = np.abs(matrix - reference)
    worst = float(defect.max(initial=0.0))
    if worst > HERMITIAN_TOL:
        r, c = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise SymmetryViolationException(
            "operator is not symmetric", path=f"{path}[{r}][{c}]", max_asymmetry=worst
        )


def site_distance(i: int, j: int, modes: int, geometry: str) -> int:
    """Lattice distance on a chain or ring; a 2-site ring is a chain."""
    gap = abs(i - j)
    if geometry == "ring" and modes > 2:
        return min(gap, modes - gap)
    return gap


def nearest_neighbour_hopping(modes: int, t: float, geometry: str) -> np.ndarray:
    """-t on every nearest-neighbour bond."""
    kinetic = np.zeros((modes, modes), dtype=complex)
    for i in range(modes - 1):
        kinetic[i, i + 1] = kinetic[i + 1, i] = -t
    if geometry == "ring" and modes > 2:
        kinetic[0, modes - 1] = kinetic[modes - 1, 0] = -t
    return kinetic


def pair_potential_matrix(modes: int, values: tuple[float, ...], geometry: str) -> np.ndarray:
    """Diagonal w with <e_i e_j, w e_i e_j> = w(dist(i, j)); distances past the list give 0."""
    diagonal = np.zeros(modes * modes)
    for i in range(modes):
        for j in range(modes):
            r = site_distance(i, j, modes, geometry)
            if r < len(values):
                diagonal[i * modes + j] = values[r]
    return np.diag(diagonal).astype(complex)


class ModelService:
    """Service for model files and Hamiltonians."""

    def parse_model(self, data: Any) -> ModelSpec:
        """
        Validate an in-memory model document.

        Args:
            data: Decoded JSON document

        Returns:
            ModelSpec with the shorthand forms expanded

        Raises:
            ValidationException: With the JSON path of the offending field
        """
        try:
            doc = ModelFile.model_validate(data)
        except ValidationError as exc:
            raise translate_validation_error(exc) from exc

        d = doc.modes
        geometry = doc.effective_geometry

        kinetic = np.zeros((d, d), dtype=complex)
        if doc.one_body is not None:
            kinetic = _complex_matrix(doc.one_body, "one_body", (d, d))
            _check_hermitian(kinetic, "one_body")
        if doc.hopping is not None:
            kinetic = kinetic + nearest_neighbour_hopping(d, doc.hopping, geometry)

        potential = np.zeros(d)
        if doc.external_potential is not None:
            if len(doc.external_potential) != d:
                raise DimensionMismatchException(
                    f"expected {d} entries, got {len(doc.external_potential)}", path="external_potential"
                )
            potential = np.asarray(doc.external_potential, dtype=float)

        pair_values = None
        two_body = doc.two_body
        if two_body is None:
            w = np.zeros((d * d, d * d), dtype=complex)
        elif isinstance(two_body, DenseTwoBody):
            w = _complex_matrix(two_body.matrix, "two_body.matrix", (d * d, d * d))
            _check_hermitian(w, "two_body.matrix")
            _check_hermitian(w, "two_body.matrix", TwoBodyOperator(w).swapped())
        elif isinstance(two_body, OnsiteTwoBody):
            pair_values = (float(two_body.U),)
            w = pair_potential_matrix(d, pair_values, geometry)
        elif isinstance(two_body, PairPotentialTwoBody):
            pair_values = tuple(float(v) for v in two_body.values)
            w = pair_potential_matrix(d, pair_values, geometry)
        else:
            raise ValidationException("unknown interaction kind", path="two_body.kind")

        model = ModelSpec(
            modes=d,
            kinetic=OneBodyOperator(kinetic),
            external_potential=potential,
            two_body=TwoBodyOperator(w),
            name=doc.name,
            geometry=geometry,
            pair_values=pair_values,
        )
        logger.info(f"Parsed model '{model.name}' with {d} modes ({geometry})")
        return model

    def load_model(self, path: str | Path) -> ModelSpec:
        """
        Read and validate a model file.

        Raises:
            ParseException: If the file is missing or not valid JSON
            ValidationException: If the document violates the schema
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ParseException(f"model file '{path}' not found", path="model") from exc
        except json.JSONDecodeError as exc:
            raise ParseException(f"invalid JSON at line {exc.lineno}: {exc.msg}", path="model") from exc
        return self.parse_model(data)

    def assemble(self, model: ModelSpec, particles: int) -> ManyBodyOperator:
        """
        Assemble H_N in second quantization.

        H_N = sum_ij T_ij a+_i a_j + (2(N-1))^-1 sum w_(ij),(kl) a+_i a+_j a_l a_k;
        for N = 1 the interaction is dropped.

        Raises:
            ValidationException: If N < 1
            CapacityException: If the symmetric space exceeds the cap
        """
        return self.scaled_assemble(model, particles, 1.0)

    def scaled_assemble(self, model: ModelSpec, particles: int, coupling: float) -> ManyBodyOperator:
        """H_N with the interaction multiplied by `coupling` in [0, 1]."""
        if particles < 1:
            raise ValidationException(f"need at least one particle, got {particles}", path="n")
        if not 0.0 <= coupling <= 1.0:
            raise ValidationException(f"coupling {coupling!r} outside [0, 1]", path="lambda")

        basis = fock_service.build_basis(model.modes, particles)
        matrix = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)

        t = model.one_body.matrix
        for i, j in zip(*np.nonzero(t)):
            matrix = matrix + t[i, j] * fock_service.transition_matrix(basis, int(i), int(j))

        if particles >= 2 and coupling != 0.0 and model.has_interaction:
            w4 = model.two_body.as_tensor()
            prefactor = coupling / (2.0 * (particles - 1))
            for i, j, k, l in np.argwhere(w4 != 0):
                _, term = fock_service.ladder(
                    basis, [(int(k), -1), (int(l), -1), (int(j), +1), (int(i), +1)]
                )
                matrix = matrix + (prefactor * w4[i, j, k, l]) * term

        matrix = (0.5 * (matrix + matrix.conj().T)).tocsr()
        matrix.sum_duplicates()
        matrix.sort_indices()
        logger.info(
            f"Assembled H_{particles} for '{model.name}': dim={basis.dim}, nnz={matrix.nnz}, coupling={coupling:g}"
        )
        return ManyBodyOperator(basis, matrix, coupling)

    def symmetric_pair_operator(self, model: ModelSpec) -> np.ndarray:
        """w compressed onto the symmetric two-particle occupation basis."""
        basis = fock_service.build_basis(model.modes, 2)
        embedding = fock_service.symmetric_embedding(basis)
        return hermitize(embedding.T @ model.two_body.matrix @ embedding)

    def symmetries(self, model: ModelSpec) -> list[tuple[int, ...]]:
        """
        Mode permutations leaving T and w invariant, identity first.

        Only the identity is returned above SYMMETRY_MODE_LIMIT modes.
        """
        d = model.modes
        identity = tuple(range(d))
        if d > SYMMETRY_MODE_LIMIT:
            return [identity]
        t = model.one_body.matrix
        w4 = model.two_body.as_tensor()
        found = []
        for perm in itertools.permutations(range(d)):
            inverse = np.argsort(perm)
            if np.max(np.abs(t[np.ix_(inverse, inverse)] - t)) > SYMMETRY_TOL:
                continue
            moved = w4[np.ix_(inverse, inverse, inverse, inverse)]
            if np.max(np.abs(moved - w4)) > SYMMETRY_TOL:
                continue
            found.append(tuple(int(p) for p in perm))
        logger.debug(f"Model '{model.name}' has {len(found)} mode symmetries")
        return found

    def interaction_bounds(self, model: ModelSpec) -> InteractionBounds:
        """
        Smallest beta_-/beta_+ with -beta_-(T'x1 + 1xT') <= w <= beta_+(T'x1 + 1xT').

        T' = T - min sigma(T) + 1 and the bounds are taken on the symmetric
        two-particle space, the only sector H_N sees.
        """
        t = model.one_body.matrix
        lowest = float(np.linalg.eigvalsh(t)[0])
        shifted = t - (lowest - 1.0) * np.eye(model.modes)

        basis = fock_service.build_basis(model.modes, 2)
        embedding = fock_service.symmetric_embedding(basis)
        identity = np.eye(model.modes)
        kinetic_pair = embedding.T @ (np.kron(shifted, identity) + np.kron(identity, shifted)) @ embedding
        w_pair = self.symmetric_pair_operator(model)
        ratios = sla.eigh(w_pair, hermitize(kinetic_pair), eigvals_only=True)
        return InteractionBounds(
            beta_minus=max(0.0, -float(ratios[0])),
            beta_plus=max(0.0, float(ratios[-1])),
            kinetic_minimum=lowest,
        )

    def sandwich_defect(self, model: ModelSpec, particles: int, vectors: np.ndarray) -> float:
        """
        Largest violation of (1-b-) sum T'_j + c <= H_N <= (1+b+) sum T'_j + c on the columns of `vectors`.

        c = N (min sigma(T) - 1).
        """
        bounds = self.interaction_bounds(model)
        operator = self.assemble(model, particles)
        basis: OccupationBasis = operator.basis
        shift = particles * (bounds.kinetic_minimum - 1.0)
        kinetic = model.one_body.matrix - (bounds.kinetic_minimum - 1.0) * np.eye(model.modes)
        free = sp.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for i, j in zip(*np.nonzero(kinetic)):
            free = free + kinetic[i, j] * fock_service.transition_matrix(basis, int(i), int(j))

        worst = 0.0
        for v in np.asarray(vectors).T:
            v = v / np.linalg.norm(v)
            h = operator.expectation(v)
            k = float(np.real(np.vdot(v, free @ v)))
            lower = (1.0 - bounds.beta_minus) * k + shift
            upper = (1.0 + bounds.beta_plus) * k + shift
            worst = max(worst, lower - h, h - upper)
        return worst

    def kinetic_condition(self, model: ModelSpec) -> bool:
        """True when min sigma(K) <= 0."""
        return bool(np.linalg.eigvalsh(model.kinetic.matrix)[0] <= 1e-12)


model_service = ModelService()
