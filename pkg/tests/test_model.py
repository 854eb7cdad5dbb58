"""
Tests for model files and Hamiltonian assembly.
"""
import json

import numpy as np
import pytest

from bmfl.core.exceptions import (
    DimensionMismatchException,
    ParseException,
    SymmetryViolationException,
    ValidationException,
)
from bmfl.services.model_service import model_service
from tests.factories import onsite_model, random_dense_model
from tests.oracles import compressed_hamiltonian


def zero_pairs(rows, cols):
    return [[[0.0, 0.0] for _ in range(cols)] for _ in range(rows)]


@pytest.mark.model
@pytest.mark.unit
class TestParseModel:
    """Validation of model documents."""

    def test_onsite_shorthand(self, dimer):
        """hopping and onsite expand to -t bonds and a diagonal w."""
        assert np.allclose(dimer.one_body.matrix, [[0, -1], [-1, 0]])
        assert np.allclose(np.diag(dimer.two_body.matrix), [1, 0, 0, 1])
        assert dimer.pair_values == (1.0,)

    def test_non_hermitian_one_body_path(self):
        """The error names the offending entry."""
        one_body = zero_pairs(2, 2)
        one_body[0][1] = [1.0, 0.0]
        with pytest.raises(SymmetryViolationException) as exc:
            model_service.parse_model({"modes": 2, "one_body": one_body})
        assert exc.value.path == "one_body[0][1]"
        assert exc.value.max_asymmetry == pytest.approx(1.0)

    def test_exchange_asymmetric_two_body(self):
        """A hermitian w that is not swap-symmetric is rejected."""
        matrix = zero_pairs(4, 4)
        matrix[1][1] = [1.0, 0.0]
        with pytest.raises(SymmetryViolationException) as exc:
            model_service.parse_model({"modes": 2, "two_body": {"kind": "dense", "matrix": matrix}})
        assert exc.value.path == "two_body.matrix[1][1]"

    def test_wrong_shape(self):
        """A 3 x 3 one-body matrix for d = 2 is a dimension mismatch."""
        with pytest.raises(DimensionMismatchException) as exc:
            model_service.parse_model({"modes": 2, "one_body": zero_pairs(3, 3)})
        assert exc.value.path == "one_body"

    def test_schema_error_path(self):
        """A complex entry with one component reports its JSON path."""
        with pytest.raises(ValidationException) as exc:
            model_service.parse_model({"modes": 1, "two_body": {"kind": "dense", "matrix": [[[1.0]]]}})
        assert exc.value.path == "two_body.matrix[0][0]"
        assert exc.value.exit_code == 2

    def test_unknown_field(self):
        """Extra keys are not allowed."""
        with pytest.raises(ValidationException):
            model_service.parse_model({"modes": 2, "temperature": 3})

    def test_missing_file(self, tmp_path):
        """A missing model file is a parse error."""
        with pytest.raises(ParseException):
            model_service.load_model(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        """Malformed JSON is a parse error."""
        path = tmp_path / "broken.json"
        path.write_text("{\"modes\": 2,", encoding="utf-8")
        with pytest.raises(ParseException):
            model_service.load_model(path)

    def test_bundled_models_load(self, data_dir):
        """Every model shipped in data/ parses."""
        for name in ("dimer", "dimer_attractive", "ring3_attractive", "trapped_chain"):
            model = model_service.load_model(data_dir / f"{name}.json")
            assert model.modes == json.loads((data_dir / f"{name}.json").read_text())["modes"]


@pytest.mark.model
@pytest.mark.unit
class TestAssemble:
    """Second-quantized H_N against closed forms and the tensor space."""

    def test_free_dimer_two_particles(self, free_dimer):
        """U = 0, N = 2 has the levels -2, 0, 2."""
        values = np.linalg.eigvalsh(model_service.assemble(free_dimer, 2).dense())
        assert np.allclose(values, [-2.0, 0.0, 2.0])

    def test_single_mode_is_scalar(self):
        """d = 1: H_N = N T + N U / 2."""
        model = model_service.parse_model({
            "modes": 1, "one_body": [[[2.0, 0.0]]], "two_body": {"kind": "onsite", "U": 3.0},
        })
        operator = model_service.assemble(model, 4)
        assert np.allclose(operator.dense(), [[14.0]])

    def test_one_particle_drops_interaction(self, dimer):
        """H_1 is T."""
        assert np.allclose(model_service.assemble(dimer, 1).dense(), dimer.one_body.matrix)

    @pytest.mark.parametrize("particles", [2, 3, 4])
    def test_matches_tensor_space(self, rng, particles):
        """Compression of the tensor-space H_N equals the assembled matrix."""
        model = random_dense_model(2, rng)
        assembled = model_service.assemble(model, particles).dense()
        assert np.allclose(assembled, compressed_hamiltonian(model, particles), atol=1e-12)

    def test_three_modes_tensor_space(self, random_model):
        """Same comparison for d = 3, N = 3."""
        assembled = model_service.assemble(random_model, 3).dense()
        assert np.allclose(assembled, compressed_hamiltonian(random_model, 3), atol=1e-12)

    def test_hermitian_csr(self, attractive_ring):
        """The assembled matrix is hermitian with sorted indices."""
        operator = model_service.assemble(attractive_ring, 4)
        dense = operator.dense()
        assert np.allclose(dense, dense.conj().T)
        assert operator.matrix.has_sorted_indices

    def test_coupling_range(self, dimer):
        """Couplings outside [0, 1] are rejected."""
        with pytest.raises(ValidationException):
            model_service.scaled_assemble(dimer, 2, 1.5)

    def test_zero_particles_rejected(self, dimer):
        """N must be at least one."""
        with pytest.raises(ValidationException):
            model_service.assemble(dimer, 0)


@pytest.mark.model
@pytest.mark.unit
class TestModelStructure:
    """Symmetries, translation invariance and interaction bounds."""

    def test_dimer_swap_symmetry(self, dimer):
        """The dimer is invariant under exchanging its sites."""
        assert model_service.symmetries(dimer) == [(0, 1), (1, 0)]

    def test_trap_breaks_symmetry(self, trapped_chain):
        """A one-site well leaves only the identity."""
        assert model_service.symmetries(trapped_chain) == [(0, 1, 2, 3)]

    def test_ring_translation_invariant(self, attractive_ring, trapped_chain):
        """Rings are shift-invariant, trapped chains are not."""
        assert attractive_ring.translation_invariant
        assert not trapped_chain.translation_invariant

    def test_open_chain_ring_distance(self):
        """Ring distances wrap, chain distances do not."""
        chain = onsite_model(4, 1.0, 0.0)
        assert chain.one_body.matrix[0, 3] == 0
        ring = onsite_model(4, 1.0, 0.0, geometry="ring")
        assert ring.one_body.matrix[0, 3] == -1

    def test_kinetic_sandwich(self, rng, attractive_dimer):
        """(1 - b-) sum T' + c <= H_N <= (1 + b+) sum T' + c on random vectors."""
        bounds = model_service.interaction_bounds(attractive_dimer)
        assert bounds.beta_minus > 0
        dim = model_service.assemble(attractive_dimer, 5).dim
        vectors = rng.standard_normal((dim, 6)) + 1j * rng.standard_normal((dim, 6))
        assert model_service.sandwich_defect(attractive_dimer, 5, vectors) <= 1e-9

    def test_free_model_bounds_vanish(self, free_dimer):
        """Without interaction both constants are zero."""
        bounds = model_service.interaction_bounds(free_dimer)
        assert bounds.beta_minus == pytest.approx(0.0, abs=1e-12)
        assert bounds.beta_plus == pytest.approx(0.0, abs=1e-12)
