"""
Tests for reduced density matrices and energies evaluated from them.
"""
import numpy as np
import pytest

from bmfl.core.exceptions import OrderOutOfRangeException
from bmfl.models.fock import MixedState
from bmfl.services.fock_service import fock_service
from bmfl.services.model_service import model_service
from bmfl.services.rdm_service import rdm_service
from bmfl.services.verify_service import random_mixed_state
from tests.factories import random_dense_model
from tests.oracles import reduced_on_basis


@pytest.mark.rdm
@pytest.mark.unit
class TestReduce:
    """gamma^(k) against the tensor-space partial trace."""

    @pytest.mark.parametrize("modes,particles,order", [(2, 3, 1), (2, 4, 2), (3, 3, 2), (3, 4, 1), (2, 5, 3)])
    def test_matches_tensor_partial_trace(self, rng, modes, particles, order):
        """Occupation-basis reduction equals the brute-force partial trace."""
        state = random_mixed_state(fock_service.build_basis(modes, particles), rng)
        gamma = rdm_service.reduce(state, order).matrix
        assert np.allclose(gamma, reduced_on_basis(state.matrix, modes, particles, order), atol=1e-12)

    def test_trace_and_positivity(self, rng):
        """Every order has trace one and no negative eigenvalue."""
        state = random_mixed_state(fock_service.build_basis(3, 4), rng)
        for order in range(5):
            gamma = rdm_service.reduce(state, order)
            assert gamma.trace == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.eigvalsh(gamma.matrix)[0] >= -1e-12

    def test_full_order_is_the_state(self, rng):
        """gamma^(N) is the state itself."""
        state = random_mixed_state(fock_service.build_basis(2, 3), rng)
        assert np.allclose(rdm_service.reduce(state, 3).matrix, state.matrix)

    def test_zero_order(self, rng):
        """gamma^(0) is [[1]]."""
        state = random_mixed_state(fock_service.build_basis(2, 3), rng)
        assert np.allclose(rdm_service.reduce(state, 0).matrix, [[1.0]])

    def test_product_state(self, rng):
        """Reducing u^{(x)N} gives |u^{(x)k}><u^{(x)k}|."""
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        u /= np.linalg.norm(u)
        state = fock_service.product_state(fock_service.build_basis(3, 5), u)
        phi = fock_service.tensor_power(fock_service.build_basis(3, 2), u)
        assert np.allclose(rdm_service.reduce(state, 2).matrix, np.outer(phi, phi.conj()), atol=1e-12)

    def test_order_out_of_range(self, rng):
        """k > N is rejected."""
        state = random_mixed_state(fock_service.build_basis(2, 2), rng)
        with pytest.raises(OrderOutOfRangeException):
            rdm_service.reduce(state, 3)

    def test_pure_and_mixed_agree(self, rng):
        """A pure state and its one-element ensemble reduce identically."""
        u = np.array([0.6, 0.8j])
        pure = fock_service.product_state(fock_service.build_basis(2, 4), u)
        mixed = MixedState.from_pure(pure)
        assert np.allclose(rdm_service.reduce(pure, 2).matrix, rdm_service.reduce(mixed, 2).matrix)


@pytest.mark.rdm
@pytest.mark.unit
class TestConsistency:
    """Marginals of marginals."""

    @pytest.mark.parametrize("modes", [2, 3])
    @pytest.mark.parametrize("particles", [2, 3, 4, 5, 6])
    def test_partial_trace_of_higher_marginal(self, rng, modes, particles):
        """Tr_{k+1 -> k+n} gamma^(k+n) = gamma^(k) for all k + n <= N."""
        state = random_mixed_state(fock_service.build_basis(modes, particles), rng)
        for order in range(particles):
            for extra in range(1, particles - order + 1):
                assert rdm_service.consistency_defect(state, order, extra) <= 1e-9

    def test_partial_trace_is_trace_preserving(self, rng):
        """Traces survive partial tracing of arbitrary hermitian operators."""
        basis = fock_service.build_basis(3, 3)
        h = rng.standard_normal((basis.dim, basis.dim))
        h = h + h.T
        reduced = rdm_service.partial_trace(h, basis, 1)
        assert np.trace(reduced) == pytest.approx(np.trace(h))


@pytest.mark.rdm
@pytest.mark.unit
class TestEnergy:
    """<H_N>/N from reduced matrices."""

    @pytest.mark.parametrize("particles", [1, 2, 3, 5])
    def test_matches_expectation(self, rng, particles):
        """Tr(T g1) + 1/2 Tr(w g2) = <H_N>/N on random mixed states."""
        model = random_dense_model(3, rng)
        state = random_mixed_state(fock_service.build_basis(3, particles), rng)
        operator = model_service.assemble(model, particles)
        exact = float(np.real(np.trace(operator.dense() @ state.matrix))) / particles
        assert rdm_service.energy_per_particle(model, state) == pytest.approx(exact, abs=1e-10)

    def test_two_forms_agree(self, rng, dimer):
        """The direct and two-body Hamiltonian forms coincide."""
        state = random_mixed_state(fock_service.build_basis(2, 6), rng)
        direct, alternative = rdm_service.energy_components(dimer, state)
        assert abs(direct - alternative) <= 1e-10


@pytest.mark.rdm
@pytest.mark.slow
class TestRandomizedStates:
    """Twenty random mixed states per (N, d)."""

    @pytest.mark.parametrize("modes", [2, 3])
    @pytest.mark.parametrize("particles", [2, 3, 4, 5, 6])
    def test_reduction_consistency_and_energy(self, modes, particles):
        """Reductions match the tensor oracle, nest consistently and give <H_N>/N."""
        model = random_dense_model(modes, np.random.default_rng(modes * 10 + particles))
        operator = model_service.assemble(model, particles).dense()
        basis = fock_service.build_basis(modes, particles)
        for seed in range(20):
            state = random_mixed_state(basis, np.random.default_rng(seed))
            gamma = rdm_service.reduce(state, 2).matrix
            assert np.allclose(gamma, reduced_on_basis(state.matrix, modes, particles, 2), atol=1e-12)
            for order in range(particles):
                assert rdm_service.consistency_defect(state, order, particles - order) <= 1e-9
            exact = float(np.real(np.trace(operator @ state.matrix))) / particles
            assert rdm_service.energy_per_particle(model, state) == pytest.approx(exact, abs=1e-10)
