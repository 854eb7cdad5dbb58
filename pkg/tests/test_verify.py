"""
Tests for the identity suite.
"""
import numpy as np
import pytest

from bmfl.services.verify_service import verify_service
from tests.factories import random_dense_model

IDENTITIES = {
    "marginal_consistency",
    "localized_mass",
    "localization_duality",
    "localization_reconstruction",
    "binomial_ratio_bound",
    "moment_bound",
    "hartree_gradient",
    "energy_equivalence",
    "kinetic_sandwich",
}


@pytest.mark.verify
@pytest.mark.unit
class TestIdentitySuite:
    """Every identity holds on random states."""

    @pytest.mark.parametrize("particles", [2, 3, 4, 5, 6])
    def test_dimer(self, dimer, particles):
        """All checks pass for d = 2."""
        checks = verify_service.run_identity_suite(dimer, particles, seed=particles)
        assert {c.name for c in checks} == IDENTITIES
        assert all(c.passed for c in checks), [c for c in checks if not c.passed]

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_random_three_mode_model(self, rng, seed):
        """All checks pass for d = 3 with a dense interaction."""
        model = random_dense_model(3, rng)
        checks = verify_service.run_identity_suite(model, 4, seed=seed)
        assert all(c.passed for c in checks), [c for c in checks if not c.passed]

    def test_single_particle(self, trapped_chain):
        """N = 1 has nothing to reduce but still passes."""
        assert all(c.passed for c in verify_service.run_identity_suite(trapped_chain, 1))

    def test_deterministic(self, attractive_ring):
        """The same seed gives the same values."""
        first = verify_service.run_identity_suite(attractive_ring, 3, seed=5)
        second = verify_service.run_identity_suite(attractive_ring, 3, seed=5)
        assert [c.value for c in first] == [c.value for c in second]


@pytest.mark.verify
@pytest.mark.slow
class TestIdentitySweep:
    """Twenty random mixed states per (N, d)."""

    @pytest.mark.parametrize("modes", [2, 3])
    @pytest.mark.parametrize("particles", [2, 3, 4, 5, 6])
    def test_twenty_seeds(self, modes, particles):
        """Every identity passes for seeds 0..19 on a random dense model."""
        model = random_dense_model(modes, np.random.default_rng(100 * modes + particles))
        for seed in range(20):
            checks = verify_service.run_identity_suite(model, particles, seed=seed)
            assert {c.name for c in checks} == IDENTITIES
            assert all(c.passed for c in checks), (seed, [c for c in checks if not c.passed])
