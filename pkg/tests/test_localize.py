"""
Tests for geometric localization.
"""
import numpy as np
import pytest

from bmfl.core.exceptions import SymmetryViolationException, ValidationException
from bmfl.models.localization import LocalizingOperator
from bmfl.services.fock_service import fock_service
from bmfl.services.localize_service import localize_service
from bmfl.services.verify_service import random_localizer, random_mixed_state
from tests.oracles import product_traces


def random_unit(rng, modes):
    u = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
    return u / np.linalg.norm(u)


@pytest.mark.localize
@pytest.mark.unit
class TestLocalizingOperator:
    """Construction of 0 <= A <= 1."""

    def test_rejects_spectrum_above_one(self):
        """2 * identity is not a localizing operator."""
        with pytest.raises(ValidationException):
            LocalizingOperator(2.0 * np.eye(2))

    def test_rejects_non_hermitian(self):
        """A non-hermitian matrix is rejected."""
        with pytest.raises(SymmetryViolationException):
            LocalizingOperator(np.array([[0.5, 0.1], [0.0, 0.5]]))

    def test_site_projector_mask(self):
        """Diagonal 0/1 projectors expose their site mask."""
        operator = LocalizingOperator.projector_onto_sites(3, [0, 2])
        assert operator.site_mask().tolist() == [True, False, True]
        assert operator.complement().site_mask().tolist() == [False, True, False]

    def test_generic_operator_has_no_mask(self, rng):
        """A rotated projector is handled by the general path."""
        assert LocalizingOperator.projector_onto(random_unit(rng, 3)).site_mask() is None

    def test_complement_misses_interior_mass(self):
        """For ||u|| < 1 the complement carries less than 1 - ||Au||^2."""
        operator = LocalizingOperator(np.diag([0.5, 0.2]))
        complement = operator.complement()
        u = np.array([0.6, 0.3j])
        inside = np.linalg.norm(operator.matrix @ u) ** 2
        outside = np.linalg.norm(complement.matrix @ u) ** 2
        assert inside + outside == pytest.approx(np.linalg.norm(u) ** 2, abs=1e-14)
        assert 1.0 - inside > outside + 0.5


@pytest.mark.localize
@pytest.mark.unit
class TestProductStates:
    """Binomial law of localized masses for u^{(x)N}."""

    @pytest.mark.parametrize("particles", [1, 3, 6, 10])
    def test_site_projector_binomial(self, rng, particles):
        """Tr G^P_{N,k} = C(N,k) p^k (1-p)^{N-k} for a site projector."""
        projector = LocalizingOperator.projector_onto_sites(3, [1])
        for _ in range(10):
            u = random_unit(rng, 3)
            state = fock_service.product_state(fock_service.build_basis(3, particles), u)
            traces = localize_service.localized_traces(state, projector)
            assert np.allclose(traces, product_traces(u, projector.matrix, particles), atol=1e-10)

    @pytest.mark.parametrize("particles", [2, 4])
    def test_rank_one_projector_binomial(self, rng, particles):
        """The same law holds for a projector onto a random direction."""
        for _ in range(3):
            u = random_unit(rng, 3)
            projector = LocalizingOperator.projector_onto(random_unit(rng, 3))
            state = fock_service.product_state(fock_service.build_basis(3, particles), u)
            traces = localize_service.localized_traces(state, projector)
            assert np.allclose(traces, product_traces(u, projector.matrix, particles), atol=1e-10)

    def test_linear_statistic_is_p(self, rng):
        """sum_k (k/N) Tr G_k = p."""
        u = random_unit(rng, 2)
        projector = LocalizingOperator.projector_onto_sites(2, [0])
        state = fock_service.product_state(fock_service.build_basis(2, 7), u)
        p = abs(u[0]) ** 2
        assert localize_service.mass_statistic(state, projector, lambda x: x) == pytest.approx(p, abs=1e-12)
        assert localize_service.escape_statistic(state, projector, lambda x: x) == pytest.approx(1 - p, abs=1e-12)

    def test_quadratic_statistic(self):
        """f = lambda^2, p = 1/2, N = 16 gives 0.265625."""
        u = np.array([1.0, 1.0]) / np.sqrt(2.0)
        state = fock_service.product_state(fock_service.build_basis(2, 16), u)
        projector = LocalizingOperator.projector_onto_sites(2, [0])
        value = localize_service.mass_statistic(state, projector, lambda x: x * x)
        assert value == pytest.approx(0.265625, abs=1e-12)


@pytest.mark.localize
@pytest.mark.unit
class TestLocalizationIdentities:
    """Mass, duality and reconstruction on random mixed states."""

    @pytest.mark.parametrize("modes,particles", [(2, 2), (2, 5), (3, 3), (3, 4)])
    def test_total_mass_and_duality(self, rng, modes, particles):
        """Traces sum to one and mirror those of sqrt(1 - A^2)."""
        state = random_mixed_state(fock_service.build_basis(modes, particles), rng)
        operator = random_localizer(modes, rng)
        assert localize_service.localized_traces(state, operator).sum() == pytest.approx(1.0, abs=1e-10)
        assert localize_service.duality_defect(state, operator) <= 1e-9

    def test_components_are_positive(self, rng):
        """Every G_k is positive semidefinite with the listed trace."""
        state = random_mixed_state(fock_service.build_basis(3, 3), rng)
        operator = random_localizer(3, rng)
        localized = localize_service.localize(state, operator)
        assert np.allclose(localized.traces(), localize_service.localized_traces(state, operator), atol=1e-12)
        for component in localized.components:
            assert np.linalg.eigvalsh(component)[0] >= -1e-12

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_reconstruction_generic(self, rng, order):
        """A^{(x)n} gamma^(n) A^{(x)n} is rebuilt from the localized components."""
        state = random_mixed_state(fock_service.build_basis(2, 4), rng)
        operator = random_localizer(2, rng)
        assert localize_service.reconstruction_defect(state, operator, order) <= 1e-9

    def test_reconstruction_site_projector(self, rng):
        """Same identity through the site-mask path."""
        state = random_mixed_state(fock_service.build_basis(3, 4), rng)
        operator = LocalizingOperator.projector_onto_sites(3, [0, 1])
        assert localize_service.reconstruction_defect(state, operator, 2) <= 1e-9

    def test_moment_bound(self, rng):
        """|Tr[A^n gamma^(n) A^n] - sum (k/N)^n Tr G_k| stays below (n-1)^2/(N-n+1)."""
        state = random_mixed_state(fock_service.build_basis(2, 6), rng)
        operator = random_localizer(2, rng)
        defect, bound = localize_service.moment_bound(state, operator, 2)
        assert defect <= bound + 1e-12

    def test_dimension_mismatch(self, rng):
        """A and the state must agree on d."""
        state = random_mixed_state(fock_service.build_basis(2, 2), rng)
        with pytest.raises(ValidationException):
            localize_service.localized_traces(state, LocalizingOperator(np.eye(3)))


@pytest.mark.localize
@pytest.mark.unit
class TestBinomialRatio:
    """Exact bound on (k/N)^n - C(k,n)/C(N,n)."""

    def test_all_pairs_up_to_twenty(self):
        """The difference lies in [0, (n-1)^2/(N-n+1)] for 1 <= n <= N <= 20."""
        for particles in range(1, 21):
            for order in range(1, particles + 1):
                worst, bound = localize_service.binomial_ratio_bound(particles, order)
                assert 0.0 <= worst <= bound

    def test_spot_value(self):
        """N = 10, n = 2: maximum 1/36 against the bound 1/9."""
        worst, bound = localize_service.binomial_ratio_bound(10, 2)
        assert worst == pytest.approx(1 / 36)
        assert bound == pytest.approx(1 / 9)

    def test_first_order_is_exact(self):
        """n = 1 has no defect."""
        assert localize_service.binomial_ratio_bound(7, 1) == (0.0, 0.0)

    def test_invalid_order(self):
        """n = 0 is rejected."""
        with pytest.raises(ValidationException):
            localize_service.binomial_ratio_bound(5, 0)
