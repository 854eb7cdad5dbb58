"""
Tests for canonical free energies and Gibbs states.
"""
import math

import numpy as np
import pytest

from bmfl.config import settings
from bmfl.core.exceptions import CapacityException, DegeneracyException, ValidationException
from bmfl.services.gibbs_service import gibbs_service
from bmfl.services.model_service import model_service
from bmfl.services.spectra_service import spectra_service

FAST = {"restarts": 4}


@pytest.mark.gibbs
@pytest.mark.unit
class TestFreeEnergy:
    """E(beta, N) from the full spectrum."""

    def test_free_dimer_closed_form(self, free_dimer):
        """U = 0, N = 2, beta = 1: -log(e^2 + 1 + e^-2)."""
        result = gibbs_service.free_energy(free_dimer, 2, 1.0)
        assert result.free_energy == pytest.approx(-math.log(math.e ** 2 + 1 + math.e ** -2), abs=1e-12)
        assert result.ground_energy == pytest.approx(-2.0, abs=1e-12)

    @pytest.mark.parametrize("particles,beta", [(3, 0.5), (4, 2.0), (6, 1.0)])
    def test_matches_occupation_enumeration(self, trapped_chain, particles, beta):
        """Without interaction the Gibbs free energy is the occupation sum over levels of T."""
        free = trapped_chain.scaled(0.0)
        spectrum = np.linalg.eigvalsh(free.one_body.matrix)
        expected = gibbs_service.noninteracting_free_energy(spectrum, particles, beta)
        assert gibbs_service.free_energy(free, particles, beta).free_energy == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("beta", [0.1, 1.0, 5.0])
    def test_variational_principle(self, dimer, attractive_ring, beta):
        """E(beta, N) <= E(N)."""
        for model in (dimer, attractive_ring):
            result = gibbs_service.free_energy(model, 4, beta)
            assert result.free_energy <= result.ground_energy + 1e-9

    def test_gibbs_state(self, dimer):
        """The Gibbs state is positive with trace one and reduces consistently."""
        result = gibbs_service.free_energy(dimer, 5, 0.7)
        matrix = result.state.matrix
        assert np.trace(matrix).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(matrix)[0] >= -1e-12
        assert np.trace(result.gamma1).real == pytest.approx(1.0, abs=1e-12)
        assert result.gamma2.shape == (3, 3)

    def test_single_mode_is_scalar(self):
        """d = 1: H_N is a number and E(beta, N) equals it."""
        model = model_service.parse_model({
            "modes": 1, "one_body": [[[0.5, 0.0]]], "two_body": {"kind": "onsite", "U": 2.0},
        })
        assert gibbs_service.free_energy(model, 3, 0.3).free_energy == pytest.approx(1.5 + 3.0, abs=1e-12)

    def test_low_temperature_limit(self, dimer):
        """Large beta reproduces the ground energy."""
        ground = spectra_service.ground_energy(dimer, 4)
        beta = 50.0 / ground.spectral_gap
        assert gibbs_service.free_energy(dimer, 4, beta).free_energy == pytest.approx(ground.energy, abs=1e-6)

    def test_lower_bound_below_free_energy(self, dimer):
        """The kinetic lower bound does not exceed E(beta, N)."""
        result = gibbs_service.free_energy(dimer, 6, 1.0)
        assert result.lower_bound is not None
        assert result.lower_bound <= result.free_energy + 1e-9

    @pytest.mark.parametrize("beta", [0.0, -1.0])
    def test_beta_must_be_positive(self, dimer, beta):
        """beta <= 0 names the field."""
        with pytest.raises(ValidationException) as exc:
            gibbs_service.free_energy(dimer, 2, beta)
        assert exc.value.path == "beta"

    def test_capacity(self, trapped_chain, monkeypatch):
        """Dimensions above the Gibbs cap are refused."""
        monkeypatch.setattr(settings, "GIBBS_DIM_CAP", 10)
        with pytest.raises(CapacityException):
            gibbs_service.free_energy(trapped_chain, 3, 1.0)


@pytest.mark.gibbs
@pytest.mark.unit
class TestNoninteracting:
    """Occupation sums and their large-N tail."""

    def test_single_level(self):
        """d = 1: N kappa_1 exactly."""
        assert gibbs_service.noninteracting_free_energy([0.25], 8, 3.0) == pytest.approx(2.0, abs=1e-12)

    def test_two_level_geometric_sum(self):
        """Spectrum {0, kappa} sums a finite geometric series."""
        beta, kappa, particles = 0.8, 0.6, 7
        q = math.exp(-beta * kappa)
        expected = -math.log((1 - q ** (particles + 1)) / (1 - q)) / beta
        assert gibbs_service.noninteracting_free_energy([0.0, kappa], particles, beta) == pytest.approx(expected)

    def test_geometric_tail(self):
        """kappa = {0, 1}, beta = 1: defect_N = e^-(N+1) / (1 - e^-1)."""
        schedule = list(range(1, 13))
        tail = gibbs_service.condensation_tail([0.0, 1.0], schedule, 1.0)
        assert tail.limit == pytest.approx(1 / (1 - math.exp(-1)), abs=1e-12)
        for particles, defect in zip(schedule, tail.defects):
            assert defect == pytest.approx(math.exp(-(particles + 1)) / (1 - math.exp(-1)), abs=1e-12)
        assert tail.decreasing
        assert tail.ratio_ok

    def test_single_mode_tail_is_exact(self):
        """d = 1 has limit 1 and no defect."""
        tail = gibbs_service.condensation_tail([0.3], [1, 2, 3], 1.0)
        assert tail.limit == 1.0
        assert tail.defects == [0.0, 0.0, 0.0]

    def test_gapped_three_levels(self):
        """A well-separated three-level spectrum has a geometric tail."""
        spectrum = [0.0, 0.5, 2.0]
        tail = gibbs_service.condensation_tail(spectrum, [2, 4, 6, 8], 2.0)
        assert tail.decreasing
        assert tail.ratio_ok

    def test_degenerate_ground_level(self):
        """kappa_2 - kappa_1 below 1e-8 is refused."""
        with pytest.raises(DegeneracyException):
            gibbs_service.condensation_tail([0.0, 1e-10, 1.0], [2, 4], 1.0)


@pytest.mark.gibbs
@pytest.mark.integration
class TestTemperatureSweeps:
    """E(beta, N)/N along N and along beta."""

    def test_repulsive_dimer_gaps_decrease(self, dimer):
        """beta = 2: |E(beta, N)/N - e_H(1)| decreases over N = 2, 4, 8, 16."""
        records = gibbs_service.finite_temperature_sweep(dimer, [2, 4, 8, 16], 2.0, **FAST)
        gaps = [r.gap for r in records]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert all(r.variational for r in records)

    def test_free_dimer_limit(self, free_dimer):
        """U = 0, beta = 1: E(beta, N)/N approaches -t = -1."""
        records = gibbs_service.finite_temperature_sweep(free_dimer, [2, 8, 32], 1.0, **FAST)
        for record in records:
            spectrum = [-1.0, 1.0]
            expected = gibbs_service.noninteracting_free_energy(spectrum, record.particles, 1.0)
            assert record.free_energy == pytest.approx(expected, abs=1e-10)
        assert records[-1].gap < records[0].gap

    def test_large_beta_matches_ground_state_sweep(self, dimer):
        """At beta = 500 the sweep reproduces E(N)/N and the gaps of the zero-temperature sweep."""
        schedule = [2, 4, 8]
        cold = gibbs_service.finite_temperature_sweep(dimer, schedule, 500.0, **FAST)
        ground = spectra_service.mean_field_sweep(dimer, schedule, orders=(1,), **FAST)
        for record, exact in zip(cold, ground.records):
            assert record.particles == exact.particles
            assert record.free_energy_per_particle == pytest.approx(exact.energy_per_particle, abs=1e-9)
            assert record.gap == pytest.approx(exact.gap, abs=1e-8)

    def test_profile_rises_to_ground(self, attractive_dimer):
        """beta -> E(beta, N) is non-decreasing and stays below E(N)."""
        profile = gibbs_service.free_energy_profile(attractive_dimer, 6, [4.0, 0.25, 1.0, 16.0])
        assert profile.betas == [0.25, 1.0, 4.0, 16.0]
        assert profile.non_decreasing
        assert profile.below_ground
