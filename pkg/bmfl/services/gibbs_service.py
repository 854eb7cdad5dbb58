"""
Gibbs service - canonical free energies and Gibbs states at positive temperature.
"""
import logging
from typing import Sequence

import numpy as np
from scipy.special import logsumexp, softmax

from bmfl.config import settings
from bmfl.core.exceptions import DegeneracyException, ValidationException
from bmfl.core.workqueue import run_jobs
from bmfl.models.fock import MixedState
from bmfl.models.operators import ModelSpec
from bmfl.schemas.results import CondensationTail, FreeEnergyProfile, GibbsResult, GibbsSweepRecord
from bmfl.services.fock_service import fock_service
from bmfl.services.hartree_service import hartree_service
from bmfl.services.model_service import model_service
from bmfl.services.rdm_service import rdm_service

logger = logging.getLogger(__name__)

VARIATIONAL_TOL = 1e-9
GAP_MARGIN = 1e-8
NOISE_FLOOR = 1e-12
RATIO_SLACK = 1e-6


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise ValidationException(f"inverse temperature must be positive, got {beta!r}", path="beta")


class GibbsService:
    """Service for canonical ensembles."""

    def free_energy(self, model: ModelSpec, particles: int, beta: float) -> GibbsResult:
        """
        E(beta, N) = -(1/beta) log Tr exp(-beta H_N) with its Gibbs state.

        Uses the full spectrum, so the symmetric space must fit within
        settings.GIBBS_DIM_CAP. When beta_- < 1 the result also carries the
        lower bound N(min sigma(T) - 1) - (N/beta) log Tr_h exp(-beta(1 - beta_-)T').

        Args:
            model: Model to diagonalize
            particles: N >= 1
            beta: Inverse temperature, positive

        Returns:
            GibbsResult with the state and its first two reduced matrices

        Raises:
            ValidationException: If beta <= 0
            CapacityException: If the dimension exceeds the Gibbs cap
        """
        _check_beta(beta)
        fock_service.build_basis(model.modes, particles, cap=settings.GIBBS_DIM_CAP)
        operator = model_service.assemble(model, particles)
        values, vectors = np.linalg.eigh(operator.dense())

        ground = float(values[0])
        free = ground - float(logsumexp(-beta * (values - ground))) / beta
        weights = softmax(-beta * (values - ground))
        state = MixedState.from_ensemble(operator.basis, weights, vectors)

        bounds = model_service.interaction_bounds(model)
        lower = None
        if bounds.beta_minus < 1.0:
            shifted = np.linalg.eigvalsh(model.one_body.matrix) - bounds.kinetic_minimum + 1.0
            log_trace = float(logsumexp(-beta * (1.0 - bounds.beta_minus) * shifted))
            lower = particles * (bounds.kinetic_minimum - 1.0) - particles * log_trace / beta

        logger.info(f"Gibbs N={particles}, beta={beta:g}: F={free:.12f}, E={ground:.12f}")
        return GibbsResult(
            beta=beta,
            particles=particles,
            free_energy=free,
            ground_energy=ground,
            lower_bound=lower,
            state=state,
            gamma1=rdm_service.reduce(state, 1).matrix,
            gamma2=rdm_service.reduce(state, 2).matrix if particles >= 2 else None,
        )

    def noninteracting_free_energy(self, spectrum: Sequence[float], particles: int, beta: float) -> float:
        """-(1/beta) log sum_n exp(-beta sum_j n_j kappa_j) over occupations with sum n_j = N."""
        _check_beta(beta)
        kappa = np.asarray(spectrum, dtype=float)
        basis = fock_service.build_basis(kappa.size, particles)
        return -float(logsumexp(-beta * (basis.states @ kappa))) / beta

    def condensation_tail(self, spectrum: Sequence[float], schedule: Sequence[int],
                          beta: float) -> CondensationTail:
        """
        |exp(beta N kappa_1) Z_N - prod_{j>=2} (1 - exp(-beta(kappa_j - kappa_1)))^-1| along N.

        The defects must decrease, and the per-particle ratio of the last
        pair above the noise floor must not exceed exp(-beta(kappa_2 - kappa_1)).

        Raises:
            DegeneracyException: If kappa_2 - kappa_1 < 1e-8
        """
        _check_beta(beta)
        kappa = np.sort(np.asarray(spectrum, dtype=float))
        gaps = kappa[1:] - kappa[0]
        if gaps.size and gaps[0] < GAP_MARGIN:
            raise DegeneracyException(f"lowest level is degenerate: kappa_2 - kappa_1 = {gaps[0]:.3e}")

        limit = float(np.prod(1.0 / -np.expm1(-beta * gaps)))
        defects = []
        for particles in schedule:
            basis = fock_service.build_basis(kappa.size, particles)
            scaled = float(np.exp(logsumexp(-beta * (basis.states @ (kappa - kappa[0])))))
            defects.append(abs(scaled - limit))

        ratio_bound = float(np.exp(-beta * gaps[0])) if gaps.size else 0.0
        decreasing = all(b < a or a <= NOISE_FLOOR for a, b in zip(defects, defects[1:]))
        ratio_ok = True
        above = [(n, d) for n, d in zip(schedule, defects) if d > NOISE_FLOOR]
        if len(above) >= 2:
            (n0, d0), (n1, d1) = above[-2], above[-1]
            ratio_ok = (d1 / d0) ** (1.0 / (n1 - n0)) <= ratio_bound + RATIO_SLACK
        if not (decreasing and ratio_ok):
            logger.warning(f"Condensation tail is not geometric: defects {defects}")
        return CondensationTail(
            schedule=list(schedule),
            defects=defects,
            limit=limit,
            ratio_bound=ratio_bound,
            decreasing=decreasing,
            ratio_ok=ratio_ok,
        )

    def finite_temperature_sweep(self, model: ModelSpec, schedule: Sequence[int], beta: float,
                                 **options) -> list[GibbsSweepRecord]:
        """E(beta, N)/N along the schedule with its gap to e_H(1)."""
        _check_beta(beta)
        hartree = hartree_service.minimize(model, 1.0, **options).energy

        def point(particles: int) -> GibbsSweepRecord:
            result = self.free_energy(model, particles, beta)
            per_particle = result.free_energy / particles
            return GibbsSweepRecord(
                particles=particles,
                beta=beta,
                free_energy=result.free_energy,
                free_energy_per_particle=per_particle,
                ground_energy=result.ground_energy,
                gap=abs(per_particle - hartree),
                variational=result.free_energy <= result.ground_energy + VARIATIONAL_TOL,
            )

        records = [r for _, r in run_jobs({n: (lambda n=n: point(n)) for n in schedule})]
        gaps = [r.gap for r in records]
        if any(b > a for a, b in zip(gaps, gaps[1:])):
            logger.warning(f"Finite-temperature gaps are not decreasing at beta={beta:g}: {gaps}")
        return records

    def free_energy_profile(self, model: ModelSpec, particles: int, betas: Sequence[float]) -> FreeEnergyProfile:
        """beta -> E(beta, N) on an increasing grid, which must rise towards E(N)."""
        betas = sorted(betas)
        results = [self.free_energy(model, particles, beta) for beta in betas]
        free = [r.free_energy for r in results]
        ground = results[0].ground_energy
        return FreeEnergyProfile(
            betas=betas,
            free_energies=free,
            ground_energy=ground,
            non_decreasing=all(b >= a - VARIATIONAL_TOL for a, b in zip(free, free[1:])),
            below_ground=all(f <= ground + VARIATIONAL_TOL for f in free),
        )


gibbs_service = GibbsService()
