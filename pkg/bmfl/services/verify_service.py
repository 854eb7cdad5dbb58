"""
Verify service - the identity suite run by the `verify` subcommand.
"""
import logging

import numpy as np

from bmfl.core.exceptions import InvariantViolationException
from bmfl.models.fock import MixedState, OccupationBasis
from bmfl.models.localization import LocalizingOperator
from bmfl.models.operators import ModelSpec
from bmfl.schemas.results import IdentityCheck
from bmfl.services.fock_service import fock_service
from bmfl.services.hartree_service import hartree_service
from bmfl.services.localize_service import localize_service
from bmfl.services.model_service import model_service
from bmfl.services.rdm_service import rdm_service

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-9
ENERGY_TOL = 1e-10
GRADIENT_TOL = 1e-6
FD_STEP = 1e-6
GRADIENT_SAMPLES = 10


def random_mixed_state(basis: OccupationBasis, rng: np.random.Generator, rank: int = 3) -> MixedState:
    """Mixture of `rank` orthonormal random vectors with Dirichlet weights."""
    rank = min(rank, basis.dim)
    raw = rng.standard_normal((basis.dim, rank)) + 1j * rng.standard_normal((basis.dim, rank))
    vectors, _ = np.linalg.qr(raw)
    return MixedState.from_ensemble(basis, rng.dirichlet(np.ones(rank)), vectors)


def random_localizer(modes: int, rng: np.random.Generator) -> LocalizingOperator:
    """V diag(x) V* with Haar-like V and x uniform in [0, 1]."""
    raw = rng.standard_normal((modes, modes)) + 1j * rng.standard_normal((modes, modes))
    unitary, _ = np.linalg.qr(raw)
    return LocalizingOperator((unitary * rng.uniform(0.0, 1.0, modes)) @ unitary.conj().T)


class VerifyService:
    """Service running exact identities on random states of a model."""

    def _check(self, name: str, value: float, tolerance: float) -> IdentityCheck:
        check = IdentityCheck(name=name, value=value, tolerance=tolerance, passed=bool(value <= tolerance))
        log = logger.info if check.passed else logger.warning
        log(f"{name}: {value:.3e} (tolerance {tolerance:.0e}) {'PASS' if check.passed else 'FAIL'}")
        return check

    def gradient_error(self, model: ModelSpec, rng: np.random.Generator) -> float:
        """Largest relative gap between Re<grad, v> and central differences of e_H."""
        worst = 0.0
        for _ in range(GRADIENT_SAMPLES):
            u = rng.standard_normal(model.modes) + 1j * rng.standard_normal(model.modes)
            v = rng.standard_normal(model.modes) + 1j * rng.standard_normal(model.modes)
            analytic = float(np.real(np.vdot(hartree_service.hartree_gradient(model, u), v)))
            numeric = (hartree_service.hartree_energy(model, u + FD_STEP * v)
                       - hartree_service.hartree_energy(model, u - FD_STEP * v)) / (2 * FD_STEP)
            worst = max(worst, abs(analytic - numeric) / max(1.0, abs(analytic)))
        return worst

    def run_identity_suite(self, model: ModelSpec, particles: int, seed: int = 0) -> list[IdentityCheck]:
        """
        Run every identity on one random mixed state of the model's N-particle space.

        Checks marginal consistency, localization duality and mass, the
        reconstruction of A-sandwiched reduced matrices, the binomial ratio
        bound and its moment form, the Hartree gradient, energy equivalence and
        the kinetic sandwich.
        """
        rng = np.random.default_rng(seed)
        basis = fock_service.build_basis(model.modes, particles)
        state = random_mixed_state(basis, rng)
        localizer = random_localizer(model.modes, rng)
        checks = []

        consistency = max(
            (rdm_service.consistency_defect(state, k, particles - k) for k in range(particles)), default=0.0
        )
        checks.append(self._check("marginal_consistency", consistency, IDENTITY_TOL))

        traces = localize_service.localized_traces(state, localizer)
        checks.append(self._check("localized_mass", abs(float(traces.sum()) - 1.0), IDENTITY_TOL))
        checks.append(self._check(
            "localization_duality", localize_service.duality_defect(state, localizer), IDENTITY_TOL
        ))
        reconstruction = max(
            localize_service.reconstruction_defect(state, localizer, n) for n in range(1, min(particles, 3) + 1)
        )
        checks.append(self._check("localization_reconstruction", reconstruction, IDENTITY_TOL))

        excess = 0.0
        try:
            for n in range(1, particles + 1):
                worst, bound = localize_service.binomial_ratio_bound(particles, n)
                excess = max(excess, worst - bound)
        except InvariantViolationException as exc:
            logger.warning(exc.message)
            excess = float("inf")
        checks.append(self._check("binomial_ratio_bound", excess, 0.0))

        moment_excess = 0.0
        for n in range(1, min(particles, 3) + 1):
            defect, bound = localize_service.moment_bound(state, localizer, n)
            moment_excess = max(moment_excess, defect - bound)
        checks.append(self._check("moment_bound", moment_excess, IDENTITY_TOL))

        checks.append(self._check("hartree_gradient", self.gradient_error(model, rng), GRADIENT_TOL))

        direct, alternative = rdm_service.energy_components(model, state)
        operator = model_service.assemble(model, particles)
        exact = sum(
            w * operator.expectation(v) for w, v in zip(state.weights, state.vectors.T)
        ) / particles
        scale = max(1.0, abs(direct))
        mismatch = max(abs(direct - alternative), abs(direct - exact)) / scale
        checks.append(self._check("energy_equivalence", mismatch, ENERGY_TOL))

        sandwich = max(0.0, model_service.sandwich_defect(model, particles, state.vectors))
        checks.append(self._check("kinetic_sandwich", sandwich, IDENTITY_TOL * max(1, particles)))
        return checks


verify_service = VerifyService()
