"""
Spectra service - exact ground states and mean-field convergence diagnostics.
"""
import logging
from typing import Literal, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from bmfl.config import settings
from bmfl.core.exceptions import (
    ConvergenceException,
    InvariantViolationException,
    OrderOutOfRangeException,
    ValidationException,
)
from bmfl.core.workqueue import run_jobs
from bmfl.models.fock import OccupationBasis, PureState
from bmfl.models.operators import ManyBodyOperator, ModelSpec, OneBodyOperator, TwoBodyOperator
from bmfl.schemas.results import (
    CondensateOverlap,
    GroundState,
    LiebYauResult,
    NoBoundStateReport,
    ScaledEnergyTable,
    SweepRecord,
    SweepReport,
    UniformLimitRow,
    UniformLimitTable,
)
from bmfl.services.fock_service import fock_service
from bmfl.services.hartree_service import hartree_service
from bmfl.services.model_service import model_service, pair_potential_matrix, site_distance
from bmfl.services.rdm_service import rdm_service
from bmfl.utils.linalg import canonical_phase, fidelity

logger = logging.getLogger(__name__)

Solver = Literal["auto", "dense", "iterative"]

MONOTONE_TOL = 1e-9
SIGN_TOL = 1e-9
ORBIT_TOL = 1e-8
LIPSCHITZ_SLACK = 1e-10
DEFECT_FLOOR = 1e-10


def _orbit_isometry(basis: OccupationBasis, symmetries: Sequence[tuple[int, ...]]) -> sp.csr_matrix:
    """Columns are normalized orbit sums spanning the symmetric sector."""
    images = []
    for perm in symmetries:
        moved = np.empty_like(basis.states)
        moved[:, list(perm)] = basis.states
        images.append(basis.index_of(moved))
    labels = np.min(np.stack(images), axis=0)
    _, orbit, sizes = np.unique(labels, return_inverse=True, return_counts=True)
    values = 1.0 / np.sqrt(sizes[orbit])
    return sp.csr_matrix((values, (np.arange(basis.dim), orbit)), shape=(basis.dim, sizes.size))


def minimizer_orbit(u: np.ndarray, symmetries: Sequence[tuple[int, ...]]) -> list[np.ndarray]:
    """Images of u under the mode symmetries, distinct up to a global phase."""
    orbit: list[np.ndarray] = []
    for perm in symmetries:
        image = np.empty_like(u)
        image[list(perm)] = u
        norm = np.linalg.norm(image) ** 2
        if all(abs(abs(np.vdot(v, image)) - norm) > ORBIT_TOL for v in orbit):
            orbit.append(canonical_phase(image))
    return orbit


def nested_window_trend(rows: Sequence[UniformLimitRow], schedule: Sequence[int]) -> tuple[list[float], bool]:
    """
    Worst defect over the window 1 <= k <= N for each N of the schedule.

    The trend holds when every step strictly lowers the worst defect, or
    both ends of the step already sit below DEFECT_FLOOR. A single window
    has no trend.
    """
    worst = [max(r.defect for r in rows if r.particles == n) for n in schedule]
    steps = zip(worst, worst[1:])
    decreasing = len(worst) > 1 and all(b < a or max(a, b) <= DEFECT_FLOOR for a, b in steps)
    return worst, decreasing


class SpectraService:
    """Service for many-body spectra."""

    def lowest_pairs(self, operator: ManyBodyOperator, seed: int = 0,
                     solver: Solver = "auto") -> tuple[np.ndarray, np.ndarray]:
        """
        Two lowest eigenpairs (one when the space is one-dimensional).

        Dense below settings.DENSE_EIGEN_THRESHOLD, implicitly restarted
        Lanczos above, with a start vector drawn from `seed`.

        Raises:
            ConvergenceException: If Lanczos exhausts its iteration budget
        """
        dim = operator.matrix.shape[0]
        dense = solver == "dense" or (solver == "auto" and dim < settings.DENSE_EIGEN_THRESHOLD) or dim < 3
        if dense:
            values, vectors = np.linalg.eigh(operator.dense())
            return values[:2], vectors[:, :2]

        rng = np.random.default_rng(seed)
        start = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        try:
            values, vectors = eigsh(
                operator.matrix, k=2, which="SA", v0=start, maxiter=settings.EIGEN_MAX_ITERATIONS, tol=0
            )
        except ArpackNoConvergence as exc:
            raise ConvergenceException(
                f"Lanczos did not converge for dimension {dim} within {settings.EIGEN_MAX_ITERATIONS} iterations"
            ) from exc
        order = np.argsort(values)
        return values[order], vectors[:, order]

    def ground_energy(self, model: ModelSpec, particles: int, solver: Solver = "auto",
                      operator: Optional[ManyBodyOperator] = None) -> GroundState:
        """
        Smallest eigenvalue of H_N with its phase-canonical eigenvector.

        With nontrivial mode symmetries, the ground vector of the symmetric
        sector is reported whenever its energy equals the global one.

        Raises:
            ConvergenceException: If the residual exceeds 1e-9 max(1, |E|)
        """
        operator = operator or model_service.assemble(model, particles)
        values, vectors = self.lowest_pairs(operator, model.seed, solver)
        energy = float(values[0])
        psi = vectors[:, 0]
        gap = float(values[1] - values[0]) if values.size > 1 else None
        tolerance = settings.EIGEN_RESIDUAL_TOL * max(1.0, abs(energy))

        symmetric = False
        symmetries = model_service.symmetries(model)
        if len(symmetries) > 1 and operator.dim > 1:
            isometry = _orbit_isometry(operator.basis, symmetries)
            sector = (isometry.T @ operator.matrix @ isometry).tocsr()
            sector_values, sector_vectors = self.lowest_pairs(
                ManyBodyOperator(operator.basis, sector), model.seed, solver
            )
            if abs(sector_values[0] - energy) <= tolerance:
                psi = isometry @ sector_vectors[:, 0]
                symmetric = True

        psi = canonical_phase(psi / np.linalg.norm(psi))
        image = operator.matrix @ psi
        residual = float(np.linalg.norm(image - np.vdot(psi, image) * psi))
        if residual > tolerance:
            raise ConvergenceException(f"ground state residual {residual:.3e} exceeds {tolerance:.3e}")
        return GroundState(
            particles=particles,
            energy=energy,
            energy_per_particle=energy / particles,
            residual=residual,
            spectral_gap=gap,
            symmetric_sector=symmetric,
            state=PureState(operator.basis, psi),
        )

    def condensate_overlap(self, state, orbit: Sequence[np.ndarray], order: int) -> CondensateOverlap:
        """
        Overlaps of gamma^(k) with |u^{(x)k}><u^{(x)k}| for every orbit member.

        `mixture` is the fidelity with the orbit average, which reduces to
        the pure overlap when the orbit has one member.
        """
        if not 1 <= order <= state.basis.particles:
            raise OrderOutOfRangeException(f"order {order} outside [1, {state.basis.particles}]")
        gamma = rdm_service.reduce(state, order).matrix
        basis = fock_service.build_basis(state.basis.modes, order)
        powers = [fock_service.tensor_power(basis, u / np.linalg.norm(u)) for u in orbit]
        overlaps = [float(np.real(np.vdot(phi, gamma @ phi))) for phi in powers]
        mixture = sum(np.outer(phi, phi.conj()) for phi in powers) / len(powers)
        return CondensateOverlap(
            order=order,
            pure=max(overlaps),
            per_minimizer=overlaps,
            mixture=fidelity(gamma, mixture),
            orbit_size=len(powers),
        )

    def bec_overlap(self, model: ModelSpec, particles: int, order: int, seed: int = 0,
                    **options) -> CondensateOverlap:
        """Condensate overlap of the ground state of H_N with the Hartree minimizer orbit."""
        hartree = hartree_service.minimize(model, 1.0, seed=seed, **options)
        orbit = minimizer_orbit(hartree.minimizer, model_service.symmetries(model))
        ground = self.ground_energy(model, particles)
        return self.condensate_overlap(ground.state, orbit, order)

    def mean_field_sweep(self, model: ModelSpec, schedule: Sequence[int], orders: Sequence[int] = (1, 2),
                         seed: int = 0, **options) -> SweepReport:
        """
        E(N)/N along an increasing schedule with gaps to e_H(1) and condensate overlaps.

        Raises:
            ValidationException: If the schedule is not strictly increasing
        """
        schedule = list(schedule)
        if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ValidationException("schedule must be strictly increasing", path="n_schedule")

        hartree = hartree_service.minimize(model, 1.0, seed=seed, **options)
        symmetries = model_service.symmetries(model)
        orbit = minimizer_orbit(hartree.minimizer, symmetries)
        parity_perm = symmetries[1] if len(symmetries) > 1 else None

        def point(particles: int) -> SweepRecord:
            ground = self.ground_energy(model, particles)
            record = SweepRecord(
                particles=particles,
                energy=ground.energy,
                energy_per_particle=ground.energy_per_particle,
                gap=hartree.energy - ground.energy_per_particle,
                residual=ground.residual,
                spectral_gap=ground.spectral_gap,
            )
            for order in orders:
                if order <= particles:
                    overlap = self.condensate_overlap(ground.state, orbit, order)
                    record.overlaps[order] = overlap.pure
                    record.mixture_overlaps[order] = overlap.mixture
            if parity_perm is not None:
                action = fock_service.permutation_action(ground.state.basis, parity_perm)
                psi = ground.state.amplitudes
                record.parity = float(np.real(np.vdot(psi, action @ psi)))
            logger.info(f"Sweep N={particles}: E/N={record.energy_per_particle:.12f}, gap={record.gap:.3e}")
            return record

        records = [r for _, r in run_jobs({n: (lambda n=n: point(n)) for n in schedule})]
        per_particle = [r.energy_per_particle for r in records]
        gaps = [r.gap for r in records]
        report = SweepReport(
            hartree_energy=hartree.energy,
            records=records,
            monotone=all(b >= a - MONOTONE_TOL for a, b in zip(per_particle, per_particle[1:])),
            gap_nonnegative=all(g >= -MONOTONE_TOL for g in gaps),
            gap_non_increasing=all(b <= a + MONOTONE_TOL for a, b in zip(gaps, gaps[1:])),
        )
        if not (report.monotone and report.gap_nonnegative and report.gap_non_increasing):
            logger.warning(f"Sweep of '{model.name}' violates a monotonicity check")
        return report

    def scaled_energy_per_particle(self, model: ModelSpec, order: int, coupling: float) -> float:
        """
        b_k(lambda) = inf sigma(sum T_i + lambda/(k-1) sum w_ij) / k.

        For k = 1 this is min sigma(T) of the kinetic term as given, which keeps
        (1/N) b_1 comparable with e^0_H(1/N). Under the shifted convention
        min sigma(T) = 0 (`ModelSpec.shifted_kinetic`) it reduces to b_1 = 0.
        """
        if order < 1:
            raise ValidationException(f"order must be positive, got {order}", path="k")
        if order == 1:
            return float(np.linalg.eigvalsh(model.one_body.matrix)[0])
        operator = model_service.scaled_assemble(model, order, coupling)
        return self.ground_energy(model, order, operator=operator).energy / order

    def scaled_energy_scan(self, model: ModelSpec, orders: Sequence[int], points: int = 20) -> ScaledEnergyTable:
        """
        b_k on the grid lambda = i/points for each k.

        b_k is concave in lambda, so b_k(0) >= b_k(lambda) on the grid makes it
        non-increasing; that precondition and the monotonicity are reported
        per k, with one Lipschitz constant C = ||w|| / 2 checked for all k.
        """
        grid = [i / points for i in range(points + 1)]
        jobs = {
            (k, i): (lambda k=k, lam=lam: self.scaled_energy_per_particle(model, k, lam))
            for k in orders for i, lam in enumerate(grid)
        }
        results = dict(run_jobs(jobs))
        values = [[results[(k, i)] for i in range(points + 1)] for k in orders]

        constant = 0.5 * float(np.linalg.norm(model.two_body.matrix, 2))
        step = 1.0 / points
        precondition = [all(row[0] >= v - MONOTONE_TOL for v in row) for row in values]
        monotone = [all(b <= a + MONOTONE_TOL for a, b in zip(row, row[1:])) for row in values]
        lipschitz_ok = all(
            abs(b - a) <= constant * step + LIPSCHITZ_SLACK for row in values for a, b in zip(row, row[1:])
        )
        for k, pre, mono in zip(orders, precondition, monotone):
            if pre and not mono:
                logger.warning(f"b_{k} is not monotone although its precondition holds")
        return ScaledEnergyTable(
            k_values=list(orders),
            grid=grid,
            values=values,
            precondition=precondition,
            monotone=monotone,
            lipschitz_constant=constant,
            lipschitz_ok=lipschitz_ok,
        )

    def uniform_limit_table(self, model: ModelSpec, schedule: Sequence[int], **options) -> UniformLimitTable:
        """
        |(k/N) b_k((k-1)/(N-1)) - e^0_H(k/N)| on the potential-free model, 1 <= k <= N.

        window_suprema[i] is the largest defect over 1 <= k <= N_i. The windows
        are nested along the schedule and `decreasing` asks the worst defect to
        fall strictly from one window to the next.
        """
        free = model.without_potential()
        rows = []
        for particles in schedule:
            if particles < 2:
                raise ValidationException("schedule entries must be at least 2", path="n_schedule")
            for k in range(1, particles + 1):
                coupling = (k - 1) / (particles - 1)
                scaled = (k / particles) * self.scaled_energy_per_particle(free, k, coupling)
                hartree = hartree_service.minimize(free, k / particles, **options).energy
                rows.append(UniformLimitRow(order=k, particles=particles, defect=abs(scaled - hartree)))

        suprema, decreasing = nested_window_trend(rows, schedule)
        if not decreasing:
            logger.warning(f"uniform-limit defect does not shrink along {list(schedule)}: {suprema}")
        return UniformLimitTable(rows=rows, window_suprema=suprema, decreasing=decreasing)

    def no_bound_state_check(self, model: ModelSpec, max_particles: int = 6) -> NoBoundStateReport:
        """
        E^0(N) for N <= max_particles on the potential-free model with K >= 0.

        Raises:
            ValidationException: If the model is not translation-invariant
            InvariantViolationException: If E^0(2) >= 0 but some E^0(N) < 0
        """
        shifted = model.without_potential().shifted_kinetic()
        if not shifted.translation_invariant:
            raise ValidationException("model is not translation-invariant", path="geometry")
        energies = {n: self.ground_energy(shifted, n).energy for n in range(1, max_particles + 1)}
        pair = energies[2]
        premise = pair >= -SIGN_TOL
        sign_holds = (not premise) or all(e >= -SIGN_TOL for e in energies.values())
        ordering = all(energies[n] / n >= pair / 2 - MONOTONE_TOL for n in energies if n >= 2)
        if not sign_holds:
            raise InvariantViolationException(
                f"E0(2) = {pair:.3e} >= 0 but min E0(N) = {min(energies.values()):.3e}"
            )
        return NoBoundStateReport(
            pair_energy=pair, energies=energies, premise=premise, sign_holds=sign_holds, ordering_holds=ordering
        )

    def redistributed_model(self, model: ModelSpec, epsilon: float, reference: int = 0) -> ModelSpec:
        """
        K - eps w_-(x - x_ref) as one-body term and w + 2 eps w_- as pair potential.

        w_- = max(0, -w) on the pair-potential values.
        """
        values = np.asarray(model.pair_values, dtype=float)
        negative = np.maximum(0.0, -values)
        d = model.modes
        well = np.zeros(d)
        for i in range(d):
            r = site_distance(i, reference, d, model.geometry)
            if r < negative.size:
                well[i] = negative[r]
        new_values = tuple(float(v) for v in values + 2.0 * epsilon * negative)
        return ModelSpec(
            modes=d,
            kinetic=OneBodyOperator(model.kinetic.matrix - epsilon * np.diag(well)),
            external_potential=np.zeros(d),
            two_body=TwoBodyOperator(pair_potential_matrix(d, new_values, model.geometry)),
            name=f"{model.name}/eps={epsilon:g}",
            geometry=model.geometry,
            pair_values=new_values,
        )

    def lieb_yau_bound(self, model: ModelSpec, particles: int, epsilon: float, reference: int = 0,
                       **options) -> LiebYauResult:
        """
        Compare E^0(N)/N with E_eps(N-1)/(N-1) of the redistributed model.

        Raises:
            ValidationException: If the model is not a translation-invariant pair
                potential, or eps, N are out of range
        """
        if model.pair_values is None:
            raise ValidationException("needs a pair-potential or on-site interaction", path="two_body.kind")
        base = model.without_potential()
        if not base.translation_invariant:
            raise ValidationException("model is not translation-invariant", path="geometry")
        if not 0.0 < epsilon < 0.5:
            raise ValidationException(f"epsilon {epsilon!r} outside (0, 1/2)", path="epsilon")
        if particles < 3:
            raise ValidationException(f"need N >= 3, got {particles}", path="n")

        lhs = self.ground_energy(base, particles).energy_per_particle
        modified = self.redistributed_model(base, epsilon, reference)
        rhs = self.ground_energy(modified, particles - 1).energy_per_particle
        other = (reference + 1) % model.modes
        other_rhs = self.ground_energy(self.redistributed_model(base, epsilon, other), particles - 1)
        result = LiebYauResult(
            particles=particles,
            epsilon=epsilon,
            lhs=lhs,
            rhs=rhs,
            slack=lhs - rhs,
            reference_spread=abs(rhs - other_rhs.energy_per_particle),
            modified_hartree_energy=hartree_service.minimize(modified, 1.0, **options).energy,
        )
        if result.slack < -SIGN_TOL:
            logger.warning(f"Lieb-Yau slack {result.slack:.3e} is negative at N={particles}, eps={epsilon:g}")
        return result


spectra_service = SpectraService()
