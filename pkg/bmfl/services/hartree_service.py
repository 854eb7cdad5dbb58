"""
Hartree service - Hartree functional, its minimization and binding curves.
"""
import logging
import math
from typing import Callable, Optional

import numpy as np

from bmfl.config import settings
from bmfl.core.exceptions import (
    DimensionMismatchException,
    InvariantViolationException,
    ValidationException,
)
from bmfl.core.workqueue import run_jobs
from bmfl.models.operators import ModelSpec
from bmfl.schemas.results import EnergyCurve, HartreeResult, MixedHartreeResult
from bmfl.services.model_service import model_service
from bmfl.utils.linalg import canonical_phase, hermitize

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
MIN_STEP = 1e-16
ROUNDOFF = 1e-14
TIE_TOL = 1e-12
CERTIFY_TOL = 1e-8
BINDING_TOL = 1e-9
STRICT_BINDING = 1e-6
GRID_CHUNK = 1 << 20


def _armijo_descent(x: np.ndarray, energy: Callable, direction: Callable, retract: Callable,
                    max_iterations: int, tolerance: float) -> tuple[np.ndarray, int, float, bool]:
    """
    Steepest descent along `direction` with Armijo backtracking.

    A step is accepted on sufficient decrease, or when the energy change is
    below round-off and the direction norm shrinks.
    """
    value = energy(x)
    g = direction(x)
    norm = float(np.linalg.norm(g))
    step = 1.0
    for iteration in range(max_iterations):
        if norm <= tolerance:
            return x, iteration, norm, True
        while step >= MIN_STEP:
            trial = retract(x - step * g)
            trial_value = energy(trial)
            if trial_value <= value - ARMIJO * step * norm ** 2:
                break
            if abs(trial_value - value) <= ROUNDOFF * max(1.0, abs(value)):
                trial_norm = float(np.linalg.norm(direction(trial)))
                if trial_norm < norm:
                    break
            step *= 0.5
        else:
            return x, iteration, norm, False
        x, value = trial, trial_value
        g = direction(x)
        norm = float(np.linalg.norm(g))
        step = min(2.0 * step, 1e3)
    return x, max_iterations, norm, norm <= tolerance


class HartreeService:
    """Service for the Hartree functional."""

    def _check(self, model: ModelSpec, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=complex)
        if u.shape != (model.modes,):
            raise DimensionMismatchException(f"vector has length {u.size}, model has {model.modes} modes")
        return u

    def hartree_energy(self, model: ModelSpec, u: np.ndarray) -> float:
        """<u, T u> + 1/2 <u (x) u, w u (x) u>."""
        u = self._check(model, u)
        one_body = np.vdot(u, model.one_body.matrix @ u)
        pair = np.kron(u, u)
        two_body = np.vdot(pair, model.two_body.matrix @ pair)
        return float(np.real(one_body + 0.5 * two_body))

    def mean_field_operator(self, model: ModelSpec, u: np.ndarray) -> np.ndarray:
        """h[u]_ik = sum_jl w[i, j, k, l] conj(u_j) u_l."""
        u = self._check(model, u)
        return np.einsum("ijkl,j,l->ik", model.two_body.as_tensor(), u.conj(), u)

    def hartree_gradient(self, model: ModelSpec, u: np.ndarray) -> np.ndarray:
        """Gradient 2(T u + h[u] u) for the real inner product Re<., .>."""
        u = self._check(model, u)
        return 2.0 * (model.one_body.matrix @ u + self.mean_field_operator(model, u) @ u)

    def _descend_sphere(self, model: ModelSpec, start: np.ndarray, mass: float, max_iterations: int,
                        tolerance: float) -> tuple[np.ndarray, int, float, bool]:
        radius = math.sqrt(mass)

        def retract(v):
            return radius * v / np.linalg.norm(v)

        def tangent(v):
            g = self.hartree_gradient(model, v)
            return g - (np.real(np.vdot(v, g)) / mass) * v

        return _armijo_descent(retract(start), lambda v: self.hartree_energy(model, v), tangent, retract,
                               max_iterations, tolerance)

    def starting_points(self, model: ModelSpec, restarts: int, seed: int) -> list[np.ndarray]:
        """One-body ground eigenvector followed by `restarts` seeded random vectors."""
        _, vectors = np.linalg.eigh(model.one_body.matrix)
        rng = np.random.default_rng(seed)
        starts = [vectors[:, 0].astype(complex)]
        for _ in range(restarts):
            starts.append(rng.standard_normal(model.modes) + 1j * rng.standard_normal(model.modes))
        return starts

    def minimize(self, model: ModelSpec, mass: float = 1.0, restarts: Optional[int] = None,
                 max_iterations: Optional[int] = None, tolerance: Optional[float] = None,
                 seed: int = 0, certify: bool = False) -> HartreeResult:
        """
        Minimize the Hartree functional on the sphere ||u||^2 = mass.

        Args:
            model: Model
            mass: lambda in (0, 1]
            restarts: Random starts besides the one-body ground state
            max_iterations: Iteration budget per start
            tolerance: Certificate on the tangent gradient norm
            seed: Seed of the random starts
            certify: Compare two-mode results against the grid oracle

        Returns:
            Best HartreeResult over all starts; ties go to the lower start index.
            `converged` is False when the best start exhausted its budget.

        Raises:
            ValidationException: If mass is outside (0, 1]
        """
        if not 0.0 < mass <= 1.0:
            raise ValidationException(f"mass {mass!r} outside (0, 1]", path="mass")
        restarts = settings.HARTREE_RESTARTS if restarts is None else restarts
        max_iterations = max_iterations or settings.HARTREE_MAX_ITERATIONS
        tolerance = tolerance or settings.HARTREE_TOLERANCE

        starts = self.starting_points(model, restarts, seed)
        jobs = {
            index: (lambda s=start: self._descend_sphere(model, s, mass, max_iterations, tolerance))
            for index, start in enumerate(starts)
        }
        best = None
        for index, (u, iterations, norm, converged) in run_jobs(jobs):
            value = self.hartree_energy(model, u)
            if best is None or value < best[0] - TIE_TOL:
                best = (value, u, iterations, norm, converged)
            logger.debug(f"Start {index}: energy {value:.12f}, gradient {norm:.2e}")

        value, u, iterations, norm, converged = best
        u = canonical_phase(u)
        if not converged:
            logger.warning(f"Hartree minimization at mass {mass:g} not converged: gradient {norm:.3e}")

        result = HartreeResult(
            energy=self.hartree_energy(model, u),
            minimizer=u,
            mass=mass,
            iterations=iterations,
            gradient_norm=norm,
            restarts=restarts,
            converged=converged,
        )
        if certify and model.modes == 2:
            grid_energy, _ = self.grid_oracle(model, mass)
            result.grid_energy = grid_energy
            result.certified = result.energy <= grid_energy + CERTIFY_TOL
        return result

    def grid_oracle(self, model: ModelSpec, mass: float = 1.0,
                    resolution: Optional[float] = None) -> tuple[float, np.ndarray]:
        """
        Dense search over u = sqrt(mass)(cos t, e^{ip} sin t) for two-mode models.

        Returns:
            (smallest grid energy, its vector)
        """
        if model.modes != 2:
            raise ValidationException("the grid oracle needs a two-mode model", path="modes")
        resolution = resolution or settings.HARTREE_GRID_RESOLUTION
        thetas = np.linspace(0.0, np.pi / 2, int(np.ceil(np.pi / 2 / resolution)) + 1)
        phis = np.linspace(0.0, 2 * np.pi, int(np.ceil(2 * np.pi / resolution)), endpoint=False)
        t_grid, p_grid = np.meshgrid(thetas, phis, indexing="ij")
        t_flat, p_flat = t_grid.ravel(), p_grid.ravel()

        radius = math.sqrt(mass)
        one_body = model.one_body.matrix
        pair = model.two_body.matrix
        best_value, best_vector = np.inf, None
        for lo in range(0, t_flat.size, GRID_CHUNK):
            t, p = t_flat[lo:lo + GRID_CHUNK], p_flat[lo:lo + GRID_CHUNK]
            u = radius * np.stack([np.cos(t), np.exp(1j * p) * np.sin(t)], axis=1)
            pairs = (u[:, :, None] * u[:, None, :]).reshape(-1, 4)
            values = np.real(
                np.einsum("mi,ij,mj->m", u.conj(), one_body, u)
                + 0.5 * np.einsum("mp,pq,mq->m", pairs.conj(), pair, pairs)
            )
            at = int(np.argmin(values))
            if values[at] < best_value:
                best_value, best_vector = float(values[at]), u[at]
        return best_value, best_vector

    def scaled_minimum(self, model: ModelSpec, coupling: float, **options) -> float:
        """lambda * inf_{||u|| = 1} (<u, T u> + (lambda/2) <uu, w uu>)."""
        if coupling == 0.0:
            return 0.0
        return coupling * self.minimize(model.scaled(coupling), 1.0, **options).energy

    def energy_curve(self, model: ModelSpec, points: int = 20, **options) -> EnergyCurve:
        """
        e_H^V and e_H^0 on the grid lambda = i/points with binding margins.

        margin(lambda) = e^V(lambda) + e^0(1 - lambda) - e^V(1); strict
        binding holds when every margin with lambda < 1 exceeds 1e-6.
        """
        if points < 1:
            raise ValidationException("grid needs at least one interval", path="grid")
        grid = [i / points for i in range(points + 1)]
        free_model = model.without_potential()

        def evaluate(target: ModelSpec, mass: float) -> float:
            if mass == 0.0:
                return 0.0
            return self.minimize(target, mass, **options).energy

        jobs = {}
        for i, mass in enumerate(grid):
            jobs[(0, i)] = lambda m=mass: evaluate(model, m)
            jobs[(1, i)] = lambda m=mass: evaluate(free_model, m)
        results = dict(run_jobs(jobs))
        values = [results[(0, i)] for i in range(points + 1)]
        free_values = [results[(1, i)] for i in range(points + 1)]

        full = values[-1]
        margins = [values[i] + free_values[points - i] - full for i in range(points + 1)]
        curve = EnergyCurve(
            grid=grid,
            values=values,
            free_values=free_values,
            margins=margins,
            margins_nonnegative=all(m >= -BINDING_TOL for m in margins),
            strict_binding=all(m > STRICT_BINDING for m in margins[:-1]),
            free_nonpositive=all(v <= BINDING_TOL for v in free_values),
            kinetic_condition=model_service.kinetic_condition(model),
        )
        if not curve.margins_nonnegative:
            logger.warning(f"Binding margins of '{model.name}' go negative: min {min(margins):.3e}")
        return curve

    def mixed_energy(self, model: ModelSpec, gamma: np.ndarray) -> float:
        """Tr(T g) + 1/2 sum w[i, j, k, l] g[k, i] g[l, j]."""
        one_body = np.trace(model.one_body.matrix @ gamma)
        two_body = np.einsum("ijkl,ki,lj->", model.two_body.as_tensor(), gamma, gamma)
        return float(np.real(one_body + 0.5 * two_body))

    def mixed_gradient(self, model: ModelSpec, factor: np.ndarray) -> np.ndarray:
        """Gradient (2/s)(G - Tr(G g)) B of E(B B^H / s), G = T + h(g), s = ||B||_F^2."""
        scale = float(np.real(np.vdot(factor, factor)))
        gamma = factor @ factor.conj().T / scale
        field = model.one_body.matrix + np.einsum("ijkl,lj->ik", model.two_body.as_tensor(), gamma)
        level = np.real(np.trace(field @ gamma))
        return (2.0 / scale) * (field - level * np.eye(model.modes)) @ factor

    def minimize_mixed(self, model: ModelSpec, restarts: Optional[int] = None,
                       max_iterations: Optional[int] = None, tolerance: Optional[float] = None,
                       seed: int = 0) -> MixedHartreeResult:
        """
        Minimize the mixed-state functional over trace-one density matrices.

        The rank-one start at the pure minimizer is always included, so the
        result never exceeds e_H(1).

        Raises:
            InvariantViolationException: If the result exceeds e_H(1) + 1e-8
        """
        restarts = settings.HARTREE_RESTARTS if restarts is None else restarts
        max_iterations = max_iterations or settings.HARTREE_MAX_ITERATIONS
        tolerance = tolerance or settings.HARTREE_TOLERANCE
        pure = self.minimize(model, 1.0, restarts=restarts, max_iterations=max_iterations,
                             tolerance=tolerance, seed=seed)

        d = model.modes
        rank_one = np.zeros((d, d), dtype=complex)
        rank_one[:, 0] = pure.minimizer
        rng = np.random.default_rng(seed)
        starts = [rank_one] + [
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(restarts)
        ]

        def density(b):
            return b @ b.conj().T / np.real(np.vdot(b, b))

        def run(start):
            return _armijo_descent(
                start / np.linalg.norm(start),
                lambda b: self.mixed_energy(model, density(b)),
                lambda b: self.mixed_gradient(model, b),
                lambda b: b / np.linalg.norm(b),
                max_iterations,
                tolerance,
            )

        jobs = {index: (lambda s=start: run(s)) for index, start in enumerate(starts)}
        best = None
        for _, (factor, iterations, norm, converged) in run_jobs(jobs):
            value = self.mixed_energy(model, density(factor))
            if best is None or value < best[0] - TIE_TOL:
                best = (value, factor, iterations, norm, converged)

        value, factor, iterations, norm, converged = best
        gamma = hermitize(density(factor))
        if not converged:
            logger.warning(f"Mixed Hartree minimization not converged: gradient {norm:.3e}")
        if value > pure.energy + CERTIFY_TOL:
            raise InvariantViolationException(
                f"mixed minimum {value!r} exceeds the pure minimum {pure.energy!r}"
            )
        return MixedHartreeResult(
            energy=value,
            density=gamma,
            gradient_norm=norm,
            iterations=iterations,
            converged=converged,
            pure_energy=pure.energy,
            rank=int(np.sum(np.linalg.eigvalsh(gamma) > 1e-8)),
        )


hartree_service = HartreeService()
