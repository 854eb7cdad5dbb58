"""
Result record schemas.

Records hold plain numbers and lists so that `model_dump()` is directly
writable; array payloads (states, minimizers) are excluded from dumps.
"""
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ResultRecord(BaseModel):
    """Base for records carrying numpy payloads."""

    model_config = ConfigDict(arbitrary_types_allowed=True)


class GroundState(ResultRecord):
    particles: int
    energy: float
    energy_per_particle: float
    residual: float
    spectral_gap: Optional[float] = None
    symmetric_sector: bool = False
    state: Any = Field(None, exclude=True)


class CondensateOverlap(ResultRecord):
    """Overlaps of gamma^(k) with condensates of the Hartree minimizer orbit."""

    order: int
    pure: float = Field(..., description="Largest overlap with a single condensate")
    per_minimizer: list[float]
    mixture: float = Field(..., description="Fidelity with the symmetrized orbit mixture")
    orbit_size: int


class SweepRecord(ResultRecord):
    particles: int
    energy: float
    energy_per_particle: float
    gap: float
    overlaps: dict[int, float] = Field(default_factory=dict)
    mixture_overlaps: dict[int, float] = Field(default_factory=dict)
    residual: float
    spectral_gap: Optional[float] = None
    parity: Optional[float] = None


class SweepReport(ResultRecord):
    hartree_energy: float
    records: list[SweepRecord]
    monotone: bool
    gap_nonnegative: bool
    gap_non_increasing: bool


class HartreeResult(ResultRecord):
    energy: float
    minimizer: np.ndarray = Field(..., exclude=True)
    mass: float
    iterations: int
    gradient_norm: float
    restarts: int
    converged: bool = True
    certified: Optional[bool] = None
    grid_energy: Optional[float] = None

    @property
    def minimizer_pairs(self) -> list[list[float]]:
        return [[float(z.real), float(z.imag)] for z in self.minimizer]


class EnergyCurve(ResultRecord):
    grid: list[float]
    values: list[float] = Field(..., description="e_H^V on the grid")
    free_values: list[float] = Field(..., description="e_H^0 on the grid")
    margins: list[float]
    margins_nonnegative: bool
    strict_binding: bool
    free_nonpositive: bool
    kinetic_condition: bool = Field(..., description="min sigma(K) <= 0")


class MixedHartreeResult(ResultRecord):
    energy: float
    density: np.ndarray = Field(..., exclude=True)
    gradient_norm: float
    iterations: int
    converged: bool
    pure_energy: float
    rank: int


class GibbsResult(ResultRecord):
    beta: float
    particles: int
    free_energy: float
    ground_energy: float
    lower_bound: Optional[float] = None
    state: Any = Field(None, exclude=True)
    gamma1: Any = Field(None, exclude=True)
    gamma2: Any = Field(None, exclude=True)


class GibbsSweepRecord(ResultRecord):
    particles: int
    beta: float
    free_energy: float
    free_energy_per_particle: float
    ground_energy: float
    gap: float
    variational: bool


class CondensationTail(ResultRecord):
    schedule: list[int]
    defects: list[float]
    limit: float
    ratio_bound: float
    decreasing: bool
    ratio_ok: bool


class FreeEnergyProfile(ResultRecord):
    betas: list[float]
    free_energies: list[float]
    ground_energy: float
    non_decreasing: bool
    below_ground: bool


class ScaledEnergyTable(ResultRecord):
    k_values: list[int]
    grid: list[float]
    values: list[list[float]]
    precondition: list[bool]
    monotone: list[bool]
    lipschitz_constant: float
    lipschitz_ok: bool


class UniformLimitRow(ResultRecord):
    order: int
    particles: int
    defect: float


class UniformLimitTable(ResultRecord):
    rows: list[UniformLimitRow]
    window_suprema: list[float]
    decreasing: bool


class NoBoundStateReport(ResultRecord):
    pair_energy: float
    energies: dict[int, float]
    premise: bool
    sign_holds: bool
    ordering_holds: bool


class LiebYauResult(ResultRecord):
    particles: int
    epsilon: float
    lhs: float
    rhs: float
    slack: float
    reference_spread: float
    modified_hartree_energy: float


class InteractionBounds(ResultRecord):
    beta_minus: float
    beta_plus: float
    kinetic_minimum: float


class LocalizationProfile(ResultRecord):
    particles: int
    traces: list[float]
    total_mass: float
    duality_defect: float
    statistic: float


class StrongConvergenceEntry(ResultRecord):
    particles: int
    reference_trace: float
    profile: list[float]
    localized_mass: float


class StrongConvergenceReport(ResultRecord):
    entries: list[StrongConvergenceEntry]
    limit_trace: float
    verdict: str


class IdentityCheck(ResultRecord):
    name: str
    value: float
    tolerance: float
    passed: bool
