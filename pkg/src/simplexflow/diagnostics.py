"""Theorem-verification monitors for simulated trajectories.

Checks the flow's conserved and monotone quantities (centroid, pairwise
distances, radii about the initial centroid), tracks the mean simplex
volume, and classifies equilibria by the zero-potential / low-affine-rank
equivalence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import geometry
from .potential import (
    ModelParams,
    _combination_indices,
    as_configuration,
    batched_volume_squared,
    config_scale,
    potential_full,
)
from .simplex_set import SimplexSet

# Monotonicity slack per integration step, relative to the configuration
# scale: RK4 is not exactly monotone for gradient flows, and this covers
# its truncation error at the default step size.
SLACK_PER_STEP = 1e-12

# Above this many combinations the volume monitor switches to a seeded
# random sample of distinct simplices.
DEFAULT_VOLUME_BUDGET = 100_000


@dataclass
class DiagnosticsReport:
    """Aggregated conservation/monotonicity findings for one trajectory."""

    com_drift: float = 0.0
    distance_violations: int = 0
    distance_violation_worst: float = 0.0
    radius_violations: int = 0
    radius_violation_worst: float = 0.0
    mean_volume_series: list[float] = field(default_factory=list)
    terminal_rank: int = 0
    terminal_potential: float = 0.0

    def to_dict(self) -> dict:
        return {
            "com_drift": self.com_drift,
            "distance_violations": self.distance_violations,
            "distance_violation_worst": self.distance_violation_worst,
            "radius_violations": self.radius_violations,
            "radius_violation_worst": self.radius_violation_worst,
            "mean_volume_series": list(self.mean_volume_series),
            "terminal_rank": self.terminal_rank,
            "terminal_potential": self.terminal_potential,
        }


def center_of_mass(positions) -> NDArray[np.float64]:
    """Arithmetic mean of the particle positions."""
    return as_configuration(positions).mean(axis=0)


def volume_monitor(
    N: int,
    n: int,
    budget: int | None = None,
    seed: int = 0,
) -> NDArray[np.int64]:
    """Index array of (n+1)-subsets to monitor for the mean-volume series.

    Enumerates all combinations when affordable; otherwise draws a seeded
    uniform sample of distinct combinations of the requested budget.
    """
    if N < n + 1:
        return np.zeros((0, n + 1), dtype=np.int64)
    budget = DEFAULT_VOLUME_BUDGET if budget is None else budget
    total = 1.0
    for j in range(n + 1):
        total *= (N - j) / (j + 1)
    if total <= budget:
        return _combination_indices(N, n + 1)
    rng = np.random.default_rng(seed)
    seen: set[tuple[int, ...]] = set()
    while len(seen) < budget:
        draw = rng.choice(N, size=n + 1, replace=False)
        seen.add(tuple(sorted(int(v) for v in draw)))
    return np.array(sorted(seen), dtype=np.int64)


def mean_simplex_volume(positions, n: int, monitor) -> float:
    """Mean n-volume over monitored simplices.

    ``monitor`` may be a SimplexSet, an (M, n+1) index array, or an integer
    sample budget.
    """
    pos = as_configuration(positions)
    if isinstance(monitor, SimplexSet):
        combos = np.array(monitor.simplices, dtype=np.int64)
    elif isinstance(monitor, (int, np.integer)):
        combos = volume_monitor(pos.shape[0], n, budget=int(monitor))
    else:
        combos = np.asarray(monitor, dtype=np.int64)
    if combos.shape[0] == 0:
        raise ValueError("volume monitor is empty")
    if combos.shape[1] != n + 1:
        raise ValueError(f"monitor arity {combos.shape[1]} does not match n={n}")
    vols2 = batched_volume_squared(pos[combos])
    return float(np.sqrt(vols2).mean())


def check_trajectory(traj, params: ModelParams, dt: float | None = None) -> DiagnosticsReport:
    """Populate a report from a recorded trajectory.

    Monotonicity slack scales with the number of integration steps between
    snapshots (``(t_{k+1} - t_k) / dt``); with no ``dt`` each snapshot gap
    counts as one step. Violations are recorded for reduced-model runs too,
    but only the full model carries the monotonicity guarantees.
    """
    if not traj.snapshots:
        raise ValueError("empty trajectory")
    report = DiagnosticsReport()
    first = traj.snapshots[0]
    com0 = first.mean(axis=0)
    scale = _max_pairwise_distance(first)

    for snap in traj.snapshots:
        report.com_drift = max(
            report.com_drift, float(np.linalg.norm(snap.mean(axis=0) - com0))
        )

    prev_sq = _pairwise_squared(traj.snapshots[0])
    prev_rad = np.linalg.norm(traj.snapshots[0] - com0, axis=1)
    for k in range(1, len(traj.snapshots)):
        gap = traj.times[k] - traj.times[k - 1]
        steps = max(round(gap / dt), 1) if dt else 1
        sq_slack = SLACK_PER_STEP * scale**2 * steps
        rad_slack = SLACK_PER_STEP * scale * steps
        cur_sq = _pairwise_squared(traj.snapshots[k])
        cur_rad = np.linalg.norm(traj.snapshots[k] - com0, axis=1)
        excess = np.triu(cur_sq - prev_sq, k=1)
        bad = excess > sq_slack
        if bad.any():
            report.distance_violations += int(bad.sum())
            report.distance_violation_worst = max(
                report.distance_violation_worst, float(excess[bad].max())
            )
        rad_excess = cur_rad - prev_rad
        rbad = rad_excess > rad_slack
        if rbad.any():
            report.radius_violations += int(rbad.sum())
            report.radius_violation_worst = max(
                report.radius_violation_worst, float(rad_excess[rbad].max())
            )
        prev_sq, prev_rad = cur_sq, cur_rad

    report.mean_volume_series = list(traj.volume_series)
    report.terminal_rank = geometry.affine_rank(traj.snapshots[-1])
    report.terminal_potential = float(traj.potential_series[-1])
    return report


def is_equilibrium(positions, params: ModelParams, tol: float = 1e-8) -> bool:
    """Whether a configuration sits in the order-n equilibrium set.

    Equilibria are exactly the configurations inside some (n-1)-dimensional
    affine subspace; both the zero-potential and the low-rank criteria are
    evaluated and a disagreement (tolerance mismatch) raises a warning.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pos = as_configuration(positions)
    scale = config_scale(pos)
    full = ModelParams(n=params.n, kappa=params.kappa, mode="full")
    by_potential = potential_full(pos, full) <= tol * max(scale, 1e-300) ** (2 * params.n)
    by_rank = geometry.affine_rank(pos) <= params.n - 1
    if by_potential != by_rank:
        warnings.warn(
            "equilibrium criteria disagree (potential "
            f"{by_potential} vs affine rank {by_rank}); tolerances may be mismatched",
            stacklevel=2,
        )
    return by_potential and by_rank


def _pairwise_squared(positions: NDArray[np.float64]) -> NDArray[np.float64]:
    diff = positions[:, None, :] - positions[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _max_pairwise_distance(positions: NDArray[np.float64]) -> float:
    return float(np.sqrt(_pairwise_squared(positions).max()))
