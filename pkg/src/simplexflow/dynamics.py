"""Time integration of the full and reduced gradient flows.

RK4 (default) or explicit Euler stepping, trajectory recording with
potential and mean-volume series, and the closed-form solution of the
n=1 linear consensus flow used as an integrator oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import diagnostics
from .potential import (
    ModelParams,
    as_configuration,
    potential_full,
    potential_reduced,
    rhs_full,
    rhs_reduced,
)
from .simplex_set import SimplexSet, validate


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon, recording stride, and stepping method."""

    dt: float = 1e-3
    steps: int = 20_000
    record_every: int = 100
    method: str = "rk4"
    # Stop once the potential drops below this fraction of its initial
    # value (checked at record points); 0 disables early stopping.
    stop_ratio: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")
        if self.method not in ("rk4", "euler"):
            raise ValueError(f"method must be 'rk4' or 'euler', got {self.method!r}")
        if self.stop_ratio < 0:
            raise ValueError("stop_ratio must be non-negative")


@dataclass
class Trajectory:
    """Recorded snapshots of a run plus per-snapshot diagnostics series."""

    times: list[float] = field(default_factory=list)
    snapshots: list[NDArray[np.float64]] = field(default_factory=list)
    potential_series: list[float] = field(default_factory=list)
    volume_series: list[float] = field(default_factory=list)

    def append(self, t, positions, pot, vol):
        self.times.append(float(t))
        self.snapshots.append(np.array(positions, dtype=np.float64, copy=True))
        self.potential_series.append(float(pot))
        self.volume_series.append(float(vol))


def step(positions, rhs, dt: float, method: str = "rk4") -> NDArray[np.float64]:
    """Advance one time step with RK4 or explicit Euler.

    ``rhs`` maps an (N, d) position matrix to an (N, d) velocity field.
    Raises on non-finite velocities, naming the offending particle.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = as_configuration(positions)
    if method == "euler":
        v = _checked(rhs(x))
        return x + dt * v
    if method != "rk4":
        raise ValueError(f"unknown method {method!r}")
    k1 = _checked(rhs(x))
    k2 = _checked(rhs(x + 0.5 * dt * k1))
    k3 = _checked(rhs(x + 0.5 * dt * k2))
    k4 = _checked(rhs(x + dt * k3))
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(
    initial,
    params: ModelParams,
    sset: SimplexSet | None = None,
    integ: IntegratorConfig = IntegratorConfig(),
    volume_budget: int | None = None,
    seed: int = 0,
) -> Trajectory:
    """Integrate the flow and record snapshots every ``record_every`` steps.

    For reduced mode a validated simplex set is required. The mean-volume
    series always monitors n-simplices over all particles (sampled with
    ``volume_budget`` combinations when the full enumeration is too large).
    """
    x = as_configuration(initial).copy()
    if params.mode == "reduced":
        if sset is None:
            raise ValueError("reduced mode requires a simplex set")
        problems = validate(sset)
        if problems:
            raise ValueError("invalid simplex set: " + "; ".join(problems))
        rhs = lambda p: rhs_reduced(p, sset, params)
        pot = lambda p: potential_reduced(p, sset, params)
    else:
        rhs = lambda p: rhs_full(p, params)
        pot = lambda p: potential_full(p, params)

    monitor = diagnostics.volume_monitor(
        x.shape[0], params.n, budget=volume_budget, seed=seed
    )
    vol = lambda p: diagnostics.mean_simplex_volume(p, params.n, monitor)

    traj = Trajectory()
    p0 = pot(x)
    traj.append(0.0, x, p0, vol(x))
    floor = integ.stop_ratio * p0
    for k in range(1, integ.steps + 1):
        x = step(x, rhs, integ.dt, integ.method)
        if k % integ.record_every == 0 or k == integ.steps:
            p = pot(x)
            traj.append(k * integ.dt, x, p, vol(x))
            if integ.stop_ratio > 0 and p <= floor:
                break
    return traj


def explicit_linear_solution(initial, kappa: float, t: float) -> NDArray[np.float64]:
    """Closed-form state of the n=1 linear consensus flow at time t.

    Every particle relaxes exponentially toward the (conserved) centroid.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    x0 = as_configuration(initial)
    mean = x0.mean(axis=0)
    decay = np.exp(-kappa * t)
    return (1.0 - decay) * mean + decay * x0


def _checked(v: NDArray[np.float64]) -> NDArray[np.float64]:
    bad = ~np.isfinite(v).all(axis=1)
    if bad.any():
        raise FloatingPointError(
            f"non-finite velocity for particle(s) {np.flatnonzero(bad).tolist()}"
        )
    return v
