"""Initial-data generators for simulation runs.

The figure-replication runs start from points perturbed off an
(n-1)-dimensional coordinate subspace; a uniform-ball generator and
re-ingestion of a stored trajectory's final snapshot are also supported.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from . import io


def perturbed_affine(
    N: int,
    d: int,
    n: int,
    seed: int,
    sigma: float = 0.1,
    window: float = 10.0,
) -> NDArray[np.float64]:
    """Points near an (n-1)-dimensional coordinate subspace.

    The first n-1 coordinates are uniform on [-window/2, window/2], the
    rest start at zero; isotropic Gaussian noise of scale ``sigma`` is then
    added to all d coordinates.
    """
    if n < 1:
        raise ValueError(f"simplex order must be >= 1, got {n}")
    if n - 1 > d:
        raise ValueError(f"subspace dimension n-1={n - 1} exceeds ambient d={d}")
    rng = np.random.default_rng(seed)
    pos = np.zeros((N, d))
    k = min(n - 1, d)
    if k > 0:
        pos[:, :k] = rng.uniform(-window / 2.0, window / 2.0, size=(N, k))
    if sigma > 0:
        pos += sigma * rng.standard_normal((N, d))
    return pos


def uniform_ball(N: int, d: int, seed: int, radius: float = 1.0) -> NDArray[np.float64]:
    """Uniform sample in the ball of the given radius about the origin."""
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((N, d))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=N) ** (1.0 / d)
    return directions * radii[:, None]


def from_trajectory_file(path) -> NDArray[np.float64]:
    """Final snapshot of a stored trajectory, as a new initial condition."""
    _, snapshots = io.load_trajectory(path)
    return snapshots[-1]


def generate(spec: dict, N: int, d: int, n: int, seed: int) -> NDArray[np.float64]:
    """Dispatch on an initial-data spec dictionary (see the CLI run spec)."""
    kind = spec.get("kind")
    if kind == "perturbed-affine":
        return perturbed_affine(
            N, d, n, seed,
            sigma=float(spec.get("sigma", 0.1)),
            window=float(spec.get("window", 10.0)),
        )
    if kind == "uniform-ball":
        return uniform_ball(N, d, seed, radius=float(spec.get("radius", 1.0)))
    if kind == "file":
        return from_trajectory_file(spec["path"])
    raise ValueError(f"unknown initial-data generator: {kind!r}")
