"""The n-simplex consensus potential, its gradient field, and verifiers.

The potential sums squared n-simplex volumes over particle tuples; the
flow is the (negative) gradient of that sum. Per-particle gradients follow
the projection formula

    grad_i Vol_n(x_i, base)^2 = (2/n^2) * Vol_{n-1}(base)^2 * (x_i - H_i),

with H_i the orthogonal projection of x_i onto the affine hull of the base
points. Two evaluation paths are provided:

* :func:`rhs_full_direct` / :func:`grad_vol_squared` evaluate the defining
  sums term by term (one projection per (particle, base) pair). This is the
  O(N^(n+1)) algorithm whose cost the benchmark measures.
* :func:`rhs_full` aggregates the same sum exactly: terms where the moving
  particle belongs to the base vanish identically, so the per-particle sum
  collapses to an affine map  row_i = -coef * (D x_i - A)  with D and A
  accumulated once over all C(N, n) bases. Algebraically identical output
  at O(N^n) cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from . import geometry
from .simplex_set import SimplexSet

# Relative threshold under which a base simplex volume is treated as zero:
# the Vol_{n-1}^2 prefactor then bounds the gradient term below roundoff,
# and the projection onto a rank-deficient hull is skipped.
CLAMP_REL = 1e-14


@dataclass(frozen=True)
class ModelParams:
    """Simplex order, coupling strength, and interaction mode."""

    n: int
    kappa: float = 1.0
    mode: str = "full"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"simplex order must be >= 1, got {self.n}")
        if self.kappa < 0:
            raise ValueError(f"coupling strength must be >= 0, got {self.kappa}")
        if self.mode not in ("full", "reduced"):
            raise ValueError(f"mode must be 'full' or 'reduced', got {self.mode!r}")


def as_configuration(positions) -> NDArray[np.float64]:
    """Validate and return an (N, d) float64 position matrix."""
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2 or pos.shape[0] < 1 or pos.shape[1] < 1:
        raise ValueError(f"positions must be (N, d) with N, d >= 1, got shape {pos.shape}")
    if not np.all(np.isfinite(pos)):
        raise ValueError("positions contain non-finite entries")
    return pos


@lru_cache(maxsize=64)
def _combination_indices(N: int, k: int) -> NDArray[np.int64]:
    return np.array(list(combinations(range(N), k)), dtype=np.int64)


def batched_volume_squared(pts: NDArray[np.float64]) -> NDArray[np.float64]:
    """Squared k-volumes of a batch of simplices, shape (M, k+1, d) -> (M,).

    Evaluates det(E E^T) / (k!)^2 with E the edge vectors from the first
    vertex, which agrees with the bordered-determinant formula of
    :func:`simplexflow.geometry.volume_squared` but vectorizes cheaply
    (closed-form Gram determinants up to 3x3). Clamped at zero.
    """
    M, m, _ = pts.shape
    k = m - 1
    if k == 0:
        return np.ones(M, dtype=np.float64)
    E = pts[:, 1:, :] - pts[:, 0:1, :]
    if k == 1:
        det = _dot(E[:, 0], E[:, 0])
    elif k == 2:
        a = _dot(E[:, 0], E[:, 0])
        b = _dot(E[:, 0], E[:, 1])
        c = _dot(E[:, 1], E[:, 1])
        det = a * c - b * b
    elif k == 3:
        a = _dot(E[:, 0], E[:, 0])
        b = _dot(E[:, 0], E[:, 1])
        c = _dot(E[:, 0], E[:, 2])
        e = _dot(E[:, 1], E[:, 1])
        f = _dot(E[:, 1], E[:, 2])
        i = _dot(E[:, 2], E[:, 2])
        det = a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c)
    else:
        det = np.linalg.det(E @ E.transpose(0, 2, 1))
    return np.maximum(det / float(math.factorial(k)) ** 2, 0.0)


def config_scale(positions: NDArray[np.float64]) -> float:
    """Bounding-box diagonal; cheap scale proxy for degeneracy thresholds."""
    span = positions.max(axis=0) - positions.min(axis=0)
    return float(np.linalg.norm(span))


def potential_full(positions, params: ModelParams) -> float:
    """Mean-field simplex potential over all distinct (n+1)-subsets.

    Equals the all-ordered-tuples sum (tuples with repeated indices carry
    zero volume; each distinct subset appears (n+1)! times).
    """
    pos = as_configuration(positions)
    N = pos.shape[0]
    n = params.n
    if N < n + 1:
        return 0.0
    combos = _combination_indices(N, n + 1)
    vols2 = batched_volume_squared(pos[combos])
    coeff = params.kappa * math.factorial(n) / (2.0 * float(N) ** n)
    return float(coeff * vols2.sum())


def potential_reduced(positions, sset: SimplexSet, params: ModelParams) -> float:
    """Reduced potential over the simplices of a sparse interaction set."""
    pos = as_configuration(positions)
    if sset.n != params.n:
        raise ValueError(f"simplex set arity {sset.n + 1} does not match order n={params.n}")
    combos = np.array(sset.simplices, dtype=np.int64)
    vols2 = batched_volume_squared(pos[combos])
    # kappa / (2 (n+1) |S|) over ordered tuples == kappa / (2 (n+1) M) unordered.
    coeff = params.kappa / (2.0 * (params.n + 1) * len(sset.simplices))
    return float(coeff * vols2.sum())


def grad_vol_squared(i: int, base, positions) -> NDArray[np.float64]:
    """Gradient of Vol_n(x_base, x_i)^2 with respect to x_i (reference path).

    Returns zero when i appears in the base (the simplex is identically
    degenerate) or when the base volume falls below the clamp threshold.
    """
    pos = as_configuration(positions)
    N, d = pos.shape
    base = tuple(int(b) for b in base)
    if not 0 <= i < N or any(not 0 <= b < N for b in base):
        raise IndexError(f"particle index out of range for N={N}")
    n = len(base)
    if i in base:
        return np.zeros(d)
    basepts = pos[list(base)]
    w = geometry.volume_squared(basepts)
    scale = config_scale(pos)
    if w <= CLAMP_REL * scale ** (2 * (n - 1)):
        return np.zeros(d)
    chart = geometry.affine_chart(basepts)
    h = geometry.project(pos[i], chart)
    return (2.0 / n**2) * w * (pos[i] - h)


def rhs_full(positions, params: ModelParams) -> NDArray[np.float64]:
    """Velocity field of the full flow (aggregated exact evaluation)."""
    pos = as_configuration(positions)
    N, d = pos.shape
    n = params.n
    if params.mode != "full":
        raise ValueError("rhs_full requires mode='full'")
    if N < n:
        return np.zeros_like(pos)
    bases = _combination_indices(N, n)
    base_pts = pos[bases]  # (M, n, d)
    w = batched_volume_squared(base_pts)
    scale = config_scale(pos)
    w = np.where(w > CLAMP_REL * scale ** (2 * (n - 1)), w, 0.0)

    b0 = base_pts[:, 0, :]
    U = _batched_orthonormal(base_pts[:, 1:, :] - b0[:, None, :])
    # D = (sum w) I - sum w P_B,  A = sum w (I - P_B) b0, with P_B the
    # orthogonal projector onto the base's direction space.
    proj_b0 = np.zeros_like(b0)
    C = np.zeros((d, d))
    for a in range(U.shape[1]):
        u = U[:, a, :]
        C += (w[:, None] * u).T @ u
        proj_b0 += _dot(u, b0)[:, None] * u
    S0 = float(w.sum())
    A = (w[:, None] * (b0 - proj_b0)).sum(axis=0)
    D = S0 * np.eye(d) - C
    coef = params.kappa * math.factorial(n) / (float(N) ** n * n**2)
    return -coef * (pos @ D.T - A)


def rhs_full_direct(positions, params: ModelParams) -> NDArray[np.float64]:
    """Velocity field of the full flow via the defining per-term sums.

    Performs (n+1) * C(N, n+1) gradient-term evaluations; used as the
    reference implementation and as the benchmark's cost model.
    """
    pos = as_configuration(positions)
    N, d = pos.shape
    n = params.n
    out = np.zeros_like(pos)
    if N < n + 1:
        return out
    for simplex in combinations(range(N), n + 1):
        for slot, i in enumerate(simplex):
            base = simplex[:slot] + simplex[slot + 1 :]
            out[i] -= grad_vol_squared(i, base, pos)
    return out * (params.kappa * math.factorial(n) / (2.0 * float(N) ** n))


def rhs_reduced(positions, sset: SimplexSet, params: ModelParams) -> NDArray[np.float64]:
    """Velocity field of the reduced flow over a sparse simplex set.

    Each particle's sum runs over its own neighborhood S_i and is
    normalized by |S_i|; particles with empty S_i are rejected up front.
    """
    pos = as_configuration(positions)
    N, d = pos.shape
    n = params.n
    if sset.n != n:
        raise ValueError(f"simplex set arity {sset.n + 1} does not match order n={params.n}")
    if sset.N != N:
        raise ValueError(f"simplex set built for N={sset.N}, got N={N}")
    empty = [i for i in range(N) if not sset.neighborhoods.get(i)]
    if empty:
        raise ValueError(f"empty neighborhoods (stationary particles): S_i for i in {empty}")

    sims = np.array(sset.simplices, dtype=np.int64)  # (M, n+1)
    scale = config_scale(pos)
    clamp = CLAMP_REL * scale ** (2 * (n - 1))
    acc = np.zeros_like(pos)
    for slot in range(n + 1):
        idx = sims[:, slot]
        base_cols = [c for c in range(n + 1) if c != slot]
        base_pts = pos[sims[:, base_cols]]  # (M, n, d)
        w = batched_volume_squared(base_pts)
        w = np.where(w > clamp, w, 0.0)
        b0 = base_pts[:, 0, :]
        rel = pos[idx] - b0
        U = _batched_orthonormal(base_pts[:, 1:, :] - b0[:, None, :])
        resid = rel.copy()
        for a in range(U.shape[1]):
            u = U[:, a, :]
            resid -= _dot(rel, u)[:, None] * u
        np.add.at(acc, idx, (2.0 / n**2) * w[:, None] * resid)
    m = np.array([len(sset.neighborhoods[i]) for i in range(N)], dtype=np.float64)
    return -params.kappa / (2.0 * m[:, None]) * acc


def gradient_check(positions, params: ModelParams, h: float = 1e-5) -> float:
    """Max relative mismatch between rhs_full and central differences.

    Compares the analytic field against -grad of :func:`potential_full`
    estimated coordinate-wise with step h; the error is normalized by
    max(1, |analytic|) per coordinate.
    """
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    pos = as_configuration(positions).copy()
    analytic = rhs_full(pos, params)
    worst = 0.0
    for i in range(pos.shape[0]):
        for c in range(pos.shape[1]):
            orig = pos[i, c]
            pos[i, c] = orig + h
            vp = potential_full(pos, params)
            pos[i, c] = orig - h
            vm = potential_full(pos, params)
            pos[i, c] = orig
            fd = -(vp - vm) / (2.0 * h)
            err = abs(analytic[i, c] - fd) / max(1.0, abs(analytic[i, c]))
            worst = max(worst, err)
    return worst


def _batched_orthonormal(E: NDArray[np.float64]) -> NDArray[np.float64]:
    """Modified Gram-Schmidt across a batch of direction sets.

    E has shape (M, k, d); rows that vanish (degenerate bases, already
    masked out by the volume clamp upstream) stay zero.
    """
    U = np.zeros_like(E)
    for a in range(E.shape[1]):
        v = E[:, a, :].copy()
        for b in range(a):
            v -= _dot(v, U[:, b, :])[:, None] * U[:, b, :]
        norm = np.sqrt(_dot(v, v))
        U[:, a, :] = v / np.where(norm > 0, norm, 1.0)[:, None]
    return U


def _dot(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row-wise dot product of two (M, d) arrays.

    Accumulates column by column: numpy's axis reduction over a tiny
    trailing axis carries per-row overhead that dominates the hot loops.
    """
    prod = a * b
    out = prod[:, 0].copy()
    for c in range(1, prod.shape[1]):
        out += prod[:, c]
    return out
