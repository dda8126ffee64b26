"""Exact-formula computational geometry for simplex consensus flows.

Squared distances, Cayley-Menger simplex volumes, orthogonal projection
onto affine hulls, and SVD-based affine-rank estimation. All functions
are pure and operate on plain numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

# Residual threshold (relative to point-set scale) below which a candidate
# direction is considered linearly dependent during orthonormalization.
RANK_TOL = 1e-10

# Default relative singular-value cutoff for affine_rank.
AFFINE_RANK_TOL = 1e-6


def squared_distance(a, b) -> float:
    """Squared Euclidean distance between two points of equal dimension."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(diff @ diff)


def bordered_distance_matrix(points: NDArray[np.floating]) -> NDArray[np.float64]:
    """Build the (k+2)x(k+2) bordered squared-distance matrix of k+1 points.

    The inner block holds pairwise squared distances; the added first row
    and column are (0, 1, ..., 1).
    """
    pts = _as_vertex_array(points)
    m = len(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    bordered = np.ones((m + 1, m + 1), dtype=np.float64)
    bordered[0, 0] = 0.0
    bordered[1:, 1:] = sq
    return bordered


def volume_squared_raw(points) -> float:
    """Unclamped Cayley-Menger value for the simplex on the given vertices.

    Floating-point cancellation can make this slightly negative for
    near-degenerate simplices; see :func:`volume_squared` for the clamped
    version used everywhere else.
    """
    pts = _as_vertex_array(points)
    k = len(pts) - 1
    if k == 0:
        return 1.0
    bordered = bordered_distance_matrix(pts)
    sign = -1.0 if (k + 1) % 2 else 1.0
    coeff = sign / (2.0**k * float(math.factorial(k)) ** 2)
    return float(coeff * np.linalg.det(bordered))


def volume_squared(points) -> float:
    """Squared k-dimensional volume of the simplex on k+1 vertices.

    Uses the Cayley-Menger determinant of the bordered squared-distance
    matrix, clamped at zero. A single vertex (k=0) has volume 1 by
    convention so that the recursion Vol_k = Vol_{k-1} * height / k closes.
    """
    return max(volume_squared_raw(points), 0.0)


def heron_area_squared(a, b, c) -> float:
    """Squared triangle area from the classical Heron expansion."""
    d12 = squared_distance(a, b)
    d23 = squared_distance(b, c)
    d31 = squared_distance(c, a)
    return max(
        -(d12**2 + d23**2 + d31**2 - 2 * d12 * d23 - 2 * d23 * d31 - 2 * d31 * d12)
        / 16.0,
        0.0,
    )


@dataclass(frozen=True)
class AffineChart:
    """Orthonormal chart of the affine hull of a point set.

    Attributes:
        base: a point on the subspace (the first generator).
        basis: (rank, d) array of orthonormal direction vectors.
        rank: dimension of the hull.
    """

    base: NDArray[np.float64]
    basis: NDArray[np.float64]
    rank: int


def affine_chart(points, rank_tol: float = RANK_TOL) -> AffineChart:
    """Orthonormal chart of the minimal affine subspace containing ``points``.

    Directions are the differences to the first point, orthonormalized by
    modified Gram-Schmidt; a direction whose orthogonal residual norm falls
    below ``rank_tol`` times the largest pairwise distance is dropped.
    """
    pts = _as_vertex_array(points)
    if len(pts) == 0:
        raise ValueError("affine_chart requires at least one point")
    base = pts[0]
    scale = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            scale = max(scale, float(np.linalg.norm(pts[i] - pts[j])))
    threshold = rank_tol * scale if scale > 0 else rank_tol
    basis: list[NDArray[np.float64]] = []
    for p in pts[1:]:
        v = p - base
        for e in basis:
            v = v - (v @ e) * e
        norm = float(np.linalg.norm(v))
        if norm > threshold:
            basis.append(v / norm)
    mat = (
        np.array(basis, dtype=np.float64)
        if basis
        else np.zeros((0, pts.shape[1]), dtype=np.float64)
    )
    return AffineChart(base=base.copy(), basis=mat, rank=len(basis))


def project(x, chart: AffineChart) -> NDArray[np.float64]:
    """Orthogonal projection of ``x`` onto the subspace of ``chart``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != chart.base.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {chart.base.shape}")
    rel = x - chart.base
    if chart.rank == 0:
        return chart.base.copy()
    coeffs = chart.basis @ rel
    return chart.base + coeffs @ chart.basis


def affine_rank(positions, tol: float = AFFINE_RANK_TOL) -> int:
    """Dimension of the affine hull of a configuration, via thin SVD.

    Counts singular values of the mean-centered N x d position matrix above
    ``tol`` times the leading one. A configuration whose leading singular
    value is itself below ``tol`` (all points coincident) has rank 0.
    """
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim != 2:
        raise ValueError("positions must be an (N, d) array")
    if tol <= 0:
        raise ValueError("tol must be positive")
    centered = pos - pos.mean(axis=0)
    svals = np.linalg.svd(centered, compute_uv=False)
    if svals.size == 0 or svals[0] <= tol:
        return 0
    return int(np.sum(svals > tol * svals[0]))


def _as_vertex_array(points) -> NDArray[np.float64]:
    """Stack a vertex list into an (m, d) float array, checking dimensions."""
    if isinstance(points, np.ndarray) and points.ndim == 2:
        return points.astype(np.float64, copy=False)
    arrs = [np.atleast_1d(np.asarray(p, dtype=np.float64)) for p in points]
    dims = {a.shape for a in arrs}
    if len(dims) > 1:
        raise ValueError(f"dimension mismatch among vertices: {sorted(dims)}")
    return np.array(arrs, dtype=np.float64)
