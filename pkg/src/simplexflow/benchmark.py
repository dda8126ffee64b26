"""Full-vs-reduced cost benchmark.

Measures the direct per-term evaluation of the defining gradient sums,
which is exactly the cost model the full and reduced flows are compared
by: (n+1) * C(N, n+1) gradient terms per step for the full model versus
sum_i |S_i| terms for a sparse topology. Term counts are exact integers;
wall times are medians over repetitions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .potential import ModelParams, grad_vol_squared, rhs_full_direct
from .simplex_set import SimplexSet


@dataclass
class BenchmarkRecord:
    """Per-spec cost measurement."""

    N: int
    n: int
    mode: str
    ordered_size: int | None
    term_count: int
    rhs_evaluations: int
    wall_time_per_step: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "n": self.n,
            "mode": self.mode,
            "ordered_size": self.ordered_size,
            "term_count": self.term_count,
            "rhs_evaluations": self.rhs_evaluations,
            "wall_time_per_step": self.wall_time_per_step,
        }


def full_term_count(N: int, n: int) -> int:
    """Gradient terms per step of the full model: (n+1) * C(N, n+1)."""
    return (n + 1) * math.comb(N, n + 1)


def reduced_term_count(sset: SimplexSet) -> int:
    """Gradient terms per step of the reduced model: sum_i |S_i| (unordered)."""
    return sum(len(bs) for bs in sset.neighborhoods.values())


def measure(
    positions,
    params: ModelParams,
    sset: SimplexSet | None = None,
    repetitions: int = 3,
) -> BenchmarkRecord:
    """Time one right-hand-side evaluation of the per-term algorithm."""
    if repetitions < 3:
        raise ValueError("need at least 3 repetitions for a stable median")
    pos = np.asarray(positions, dtype=np.float64)
    N = pos.shape[0]
    if params.mode == "reduced":
        if sset is None:
            raise ValueError("reduced benchmark requires a simplex set")
        evaluate = lambda: _reduced_direct(pos, sset, params)
        terms = reduced_term_count(sset)
        ordered = sset.ordered_size
    else:
        evaluate = lambda: rhs_full_direct(pos, params)
        terms = full_term_count(N, params.n)
        ordered = None
    evaluate()  # warm caches before timing
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        evaluate()
        samples.append(time.perf_counter() - start)
    return BenchmarkRecord(
        N=N,
        n=params.n,
        mode=params.mode,
        ordered_size=ordered,
        term_count=terms,
        rhs_evaluations=repetitions,
        wall_time_per_step=float(np.median(samples)),
    )


def _reduced_direct(pos, sset: SimplexSet, params: ModelParams):
    """Per-term reduced right-hand side (same loop style as the full path)."""
    out = np.zeros_like(pos)
    for i in range(pos.shape[0]):
        bases = sset.neighborhoods[i]
        acc = np.zeros(pos.shape[1])
        for base in bases:
            acc += grad_vol_squared(i, base, pos)
        out[i] = -params.kappa / (2.0 * len(bases)) * acc
    return out
