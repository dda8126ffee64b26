"""Scikit-learn style wrapper around the simplex consensus flow.

``SimplexConsensusFlow`` treats the initial particle positions as the
training data: ``fit`` integrates the flow, and the limiting affine
subspace the particles collapse onto becomes the learned model. Subsequent
``transform`` calls orthogonally project arbitrary points onto that
subspace, so the estimator composes with pipelines like any other
transformer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import diagnostics, dynamics, geometry
from .potential import ModelParams
from .simplex_set import SimplexSet, base_point_set, full_set


class SimplexConsensusFlow(TransformerMixin, BaseEstimator):
    """Collapse a point cloud onto an (n-1)-dimensional affine subspace.

    Parameters:
        n: simplex order of the driving potential (n=1 is plain linear
            consensus, n=2 flattens onto a line, n=3 onto a plane, ...).
        kappa: attractive coupling strength.
        mode: 'full' for all-tuples interaction, 'reduced' for a sparse
            simplex topology.
        topology: for reduced mode, either a SimplexSet or a list of base
            n-tuples joined with every other particle.
        dt, steps, record_every, method, stop_ratio: integrator settings.

    Attributes (after fit):
        positions_: terminal particle positions, shape (N, d).
        trajectory_: the recorded :class:`simplexflow.dynamics.Trajectory`.
        report_: the :class:`simplexflow.diagnostics.DiagnosticsReport`.
        subspace_origin_, subspace_basis_: chart of the terminal affine
            hull (basis rows orthonormal).
        rank_: dimension of the terminal affine hull.
    """

    def __init__(
        self,
        n=2,
        kappa=1.0,
        mode="full",
        topology=None,
        dt=1e-3,
        steps=20_000,
        record_every=100,
        method="rk4",
        stop_ratio=1e-14,
    ):
        self.n = n
        self.kappa = kappa
        self.mode = mode
        self.topology = topology
        self.dt = dt
        self.steps = steps
        self.record_every = record_every
        self.method = method
        self.stop_ratio = stop_ratio

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        params = ModelParams(n=self.n, kappa=self.kappa, mode=self.mode)
        sset = self._resolve_topology(X.shape[0]) if self.mode == "reduced" else None
        integ = dynamics.IntegratorConfig(
            dt=self.dt,
            steps=self.steps,
            record_every=self.record_every,
            method=self.method,
            stop_ratio=self.stop_ratio,
        )
        self.trajectory_ = dynamics.simulate(X, params, sset=sset, integ=integ)
        self.report_ = diagnostics.check_trajectory(self.trajectory_, params, dt=self.dt)
        self.positions_ = self.trajectory_.snapshots[-1]
        svals_rank = geometry.affine_rank(self.positions_)
        origin = self.positions_.mean(axis=0)
        centered = self.positions_ - origin
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        self.subspace_origin_ = origin
        self.subspace_basis_ = vt[:svals_rank]
        self.rank_ = svals_rank
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Project points onto the terminal affine subspace."""
        check_is_fitted(self, "subspace_basis_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        rel = X - self.subspace_origin_
        return self.subspace_origin_ + (rel @ self.subspace_basis_.T) @ self.subspace_basis_

    def _resolve_topology(self, N: int) -> SimplexSet:
        if isinstance(self.topology, SimplexSet):
            return self.topology
        if self.topology is None:
            return full_set(N, self.n)
        return base_point_set(self.topology, N, n=self.n)
