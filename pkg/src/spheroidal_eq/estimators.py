"""Estimator-style facade over the solver, the potentials and the particle flow."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import potentials as pot
from ._validation import check_points, check_positive_float, check_positive_int
from .energetics import el_report
from .kernel import EnergyParams
from .particle_flow import ParticleConfig, fit_shape, run_flow
from .equilibrium_solver import solve_equilibrium


class SpheroidalEquilibrium(BaseEstimator, TransformerMixin):
    """Equilibrium spheroid for ``(n, alpha)``.

    ``fit`` ignores its data argument; it solves the stationarity equation.
    ``predict`` returns the potential ``W_alpha * mu`` at the given points and
    ``transform`` returns the two components ``(phi_0, psi)``.
    """

    def __init__(self, n: int = 3, alpha: float = 0.0):
        self.n = n
        self.alpha = alpha

    def fit(self, X=None, y=None):
        params = EnergyParams(self.n, self.alpha)
        params.require_solvable()
        self.solution_ = solve_equilibrium(params.alpha, params.n)
        self.spheroid_ = self.solution_.spheroid
        self.t_ = self.solution_.t
        self.a_ = self.solution_.a
        self.b_ = self.solution_.b
        self.c_alpha_ = self.solution_.c_alpha
        self.n_features_in_ = params.n
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        x = check_points(X, self.n)
        return np.asarray(pot.phi_alpha(x, self.spheroid_, self.alpha), dtype=float).reshape(-1)

    def transform(self, X):
        check_is_fitted(self, "solution_")
        x = check_points(X, self.n)
        phi0, psi = pot.components(x, self.spheroid_)
        return np.column_stack([np.atleast_1d(phi0), np.atleast_1d(psi)])

    def effective_potential(self, X):
        x = check_points(X, self.n)
        return self.predict(x) + 0.5 * np.sum(x * x, axis=1)

    def verify(self, **kwargs):
        check_is_fitted(self, "solution_")
        return el_report(self.solution_, **kwargs)

    def score(self, X, y=None):
        """Negative max deviation of the effective potential from ``C`` at points inside."""
        x = check_points(X, self.n)
        inside = self.spheroid_.contains(x)
        if not np.any(inside):
            return 0.0
        return -float(np.max(np.abs(self.effective_potential(x[inside]) - self.c_alpha_)))


class SpheroidShapeEstimator(BaseEstimator, TransformerMixin):
    """Second-moment spheroid fit to a point cloud.

    ``transform`` maps points to the coordinates of the fitted unit ball;
    ``predict`` flags points inside the fitted spheroid.
    """

    def fit(self, X, y=None):
        x = check_points(X, min_samples=2)
        if x.shape[0] < x.shape[1] + 1:
            x = check_points(X, min_samples=x.shape[1] + 1)
        self.fit_ = fit_shape(x)
        self.t_hat_ = self.fit_.t_hat
        self.b_hat_ = self.fit_.b_hat
        self.a_hat_ = self.fit_.a_hat
        self.center_ = np.asarray(self.fit_.center)
        self.residual_ = self.fit_.residual
        self.n_features_in_ = x.shape[1]
        return self

    def _scale(self):
        s = np.full(self.n_features_in_, self.b_hat_)
        s[0] = self.a_hat_
        return s

    def transform(self, X):
        check_is_fitted(self, "fit_")
        x = check_points(X, self.n_features_in_)
        return (x - self.center_) / self._scale()

    def predict(self, X):
        return np.sum(self.transform(X) ** 2, axis=1) <= 1.0


class ParticleFlow(BaseEstimator):
    """Gradient flow of ``n_particles`` points; ``fit(X)`` may pass a start configuration."""

    def __init__(
        self,
        n: int = 3,
        alpha: float = 0.0,
        n_particles: int = 500,
        step: float = 0.05,
        max_iter: int = 10_000,
        tol: float = 1e-9,
        seed: int = 42,
        mode: str = "reproducible",
    ):
        self.n = n
        self.alpha = alpha
        self.n_particles = n_particles
        self.step = step
        self.max_iter = max_iter
        self.tol = tol
        self.seed = seed
        self.mode = mode

    def fit(self, X=None, y=None):
        params = EnergyParams(self.n, self.alpha)
        step = check_positive_float(self.step, "step")
        max_iter = check_positive_int(self.max_iter, "max_iter", 0)
        tol = check_positive_float(self.tol, "tol")
        if X is None:
            cfg = ParticleConfig.initial(
                check_positive_int(self.n_particles, "n_particles"), params, self.seed, step, self.mode
            )
        else:
            cfg = ParticleConfig(check_points(X, self.n), params, step, self.seed, mode=self.mode)
        self.result_ = run_flow(cfg, max_iter=max_iter, tol=tol)
        self.points_ = self.result_.config.points
        self.energies_ = self.result_.energies
        self.energy_ = float(self.energies_[-1])
        self.converged_ = self.result_.converged
        self.n_iter_ = self.result_.steps
        self.shape_ = fit_shape(self.points_) if len(self.points_) > self.n else None
        self.n_features_in_ = self.n
        return self

    def transform(self, X=None):
        check_is_fitted(self, "points_")
        return self.points_.copy()

    def fit_transform(self, X=None, y=None):
        return self.fit(X).transform()
