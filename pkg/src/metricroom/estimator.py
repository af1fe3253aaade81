"""scikit-learn style façade: ``fit`` a domain, ``predict`` densities at points."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .barmetrics import OptimizerBudget, eta_bar, kappa
from .geometry import boundary_distance, contains, domain_from_dict
from .hurwitz import hurwitz_general, hyperbolic_density
from .liouville import SolverConfig

METRICS = ("delta", "quasihyperbolic", "lambda", "eta", "eta_bar", "kappa")


def _points(X) -> np.ndarray:
    X = np.asarray(X)
    if np.iscomplexobj(X):
        return X.ravel().astype(complex)
    X = np.atleast_2d(X.astype(float))
    if X.shape[1] != 2:
        raise ValueError("points must be complex or an (n, 2) array of coordinates")
    return X[:, 0] + 1j * X[:, 1]


class DensityEstimator(BaseEstimator):
    """Evaluate one of the conformal densities of a fitted domain.

    Parameters
    ----------
    metric
        one of ``delta``, ``quasihyperbolic``, ``lambda``, ``eta``,
        ``eta_bar``, ``kappa``.
    grid, n_theta
        grid solver resolution for densities without a closed form.
    coarse_pairs, refine_iters, simplex_tolerance
        pair optimizer budget for ``eta_bar`` and ``kappa``.

    Examples
    --------
    >>> from metricroom.geometry import Disk
    >>> DensityEstimator(metric="lambda").fit(Disk(0, 1)).predict([[0.0, 0.0]])
    array([2.])
    """

    def __init__(self, metric: str = "lambda", grid: int = 513, n_theta: int = 64,
                 coarse_pairs: int = 24, refine_iters: int = 40, simplex_tolerance: float = 1e-9):
        self.metric = metric
        self.grid = grid
        self.n_theta = n_theta
        self.coarse_pairs = coarse_pairs
        self.refine_iters = refine_iters
        self.simplex_tolerance = simplex_tolerance

    def fit(self, domain, y=None):
        """Store the domain (an object or its dict form)."""
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        self.domain_ = domain_from_dict(domain) if isinstance(domain, dict) else domain
        self.solver_config_ = SolverConfig(grid=self.grid, n_theta=self.n_theta)
        self.budget_ = OptimizerBudget(self.coarse_pairs, self.refine_iters, self.simplex_tolerance)
        return self

    def _one(self, w: complex) -> tuple:
        dom, m = self.domain_, self.metric
        if m == "delta":
            return boundary_distance(dom, w), 0.0
        if m == "quasihyperbolic":
            return 1 / boundary_distance(dom, w), 0.0
        if m == "lambda":
            return hyperbolic_density(dom, w, self.solver_config_)
        if m == "eta":
            est = hurwitz_general(dom, w, self.solver_config_)
            return est.value, est.relative_error
        if m == "eta_bar":
            r = eta_bar(dom, w, self.budget_)
            return r.value, r.error
        return kappa(dom, w, self.budget_).value, 0.0

    def predict(self, X, return_error: bool = False):
        """Density at each point; points outside the domain give NaN."""
        check_is_fitted(self, "domain_")
        Z = _points(X)
        vals = np.full(Z.shape, np.nan)
        errs = np.full(Z.shape, np.nan)
        for i, w in enumerate(Z):
            if contains(self.domain_, w):
                vals[i], errs[i] = self._one(complex(w))
        return (vals, errs) if return_error else vals
