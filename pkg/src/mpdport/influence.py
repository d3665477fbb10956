"""Influence functions of the MPD location/scatter functionals and of the
plug-in optimal portfolio weights, plus the data influence measure (DIM).

All functions accept a single point ``x`` of shape (N,) or a stack of points
of shape (T, N); stacked inputs give stacked outputs.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DimensionMismatch
from .estimators import Estimate, EstimatorConfig, mpd_estimate
from .portfolio import FrontierPoint, optimal_weights, portfolio_for_variance
from .pseudodistance import ModelParams, check_alpha

__all__ = [
    "if_location",
    "if_covariance",
    "if_weights",
    "weights_influence",
    "dim_measure",
    "dim_series",
    "DimResult",
]


def _prepare(x, params):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != params.n or x.ndim > 2:
        raise DimensionMismatch(f"x has shape {x.shape}, model dimension is {params.n}")
    return x, x - params.mu, params.mahalanobis_sq(x)


def if_location(x, params, alpha=0.0):
    """``(alpha+1)^{(N+2)/2} (x - mu) exp(-alpha/2 d(x))``."""
    alpha = check_alpha(alpha)
    _, centered, d = _prepare(x, params)
    scale = (alpha + 1.0) ** ((params.n + 2) / 2.0) * np.exp(-0.5 * alpha * d)
    return centered * np.asarray(scale)[..., None]


def if_covariance(x, params, alpha=0.0):
    """``(alpha+1)^{(N+4)/2} [(x-mu)(x-mu)^t - Sigma/(alpha+1)] exp(-alpha/2 d(x))``."""
    alpha = check_alpha(alpha)
    _, centered, d = _prepare(x, params)
    scale = (alpha + 1.0) ** ((params.n + 4) / 2.0) * np.exp(-0.5 * alpha * d)
    outer = centered[..., :, None] * centered[..., None, :]
    bracket = outer - params.sigma / (alpha + 1.0)
    return bracket * np.asarray(scale)[..., None, None]


def weights_influence(if_mu, if_sigma, params, lam):
    """Linear map taking ``(IF_mu, IF_Sigma)`` to the IF of the optimal weights.

    This is the directional derivative of ``Sigma^{-1}(mu - eta e)/lambda``
    along ``(IF_mu, IF_Sigma)``, using ``dSigma^{-1} = -Sigma^{-1} dSigma
    Sigma^{-1}``.  The result always sums to zero.
    """
    if_mu = np.asarray(if_mu, dtype=float)
    if_sigma = np.asarray(if_sigma, dtype=float)
    mu = params.mu
    n = params.n
    chol = (params.chol, True)
    s_inv = linalg.cho_solve(chol, np.eye(n))
    s_mu = s_inv @ mu
    s_e = s_inv.sum(axis=1)
    a = s_e.sum()
    p = optimal_weights(params, lam)

    # batch-friendly forms: '...ij' stacks of matrices, '...i' stacks of vectors
    d_sigma_p = if_sigma @ p
    term_sigma = -d_sigma_p @ s_inv
    e_s_dsig_s_mu = np.einsum("i,...ij,j->...", s_e, if_sigma, s_mu)
    e_s_dmu = if_mu @ s_e
    e_s_dsig_s_e = np.einsum("i,...ij,j->...", s_e, if_sigma, s_e)
    coef = ((e_s_dsig_s_mu - e_s_dmu) / a
            - e_s_dsig_s_e * (s_mu.sum() - lam) / a**2)
    inner = if_mu @ s_inv + np.asarray(coef)[..., None] * s_e
    return term_sigma + inner / lam


def if_weights(x, params, lam, alpha=0.0):
    """Influence function of the plug-in optimal weights at ``x``."""
    if params.n < 2:
        raise DimensionMismatch("weight influence needs at least two assets")
    return weights_influence(
        if_location(x, params, alpha), if_covariance(x, params, alpha), params, lam)


def dim_measure(x, robust_params, lam, alpha=0.0):
    """Data influence measure: Euclidean norm of :func:`if_weights`.

    With the default ``alpha=0`` the maximum likelihood influence functions
    are used, evaluated at (robustly estimated) `robust_params`.  A positive
    `alpha` measures the influence on the MPD-based weights instead.
    """
    return np.linalg.norm(if_weights(x, robust_params, lam, alpha), axis=-1)


@dataclass(frozen=True, eq=False)
class DimResult:
    """DIM series for every observation of a sample plus its ingredients."""

    dims: np.ndarray
    estimate: Estimate
    point: FrontierPoint
    if_alpha: float

    def top(self, k):
        """Indices of the k largest DIM values, largest first."""
        return np.argsort(-self.dims, kind="stable")[:k]


def dim_series(sample, alpha=0.2, target_variance=0.005, if_alpha=0.0, config=None):
    """DIM of every observation for the frontier portfolio at a target variance.

    Parameters are estimated by MPD at `alpha`; the portfolio on the
    short-selling frontier with variance `target_variance` fixes the risk
    aversion.
    """
    config = config or EstimatorConfig(alpha=alpha)
    estimate = mpd_estimate(sample, config)
    params = ModelParams(estimate.mu, estimate.sigma)
    point = portfolio_for_variance(params, target_variance, allow_short=True)
    dims = dim_measure(np.asarray(sample, dtype=float), params, point.lam, if_alpha)
    return DimResult(dims, estimate, point, if_alpha)
