"""Maximum likelihood and minimum pseudodistance (MPD) estimation of (mu, Sigma).

The MPD estimates solve the weighted fixed-point system::

    mu    = sum_i w_i X_i
    Sigma = (alpha + 1) sum_i w_i (X_i - mu)(X_i - mu)^t
    w_i  ∝ exp(-alpha/2 (X_i - mu)^t Sigma^{-1} (X_i - mu))

and are computed by iterating the system from the maximum likelihood
estimates.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg as la
from .errors import NotPositiveDefinite, SingularScatter
from .pseudodistance import (
    ModelParams,
    _normalized_weights,
    as_sample,
    check_alpha,
    fixed_point_residual,
    objective,
)

__all__ = [
    "EstimatorConfig",
    "Estimate",
    "mle",
    "observation_weights",
    "reweight_step",
    "mpd_estimate",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EstimatorConfig:
    """Settings for :func:`mpd_estimate`.

    ``init=None`` starts the iteration from the maximum likelihood
    estimates; pass a :class:`ModelParams` to start elsewhere.
    """

    alpha: float = 0.0
    tol: float = 1e-8
    max_iter: int = 500
    init: Optional[ModelParams] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_alpha(self.alpha))
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class Estimate:
    mu: np.ndarray
    sigma: np.ndarray
    weights: np.ndarray
    alpha: float
    iterations: int
    converged: bool
    objective_value: float

    @property
    def params(self):
        return ModelParams(self.mu, self.sigma)


def _scatter_params(mu, scatter, jitter=False):
    """Wrap ``(mu, scatter)`` as ModelParams, failing with SingularScatter."""
    try:
        return ModelParams(mu, scatter)
    except NotPositiveDefinite:
        if not jitter:
            raise SingularScatter("scatter matrix is not positive definite") from None
    n = scatter.shape[0]
    bump = 1e-12 * np.trace(scatter) / n
    try:
        return ModelParams(mu, scatter + bump * np.eye(n))
    except NotPositiveDefinite:
        raise SingularScatter(
            "scatter matrix is not positive definite even after jitter") from None


def mle(sample):
    """Sample mean and 1/T scatter matrix.

    Raises
    ------
    SingularScatter
        For T < 2 or when the scatter matrix is singular (T <= N, collinear
        columns).
    """
    x = as_sample(sample)
    t = x.shape[0]
    if t < 2:
        raise SingularScatter(f"need at least 2 observations, got {t}")
    mu = x.mean(axis=0)
    centered = x - mu
    theta = _scatter_params(mu, centered.T @ centered / t)
    return Estimate(
        mu=theta.mu,
        sigma=theta.sigma,
        weights=np.full(t, 1.0 / t),
        alpha=0.0,
        iterations=0,
        converged=True,
        objective_value=objective(x, theta, 0.0),
    )


def observation_weights(sample, theta, alpha):
    """Normalized weights ``exp(-alpha/2 d_i) / sum_j exp(-alpha/2 d_j)``.

    The maximum exponent is subtracted before exponentiating, so the weights
    stay finite for arbitrarily distant observations.
    """
    alpha = check_alpha(alpha)
    x = as_sample(sample)
    return _normalized_weights(theta.mahalanobis_sq(x), alpha, check_underflow=False)


def _reweight(x, theta, alpha):
    w = _normalized_weights(theta.mahalanobis_sq(x), alpha, check_underflow=False)
    mu = w @ x
    centered = x - mu
    scatter = (alpha + 1.0) * (centered.T * w) @ centered
    return _scatter_params(mu, la.symmetrize(scatter), jitter=True)


def reweight_step(sample, theta, alpha):
    """One pass of the reweighting algorithm.

    Weights come from the input `theta`; the updated location is then used
    to center the updated scatter matrix.
    """
    alpha = check_alpha(alpha)
    x = as_sample(sample, min_rows=2)
    return _reweight(x, theta, alpha)


def _relative_change(old, new):
    a = np.concatenate([old.mu, la.vech(old.sigma)])
    b = np.concatenate([new.mu, la.vech(new.sigma)])
    return float(np.max(np.abs(b - a) / (1.0 + np.abs(b))))


def _residual_norm(x, theta, alpha):
    r_mu, r_sigma = fixed_point_residual(x, theta, alpha)
    return max(np.max(np.abs(r_mu)), np.max(np.abs(r_sigma)))


def mpd_estimate(sample, config=None):
    """Minimum pseudodistance estimates of location and scatter.

    Iterates :func:`reweight_step` until the largest scale-free parameter
    change ``|delta| / (1 + |value|)`` drops below ``config.tol`` and the
    stationarity residual at the current iterate is also below ``tol``.
    Hitting ``max_iter`` is not an error: the last iterate is returned with
    ``converged=False``.

    Parameters
    ----------
    sample : array_like, shape (T, N)
    config : EstimatorConfig, optional
        Defaults to ``EstimatorConfig()`` (alpha = 0, i.e. the MLE).

    Returns
    -------
    Estimate
    """
    config = config or EstimatorConfig()
    x = as_sample(sample, min_rows=2)
    alpha = config.alpha
    if alpha == 0.0 and config.init is None:
        return mle(x)

    theta = config.init if config.init is not None else mle(x).params
    start_value = objective(x, theta, alpha)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iter + 1):
        new = _reweight(x, theta, alpha)
        change = _relative_change(theta, new)
        theta = new
        if change < config.tol and _residual_norm(x, theta, alpha) < config.tol:
            converged = True
            break

    value = objective(x, theta, alpha)
    if value < start_value:
        logger.debug("objective decreased from %.6g to %.6g", start_value, value)
    if not converged:
        logger.info("reweighting did not converge in %d iterations", iterations)
    return Estimate(
        mu=theta.mu,
        sigma=theta.sigma,
        weights=observation_weights(x, theta, alpha),
        alpha=alpha,
        iterations=iterations,
        converged=converged,
        objective_value=value,
    )
