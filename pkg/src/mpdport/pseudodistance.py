"""Pseudodistances between normal models and the empirical MPD objective.

For ``alpha > 0`` the pseudodistance between ``P`` and ``Q`` (densities
``p``, ``q``) is::

    R_alpha(P, Q) = ln ∫p^a dP / (a+1) + ln ∫q^a dQ / (a(a+1)) - ln ∫p^a dQ / a

and ``R_0(P, Q) = ∫ ln(q/p) dQ``.  Minimizing ``R_alpha(P_theta, P_n)`` over
normal models ``P_theta`` gives the minimum pseudodistance estimator; this
module provides the objective it maximizes and the residual of its
stationarity equations.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import logsumexp

from . import linalg as la
from .errors import DegenerateWeights, DimensionMismatch

__all__ = [
    "ModelParams",
    "as_sample",
    "check_alpha",
    "r_alpha_normals",
    "c_alpha",
    "objective",
    "fixed_point_residual",
]

# sum of raw exponential weights below this is treated as total underflow
_WEIGHT_FLOOR = 1e-300
_LOG_WEIGHT_FLOOR = np.log(_WEIGHT_FLOOR)


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Location vector and scatter matrix of an N-variate normal model."""

    mu: np.ndarray
    sigma: np.ndarray
    _chol: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float)).copy()
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
            raise DimensionMismatch(
                f"mu has shape {mu.shape} but sigma has shape {sigma.shape}")
        sigma = la.symmetrize(sigma)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "_chol", la.cholesky(sigma))

    @property
    def n(self):
        return self.mu.size

    @property
    def chol(self):
        return self._chol

    @property
    def logdet(self):
        return la.logdet(chol=self._chol)

    def mahalanobis_sq(self, x):
        return la.mahalanobis_sq(x, self.mu, chol=self._chol)

    def log_density(self, x):
        d = self.mahalanobis_sq(x)
        return -0.5 * (self.n * np.log(2 * np.pi) + self.logdet + d)

    def affine(self, a, b):
        """Parameters of ``A X + b`` when ``X`` has these parameters."""
        a = np.asarray(a, dtype=float)
        return ModelParams(a @ self.mu + b, a @ self.sigma @ a.T)

    def allclose(self, other, rtol=1e-10, atol=0.0):
        return (np.allclose(self.mu, other.mu, rtol=rtol, atol=atol)
                and np.allclose(self.sigma, other.sigma, rtol=rtol, atol=atol))


def as_sample(data, min_rows=1):
    """Validate a T x N observation matrix (rows are periods)."""
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] < 1:
        raise DimensionMismatch(f"sample must be a T x N matrix, got {x.shape}")
    if x.shape[0] < min_rows:
        raise DimensionMismatch(f"need at least {min_rows} observations, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    return x


def check_alpha(alpha):
    alpha = float(alpha)
    if not alpha >= 0 or not np.isfinite(alpha):
        raise ValueError(f"alpha must be a finite nonnegative number, got {alpha}")
    return alpha


def _check_same_dim(theta, x):
    if x.shape[1] != theta.n:
        raise DimensionMismatch(
            f"sample has {x.shape[1]} columns but the model has dimension {theta.n}")


def r_alpha_normals(p, q, alpha):
    """Pseudodistance ``R_alpha(P, Q)`` between two normal laws, in closed form.

    With ``lam_i`` the eigenvalues of ``Sigma_p^{-1} Sigma_q`` and
    ``delta = mu_p - mu_q`` the three Gaussian integrals combine into::

        1/2 sum_i [log1p(a lam_i)/a - log1p(a)/a - ln(lam_i)/(a+1)]
            + 1/2 delta^t (Sigma_p + a Sigma_q)^{-1} delta

    whose ``a -> 0`` limit is the Kullback-Leibler divergence of ``Q`` from
    ``P``.
    """
    alpha = check_alpha(alpha)
    if p.n != q.n:
        raise DimensionMismatch(f"dimensions differ: {p.n} vs {q.n}")
    if np.array_equal(p.mu, q.mu) and np.array_equal(p.sigma, q.sigma):
        return 0.0
    lam = linalg.eigh(q.sigma, p.sigma, eigvals_only=True)
    delta = p.mu - q.mu
    if alpha == 0.0:
        spread = np.sum(lam - 1.0 - np.log(lam))
        shift = la.mahalanobis_sq(delta, np.zeros(p.n), chol=p.chol)
    else:
        spread = np.sum(np.log1p(alpha * lam) / alpha - np.log1p(alpha) / alpha
                        - np.log(lam) / (alpha + 1.0))
        shift = la.mahalanobis_sq(delta, np.zeros(p.n), p.sigma + alpha * q.sigma)
    return max(0.5 * (spread + shift), 0.0)


def c_alpha(theta, alpha):
    """Normalizer ``(∫ p_theta^{alpha+1})^{alpha/(alpha+1)}``."""
    alpha = check_alpha(alpha)
    if alpha == 0.0:
        raise ValueError("c_alpha is only defined for alpha > 0")
    n = theta.n
    k = alpha / (2.0 * (alpha + 1.0))
    log_c = (-n * alpha * k * np.log(2 * np.pi)
             - alpha * k * theta.logdet
             - n * k * np.log(alpha + 1.0))
    return float(np.exp(log_c))


def objective(sample, theta, alpha):
    """Empirical objective maximized by the MPD estimator.

    ``alpha > 0``: ``det(Sigma)^{-alpha/(2(alpha+1))} sum_i exp(-alpha/2 d_i)``
    with ``d_i`` the squared Mahalanobis distances; ``alpha == 0``: mean
    Gaussian log-likelihood.
    """
    alpha = check_alpha(alpha)
    x = as_sample(sample)
    _check_same_dim(theta, x)
    if alpha == 0.0:
        return float(np.mean(theta.log_density(x)))
    d = theta.mahalanobis_sq(x)
    log_scale = -alpha / (2.0 * (alpha + 1.0)) * theta.logdet
    return float(np.exp(log_scale + logsumexp(-0.5 * alpha * d)))


def _normalized_weights(d, alpha, check_underflow=True):
    t = d.size
    if alpha == 0.0:
        return np.full(t, 1.0 / t)
    logw = -0.5 * alpha * d
    total = logsumexp(logw)
    if check_underflow and total < _LOG_WEIGHT_FLOOR:
        raise DegenerateWeights(
            f"sum of exponential weights {np.exp(total):.3e} underflows")
    w = np.exp(logw - total)
    return w / w.sum()


def fixed_point_residual(sample, theta, alpha):
    """Residuals of the two stationarity equations at ``theta``.

    Returns
    -------
    mu_residual : ndarray, shape (N,)
        ``sum_i w_i X_i - mu``
    sigma_residual : ndarray, shape (N, N)
        ``(alpha+1) sum_i w_i (X_i - mu)(X_i - mu)^t - Sigma``

    where ``w_i`` are the self-normalized weights ``exp(-alpha/2 d_i)``
    evaluated at ``theta``.  Both vanish at an MPD estimate.
    """
    alpha = check_alpha(alpha)
    x = as_sample(sample, min_rows=2)
    _check_same_dim(theta, x)
    w = _normalized_weights(theta.mahalanobis_sq(x), alpha)
    centered = x - theta.mu
    mu_res = w @ centered
    scatter = (alpha + 1.0) * (centered.T * w) @ centered
    return mu_res, la.symmetrize(scatter) - theta.sigma
