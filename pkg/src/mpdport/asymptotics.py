"""Asymptotic covariances and efficiency of the MPD estimators.

Covariance matrices of the scatter estimator are expressed in ``vecs``
coordinates (see :func:`mpdport.linalg.vecs`).
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from . import linalg as la
from .portfolio import optimal_weights
from .pseudodistance import ModelParams, check_alpha

__all__ = [
    "weight_funcs",
    "d_mu",
    "d_eta",
    "d_tau",
    "v_location",
    "v_covariance",
    "v_covariance_standard",
    "transport_operator",
    "det_v_location_standard",
    "det_v_covariance_standard",
    "are",
    "v_weights",
    "AsymptoticReport",
    "asymptotic_report",
    "AreTable",
    "are_table",
]


def _ratio(alpha):
    return (alpha + 1.0) / np.sqrt(2.0 * alpha + 1.0)


def weight_funcs(t, alpha, n):
    """Weight functions ``(w_mu, w_eta, w_delta, w_tau)`` of the MPD M-estimator.

    ``t`` is the Mahalanobis norm ``||x - mu||_{Sigma^{-1}}`` (scalar or array).
    """
    alpha = check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    kernel = np.exp(-0.5 * alpha * t**2)
    root = np.sqrt(alpha + 1.0)
    w_mu = root ** (n + 2) * kernel
    w_eta = root ** (n + 4) * kernel
    w_delta = root ** (n + 2) * kernel
    w_tau = root ** (n + 4) * (t**2 - n / (alpha + 1.0)) * kernel
    return w_mu, w_eta, w_delta, w_tau


def d_mu(alpha, n):
    return _ratio(check_alpha(alpha)) ** (n + 2)


def d_eta(alpha, n):
    return _ratio(check_alpha(alpha)) ** (n + 4)


def _rank_one_coef(alpha, n):
    # coefficient of w w^t in the standard-normal scatter covariance
    return alpha**2 * (alpha + 1.0) ** (n + 2) / (2.0 * np.sqrt(2.0 * alpha + 1.0) ** (n + 4))


def d_tau(alpha, n):
    alpha = check_alpha(alpha)
    return n * _rank_one_coef(alpha, n) + d_eta(alpha, n)


def v_location(alpha, n, sigma=None):
    """Asymptotic covariance of the location estimator, ``d_mu * Sigma``.

    ``sigma=None`` means the standard normal model (identity scatter).
    """
    sigma = np.eye(n) if sigma is None else la.symmetrize(sigma)
    return d_mu(alpha, n) * sigma


def v_covariance_standard(alpha, n):
    """Asymptotic covariance of ``vecs(Sigma_hat)`` at the standard normal."""
    alpha = check_alpha(alpha)
    m = n * (n + 1) // 2
    w = np.sqrt(2.0) * la.vecs(np.eye(n))
    return d_eta(alpha, n) * np.eye(m) + _rank_one_coef(alpha, n) * np.outer(w, w)


def transport_operator(sigma):
    """Matrix ``K`` with ``K vecs(S) = vecs(Sigma^{1/2} S Sigma^{1/2})``.

    Built column by column from the ``vecs`` basis using the symmetric
    square root of `sigma`.
    """
    sigma = la.symmetrize(sigma)
    n = sigma.shape[0]
    root = la.sqrtm_sym(sigma)
    m = n * (n + 1) // 2
    k = np.empty((m, m))
    for j in range(m):
        basis = np.zeros(m)
        basis[j] = 1.0
        k[:, j] = la.vecs(root @ la.unvecs(basis, n) @ root)
    return k


def v_covariance(alpha, n, sigma=None):
    """Asymptotic covariance of ``vecs(Sigma_hat)`` at ``N(mu, Sigma)``.

    Evaluates ``d_eta K K^t + 2c vecs(Sigma) vecs(Sigma)^t``, which equals
    ``K V0 K^t`` with ``V0`` the standard-normal covariance because
    ``K w = sqrt(2) vecs(Sigma)``.
    """
    alpha = check_alpha(alpha)
    if sigma is None:
        return v_covariance_standard(alpha, n)
    sigma = la.symmetrize(sigma)
    la.cholesky(sigma)
    k = transport_operator(sigma)
    s = la.vecs(sigma)
    out = d_eta(alpha, n) * k @ k.T + 2.0 * _rank_one_coef(alpha, n) * np.outer(s, s)
    return la.symmetrize(out)


def det_v_location_standard(alpha, n):
    return _ratio(check_alpha(alpha)) ** (n * (n + 2))


def det_v_covariance_standard(alpha, n):
    alpha = check_alpha(alpha)
    return (_ratio(alpha) ** (n * (n + 1) * (n + 4) / 2.0)
            * (1.0 + n * alpha**2 / (2.0 * (alpha + 1.0) ** 2)))


def are(alpha, n):
    """Asymptotic relative efficiency of ``(mu_hat, vecs Sigma_hat)`` w.r.t. the MLE.

    Independent of the true ``mu`` and ``Sigma``.
    """
    alpha = check_alpha(alpha)
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    exponent = (n * n + 7 * n + 8) / (n + 3)
    spread = (1.0 + n * alpha**2 / (2.0 * (alpha + 1.0) ** 2)) ** (2.0 / (n * (n + 3)))
    return 1.0 / (_ratio(alpha) ** exponent * spread)


def _weights_map(theta, n, lam):
    return optimal_weights(ModelParams(theta[:n], la.unvecs(theta[n:], n)), lam)


def _jacobian(theta, n, lam):
    cols = []
    for i in range(theta.size):
        h = 1e-6 * (1.0 + abs(theta[i]))
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        cols.append((_weights_map(up, n, lam) - _weights_map(down, n, lam)) / (2 * h))
    return np.column_stack(cols)


def v_weights(params, lam, alpha):
    """Delta-method asymptotic covariance of the plug-in optimal weights.

    The Jacobian of the weight map with respect to ``(mu, vecs Sigma)`` is
    taken by central differences.
    """
    n = params.n
    if n < 2:
        raise ValueError("weight covariance needs at least two assets")
    theta = np.concatenate([params.mu, la.vecs(params.sigma)])
    jac = _jacobian(theta, n, lam)
    v_theta = sla.block_diag(v_location(alpha, n, params.sigma),
                             v_covariance(alpha, n, params.sigma))
    return la.symmetrize(jac @ v_theta @ jac.T)


@dataclass(frozen=True, eq=False)
class AsymptoticReport:
    v_mu: np.ndarray
    v_sigma: np.ndarray
    are: float
    d_mu: float
    d_eta: float
    d_tau: float


def asymptotic_report(alpha, n, sigma=None):
    return AsymptoticReport(
        v_mu=v_location(alpha, n, sigma),
        v_sigma=v_covariance(alpha, n, sigma),
        are=are(alpha, n),
        d_mu=d_mu(alpha, n),
        d_eta=d_eta(alpha, n),
        d_tau=d_tau(alpha, n),
    )


@dataclass(frozen=True, eq=False)
class AreTable:
    """ARE values on an (N, alpha) grid; ``values[i, j]`` is for ``ns[i]``, ``alphas[j]``."""

    alphas: tuple
    ns: tuple
    values: np.ndarray


def are_table(alphas=(0.0, 0.1, 0.2, 0.5, 0.75, 1.0), n_max=10):
    alphas = tuple(check_alpha(a) for a in alphas)
    ns = tuple(range(1, n_max + 1))
    values = np.array([[are(a, n) for a in alphas] for n in ns])
    return AreTable(alphas, ns, values)
