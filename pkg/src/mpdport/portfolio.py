"""Markowitz mean-variance optimization.

Maximizes ``R(p) - lambda/2 S(p)`` with ``R(p) = p^t mu``, ``S(p) =
p^t Sigma p`` subject to ``sum(p) = 1`` and, optionally, ``p >= 0``.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import (
    BisectionRangeExhausted,
    InfeasibleKKT,
    TargetBelowMinimumVariance,
)
from .pseudodistance import ModelParams

__all__ = [
    "PortfolioProblem",
    "FrontierPoint",
    "optimal_weights",
    "optimal_weights_no_short",
    "portfolio_stats",
    "efficient_frontier",
    "portfolio_for_variance",
    "min_variance",
]

LAMBDA_RANGE = (1e-4, 1e6)


@dataclass(frozen=True)
class FrontierPoint:
    lam: float
    weights: np.ndarray
    expected_return: float
    variance: float


@dataclass(frozen=True)
class PortfolioProblem:
    params: ModelParams
    lam: float
    allow_short: bool = True

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"risk aversion must be positive, got {self.lam}")

    def solve(self):
        if self.allow_short:
            return optimal_weights(self.params, self.lam)
        return optimal_weights_no_short(self.params, self.lam)


def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0 or not math.isfinite(lam):
        raise ValueError(f"risk aversion must be positive and finite, got {lam}")
    return lam


def _closed_form(mu, sigma, lam):
    """Closed-form weights and the budget multiplier ``eta``."""
    chol = linalg.cho_factor(sigma, lower=True)
    s_mu = linalg.cho_solve(chol, mu)
    s_e = linalg.cho_solve(chol, np.ones_like(mu))
    eta = (s_mu.sum() - lam) / s_e.sum()
    return (s_mu - eta * s_e) / lam, eta


def optimal_weights(params, lam):
    """Weights ``Sigma^{-1}(mu - eta e) / lambda`` with short selling allowed."""
    lam = _check_lambda(lam)
    p, _ = _closed_form(params.mu, params.sigma, lam)
    return p


def optimal_weights_no_short(params, lam, *, max_iter=None):
    """Long-only mean-variance weights by a primal active-set method.

    The working set holds the assets pinned at zero.  Each pass solves the
    closed form on the remaining assets, steps towards it until a weight hits
    zero (that asset joins the working set), and once the step is complete
    releases the pinned asset whose reduced gradient most exceeds the budget
    multiplier.  The result is checked against the KKT conditions.
    """
    lam = _check_lambda(lam)
    mu, sigma = params.mu, params.sigma
    n = mu.size
    if n == 1:
        return np.ones(1)
    max_iter = max_iter or 50 * n
    scale = max(1.0, np.max(np.abs(mu)), lam * np.max(np.abs(sigma)))
    tol = 1e-12 * scale

    p = np.full(n, 1.0 / n)
    free = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        target = np.zeros(n)
        target[free], eta = _closed_form(mu[free], sigma[np.ix_(free, free)], lam)
        step = target - p
        if np.max(np.abs(step)) > 1e-14:
            shrinking = free & (step < 0)
            ratios = np.full(n, np.inf)
            ratios[shrinking] = -p[shrinking] / step[shrinking]
            blocking = int(np.argmin(ratios))
            if ratios[blocking] < 1.0:
                p = p + ratios[blocking] * step
                p[blocking] = 0.0
                free[blocking] = False
                continue
            p = target
        reduced = mu - lam * sigma @ p - eta
        reduced[free] = -np.inf
        worst = int(np.argmax(reduced))
        if reduced[worst] > tol:
            free[worst] = True
            continue
        break

    p = np.clip(p, 0.0, None)
    p /= p.sum()
    _verify_kkt(p, mu, sigma, lam, tol=1e-9 * scale)
    return p


def _verify_kkt(p, mu, sigma, lam, tol):
    grad = mu - lam * sigma @ p
    free = p > 1e-12
    kappa = np.mean(grad[free])
    if (np.max(np.abs(grad[free] - kappa)) > tol
            or np.any(grad[~free] > kappa + tol)
            or abs(p.sum() - 1.0) > 1e-10):
        raise InfeasibleKKT("active-set solution violates the KKT conditions")


def portfolio_stats(weights, params):
    """Expected return ``p^t mu`` and variance ``p^t Sigma p``."""
    p = np.asarray(weights, dtype=float)
    return float(p @ params.mu), float(p @ params.sigma @ p)


def _point(params, lam, allow_short):
    p = PortfolioProblem(params, lam, allow_short).solve()
    r, s = portfolio_stats(p, params)
    return FrontierPoint(float(lam), p, r, s)


def efficient_frontier(params, lambdas, allow_short=True):
    """One :class:`FrontierPoint` per risk aversion, sorted by lambda."""
    lambdas = sorted(_check_lambda(lam) for lam in lambdas)
    if not lambdas:
        raise ValueError("lambda grid is empty")
    return [_point(params, lam, allow_short) for lam in lambdas]


def min_variance(params, allow_short=True):
    """Global minimum-variance portfolio as a frontier point (lambda = inf)."""
    flat = ModelParams(np.zeros(params.n), params.sigma)
    if allow_short:
        p = optimal_weights(flat, 1.0)
    else:
        p = optimal_weights_no_short(flat, 1.0)
    r, s = portfolio_stats(p, params)
    return FrontierPoint(math.inf, p, r, s)


def portfolio_for_variance(params, target_variance, allow_short=True, rtol=1e-6):
    """Frontier portfolio whose variance equals `target_variance`.

    Bisects on ``log(lambda)`` over ``[1e-4, 1e6]``, relying on the variance
    being nonincreasing in lambda.
    """
    target = float(target_variance)
    floor = min_variance(params, allow_short).variance
    if not target > floor:
        raise TargetBelowMinimumVariance(
            f"target variance {target:.6g} is not above the minimum {floor:.6g}")
    lo, hi = (math.log(v) for v in LAMBDA_RANGE)
    hi_point = _point(params, math.exp(hi), allow_short)
    lo_point = _point(params, math.exp(lo), allow_short)
    for point in (lo_point, hi_point):
        if abs(point.variance - target) <= rtol * target:
            return point
    if not hi_point.variance < target < lo_point.variance:
        raise BisectionRangeExhausted(
            f"target variance {target:.6g} outside [{hi_point.variance:.6g}, "
            f"{lo_point.variance:.6g}] spanned by lambda in {LAMBDA_RANGE}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        point = _point(params, math.exp(mid), allow_short)
        if abs(point.variance - target) <= rtol * target:
            return point
        if point.variance > target:
            lo = mid
        else:
            hi = mid
    raise BisectionRangeExhausted("bisection did not reach the requested tolerance")
