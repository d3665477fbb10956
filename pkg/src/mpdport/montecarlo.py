"""Contaminated-normal simulation study of estimator mean squared error.

Each replicate draws ``round(eps * T)`` rows from the contaminating normal
and the rest from the core normal, then fits every requested alpha on that
same sample.  Replicate ``r`` of a study seeded with ``s`` uses the
generator ``numpy.random.default_rng([s, r])`` so any replicate can be
reproduced on its own.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, MPDError
from .estimators import EstimatorConfig, mpd_estimate
from .pseudodistance import ModelParams, check_alpha

__all__ = [
    "SimulationScenario",
    "MseRow",
    "MseTable",
    "equicorrelated",
    "sample_contaminated",
    "mse_hat",
    "run_study",
]

DEFAULT_ALPHAS = (0.0, 0.1, 0.2, 0.5, 0.75, 1.0)


def equicorrelated(n, variance=1.0, covariance=0.2):
    return np.full((n, n), covariance) + (variance - covariance) * np.eye(n)


@dataclass(frozen=True, eq=False)
class SimulationScenario:
    n: int
    t: int
    eps: float
    core: ModelParams
    contaminant: ModelParams
    alphas: tuple = DEFAULT_ALPHAS
    n_s: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError(f"contamination fraction must lie in [0, 1), got {self.eps}")
        if self.n_s < 1:
            raise ValueError("need at least one replicate")
        if self.t < self.n + 1:
            raise ValueError(f"sample size {self.t} too small for dimension {self.n}")
        if self.core.n != self.n or self.contaminant.n != self.n:
            raise DimensionMismatch("model dimensions do not match n")
        object.__setattr__(self, "alphas", tuple(check_alpha(a) for a in self.alphas))

    @classmethod
    def standard(cls, n, t, eps, alphas=DEFAULT_ALPHAS, n_s=1000, seed=0,
                 covariance=0.2, shift=-4.0, inflation=4.0):
        """Core ``N(0, Sigma0)`` with unit variances and equal covariances,
        contaminant ``N(shift * 1, inflation * Sigma0)``."""
        sigma0 = equicorrelated(n, 1.0, covariance)
        return cls(
            n=n, t=t, eps=eps,
            core=ModelParams(np.zeros(n), sigma0),
            contaminant=ModelParams(np.full(n, float(shift)), inflation * sigma0),
            alphas=tuple(alphas), n_s=n_s, seed=seed,
        )

    @property
    def n_contaminated(self):
        return int(math.floor(self.eps * self.t + 0.5))


def sample_contaminated(scenario, replicate_index):
    rng = np.random.default_rng([int(scenario.seed), int(replicate_index)])
    k = scenario.n_contaminated
    n = scenario.n
    core = scenario.core.mu + rng.standard_normal((scenario.t - k, n)) @ scenario.core.chol.T
    bad = (scenario.contaminant.mu
           + rng.standard_normal((k, n)) @ scenario.contaminant.chol.T)
    return rng.permutation(np.vstack([core, bad]), axis=0)


def _stack(mu, sigma):
    return np.concatenate([np.ravel(mu), la.vech(sigma)])


def _squared_error(mu, sigma, truth_vec):
    diff = _stack(mu, sigma) - truth_vec
    return math.fsum(diff * diff)


def mse_hat(estimates, truth):
    """Average squared distance of ``(mu, vech Sigma)`` stacks from the truth.

    `estimates` may hold ``(mu, sigma)`` pairs or objects with ``mu`` and
    ``sigma`` attributes.
    """
    estimates = list(estimates)
    if not estimates:
        raise ValueError("need at least one estimate")
    truth_vec = _stack(truth.mu, truth.sigma)
    errors = []
    for est in estimates:
        mu, sigma = (est.mu, est.sigma) if hasattr(est, "mu") else est
        if np.shape(mu) != truth.mu.shape or np.shape(sigma) != truth.sigma.shape:
            raise DimensionMismatch("estimate and truth have different dimensions")
        errors.append(_squared_error(mu, sigma, truth_vec))
    return math.fsum(errors) / len(errors)


@dataclass(frozen=True)
class MseRow:
    n: int
    t: int
    eps: float
    alpha: float
    mse: float
    failures: int
    nonconverged: int = 0


@dataclass
class MseTable:
    rows: list = field(default_factory=list)

    def mse(self, alpha, n=None, t=None, eps=None):
        return self.row(alpha, n, t, eps).mse

    def row(self, alpha, n=None, t=None, eps=None):
        for r in self.rows:
            if (r.alpha == alpha and (n is None or r.n == n)
                    and (t is None or r.t == t) and (eps is None or r.eps == eps)):
                return r
        raise KeyError(f"no cell for alpha={alpha}, n={n}, t={t}, eps={eps}")

    def extend(self, other):
        self.rows.extend(other.rows)
        return self


def run_study(scenario, config=None,
              on_estimate: Optional[Callable] = None):
    """Estimate the MSE of the MPD estimator for every alpha of `scenario`.

    Parameters
    ----------
    scenario : SimulationScenario
    config : EstimatorConfig, optional
        Template for ``tol``, ``max_iter`` and ``init``; its alpha is replaced
        by each of ``scenario.alphas``.
    on_estimate : callable, optional
        Called as ``on_estimate(alpha, replicate_index, sample, estimate)``
        after every successful fit.

    Replicates whose fit raises are excluded from the cell average and
    counted in ``failures``; fits that stop at ``max_iter`` are kept and
    counted in ``nonconverged``.
    """
    template = config or EstimatorConfig()
    configs = {a: replace(template, alpha=a) for a in scenario.alphas}
    truth_vec = _stack(scenario.core.mu, scenario.core.sigma)
    errors = {a: [] for a in scenario.alphas}
    failures = dict.fromkeys(scenario.alphas, 0)
    nonconverged = dict.fromkeys(scenario.alphas, 0)

    for r in range(scenario.n_s):
        x = sample_contaminated(scenario, r)
        for a in scenario.alphas:
            try:
                est = mpd_estimate(x, configs[a])
            except MPDError:
                failures[a] += 1
                continue
            nonconverged[a] += not est.converged
            errors[a].append(_squared_error(est.mu, est.sigma, truth_vec))
            if on_estimate is not None:
                on_estimate(a, r, x, est)

    rows = []
    for a in scenario.alphas:
        mse = math.fsum(errors[a]) / len(errors[a]) if errors[a] else math.nan
        rows.append(MseRow(scenario.n, scenario.t, scenario.eps, a, mse,
                           failures[a], nonconverged[a]))
    return MseTable(rows)
