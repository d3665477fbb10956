"""Robust mean-variance portfolio inputs from minimum pseudodistance estimation.

Typical use::

    from mpdport import EstimatorConfig, mpd_estimate, efficient_frontier

    est = mpd_estimate(returns, EstimatorConfig(alpha=0.2))
    frontier = efficient_frontier(est.params, lambdas)
"""
from .asymptotics import (
    AreTable,
    AsymptoticReport,
    are,
    are_table,
    asymptotic_report,
    v_covariance,
    v_location,
    v_weights,
    weight_funcs,
)
from .errors import (
    BisectionRangeExhausted,
    DataError,
    DegenerateWeights,
    DimensionMismatch,
    InfeasibleKKT,
    MPDError,
    NonFiniteValue,
    NotPositiveDefinite,
    NumericalError,
    ParseError,
    SingularScatter,
    TargetBelowMinimumVariance,
    TooFewRows,
)
from .estimators import Estimate, EstimatorConfig, mle, mpd_estimate, observation_weights, reweight_step
from .influence import DimResult, dim_measure, dim_series, if_covariance, if_location, if_weights
from .linalg import cholesky, mahalanobis_sq, vech, vecs
from .montecarlo import MseTable, SimulationScenario, mse_hat, run_study, sample_contaminated
from .portfolio import (
    FrontierPoint,
    PortfolioProblem,
    efficient_frontier,
    optimal_weights,
    optimal_weights_no_short,
    portfolio_for_variance,
    portfolio_stats,
)
from .pseudodistance import ModelParams, c_alpha, fixed_point_residual, objective, r_alpha_normals
from .reporting import ReturnsData, emit_report, load_returns, write_returns

__version__ = "0.1.0"
