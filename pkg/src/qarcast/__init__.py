"""
qarcast

Bootstrap prediction intervals for autoregressive AR(p) and quantile
autoregressive QAR(p) time series, with the Monte-Carlo coverage study and
rolling-window backtests used to evaluate them.
"""

from ._version import __version__

from .exceptions import (
    QarcastError,
    DataError,
    SeriesTooShort,
    NonFinite,
    EmptyInput,
    InsufficientDoF,
    NonMonotoneLabels,
    EmptyFile,
    ParseError,
    DomainError,
    MethodError,
    RankDeficient,
    NoConvergence,
    ConfigError,
)

from .qar_series import (
    TimeSeries,
    LaggedDesign,
    RngStream,
    InnovationLaw,
    build_design,
    empirical_quantile,
    inverse_cdf,
    draw_uniform,
    draw_standard_normal,
    draw_student_t,
    draw_chi_squared,
    draw_exponential_mean1,
)

from .qar_solver import (
    CheckLossProblem,
    CoefVector,
    check_loss,
    solve_weighted_qr,
    solve_qr,
    solve_qr_path,
)

from .qar_models import (
    ARFit,
    EmpiricalResidualDist,
    fit_ar_ls,
    fit_ar_quantile,
    residual_dist,
    predictive_residuals,
    predict_recursive,
    simulate_forward,
)

from .qar_intervals import (
    METHODS,
    MethodConfig,
    PredictionInterval,
    IntervalSample,
    bootstrap_sample,
    prediction_intervals,
    ar_perc,
    ar_proot,
    qar_perc,
    qar_proot,
    bj,
    ts,
    cb,
    prr,
    pp,
    x_method,
    oracle,
)

from .qar_dgp import DgpSpec, simulate_dgp, draw_true_futures

from .qar_simulate import (
    ExperimentConfig,
    CoverageReport,
    conditional_coverage,
    aggregate,
    run_experiment,
    load_experiment_config,
    sweep_phi,
    time_methods,
)

from .qar_backtest import BacktestConfig, BacktestReport, rwpoos

from .qar_io import load_series_csv, save_table

# Define what's available for import with "from qarcast import *"
__all__ = [
    '__version__',
    'QarcastError', 'DataError', 'SeriesTooShort', 'NonFinite', 'EmptyInput', 'InsufficientDoF',
    'NonMonotoneLabels', 'EmptyFile', 'ParseError', 'DomainError', 'MethodError', 'RankDeficient',
    'NoConvergence', 'ConfigError',
    'TimeSeries', 'LaggedDesign', 'RngStream', 'InnovationLaw', 'build_design', 'empirical_quantile',
    'inverse_cdf', 'draw_uniform', 'draw_standard_normal', 'draw_student_t', 'draw_chi_squared',
    'draw_exponential_mean1',
    'CheckLossProblem', 'CoefVector', 'check_loss', 'solve_weighted_qr', 'solve_qr', 'solve_qr_path',
    'ARFit', 'EmpiricalResidualDist', 'fit_ar_ls', 'fit_ar_quantile', 'residual_dist',
    'predictive_residuals', 'predict_recursive', 'simulate_forward',
    'METHODS', 'MethodConfig', 'PredictionInterval', 'IntervalSample', 'bootstrap_sample',
    'prediction_intervals', 'ar_perc', 'ar_proot', 'qar_perc', 'qar_proot', 'bj', 'ts', 'cb', 'prr',
    'pp', 'x_method', 'oracle',
    'DgpSpec', 'simulate_dgp', 'draw_true_futures',
    'ExperimentConfig', 'CoverageReport', 'conditional_coverage', 'aggregate', 'run_experiment',
    'load_experiment_config', 'sweep_phi', 'time_methods',
    'BacktestConfig', 'BacktestReport', 'rwpoos',
    'load_series_csv', 'save_table',
]
