"""
Prediction Interval Methods

Bootstrap and Gaussian prediction intervals for AR(p) and QAR(p) series:

- multiplier-bootstrap methods: ar-perc, ar-proot, qar-perc, qar-proot
- competitors: bj, ts, cb, prr, prr-lad, pp, x
- the oracle benchmark (simulation only, needs the true model)

Every method builds one ``IntervalSample`` covering horizons 1..k; intervals
for any number of nominal levels are then read off that same sample.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import stats

from .exceptions import DomainError, InsufficientDoF, MethodError, RankDeficient
from .qar_dgp import DgpSpec, draw_future_paths
from .qar_models import (
    ARFit,
    EmpiricalResidualDist,
    fit_design_ls,
    fit_design_quantile,
    ma_weights,
    predict_recursive,
    predictive_residuals,
    recurse_paths,
    residual_dist,
)
from .qar_series import (
    RngStream,
    as_series,
    build_design,
    empirical_quantiles,
    lag_vector,
)
from .qar_solver import CheckLossProblem, check_full_rank, solve_qr_path, solve_weighted_qr

logger = logging.getLogger(__name__)

AR_METHODS = ("bj", "ts", "cb", "prr", "prr-lad", "pp", "ar-perc", "ar-proot")
QAR_METHODS = ("x", "qar-perc", "qar-proot")
METHODS = AR_METHODS + QAR_METHODS + ("oracle",)
BOOTSTRAP_FREE = ("bj",)
MULTIPLIER_LAWS = ("exponential", "lognormal")

# Defaults shared by the library, the experiment driver and the CLI help text.
METHOD_DEFAULTS = {
    "p": 1,
    "tau": 0.5,
    "tau0": 0.5,
    "B_ar": 1000,
    "B_qar": 5000,
    "level": 0.95,
    "multiplier": "exponential",
    "loo": "full",
    "oracle_draws": 10000,
}


def normalize_method(tag: str) -> str:
    """Map 'AR_PERC', 'ar_perc' or 'ar-perc' onto the kebab-case tag."""
    key = str(tag).strip().lower().replace("_", "-")
    if key not in METHODS:
        raise DomainError(f"unknown method '{tag}'; expected one of {', '.join(METHODS)}")
    return key


def min_replications(level: float) -> int:
    return math.ceil(2.0 / (1.0 - level) - 1e-9)


@dataclass(frozen=True)
class MethodConfig:
    """Method tag plus every tuning knob an interval method reads."""

    method: str
    p: int = METHOD_DEFAULTS["p"]
    tau: float = METHOD_DEFAULTS["tau"]
    tau0: float = METHOD_DEFAULTS["tau0"]
    B: Optional[int] = None
    level: float = METHOD_DEFAULTS["level"]
    multiplier: str = METHOD_DEFAULTS["multiplier"]
    loo: str = METHOD_DEFAULTS["loo"]
    oracle_draws: int = METHOD_DEFAULTS["oracle_draws"]
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "method", normalize_method(self.method))
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p}")
        for name in ("tau", "tau0"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {value}")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level}")
        if self.multiplier not in MULTIPLIER_LAWS:
            raise DomainError(f"multiplier must be one of {MULTIPLIER_LAWS}, got '{self.multiplier}'")
        if self.loo not in ("full", "row"):
            raise DomainError(f"loo must be 'full' or 'row', got '{self.loo}'")
        if self.method not in BOOTSTRAP_FREE:
            self.check_replications(self.level)

    @property
    def replications(self) -> int:
        if self.method == "oracle":
            return int(self.oracle_draws)
        if self.B is not None:
            return int(self.B)
        return METHOD_DEFAULTS["B_qar"] if self.method in QAR_METHODS else METHOD_DEFAULTS["B_ar"]

    def check_replications(self, level: float) -> None:
        needed = min_replications(level)
        if self.replications < needed:
            raise DomainError(
                f"{self.method}: B={self.replications} is too small for level {level} (need >= {needed})"
            )

    def with_options(self, **changes) -> "MethodConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class PredictionInterval:
    lower: float
    upper: float
    horizon: int
    level: float
    method: str
    point: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise MethodError(f"{self.method}: non-finite interval bound at horizon {self.horizon}")
        if self.lower > self.upper:
            raise MethodError(f"{self.method}: lower bound exceeds upper bound")

    @property
    def length(self) -> float:
        return float(self.upper - self.lower)

    def contains(self, value) -> np.ndarray:
        """Strict containment L < y < U; a zero-width interval covers only its own value."""
        y = np.asarray(value, dtype=float)
        if self.lower == self.upper:
            return y == self.lower
        return (y > self.lower) & (y < self.upper)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "horizon": self.horizon,
            "level": self.level,
            "point": self.point,
            "lower": self.lower,
            "upper": self.upper,
            "length": self.length,
        }


@dataclass
class IntervalSample:
    """Bootstrap output of one method run, shared by every nominal level.

    ``kind`` is 'percentile' (values are simulated Y*_{n+j}), 'root' (values
    are predictive roots, re-anchored at ``point``) or 'gaussian' (``scale``
    holds the standard deviation of the forecast error per horizon).
    """

    method: str
    kind: str
    point: np.ndarray
    values: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None
    estimation_part: Optional[np.ndarray] = None
    innovation_part: Optional[np.ndarray] = None
    info: Dict[str, float] = field(default_factory=dict)

    @property
    def horizons(self) -> int:
        return int(self.point.size)

    def intervals(self, levels: Sequence[float]) -> List[PredictionInterval]:
        """Equal-tailed intervals for every level (outer) and horizon (inner)."""
        out = []
        for level in levels:
            alpha = 1.0 - level
            if self.kind == "gaussian":
                z = stats.norm.ppf(1.0 - alpha / 2.0)
                lower = self.point - z * self.scale
                upper = self.point + z * self.scale
            else:
                q = empirical_quantiles(self.values, [alpha / 2.0, 1.0 - alpha / 2.0])
                anchor = self.point if self.kind == "root" else 0.0
                lower, upper = anchor + q[0], anchor + q[1]
            for j in range(self.horizons):
                out.append(PredictionInterval(float(lower[j]), float(upper[j]), j + 1, level,
                                              self.method, float(self.point[j])))
        return out


# ---------------------------------------------------------------------- #
# Random inputs
# ---------------------------------------------------------------------- #
def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"interval methods need an RngStream or an integer seed, got {type(rng).__name__}")


def draw_multipliers(law: str, rng, size) -> np.ndarray:
    """Positive multipliers with E(w) = 1 and E(w^2) = 2."""
    gen = as_stream(rng).generator()
    if law == "exponential":
        return gen.exponential(1.0, size)
    if law == "lognormal":
        sigma2 = math.log(2.0)
        return gen.lognormal(-sigma2 / 2.0, math.sqrt(sigma2), size)
    raise DomainError(f"unknown multiplier law '{law}'")


def _open_uniforms(rng, size) -> np.ndarray:
    u = as_stream(rng).generator().random(size)
    return np.where(u == 0.0, 2.0 ** -54, u)


def _weighted_fits(design, tau, multipliers) -> np.ndarray:
    """One multiplier-weighted quantile fit per row of ``multipliers``."""
    out = np.empty((multipliers.shape[0], design.n_cols))
    for b, w in enumerate(multipliers):
        problem = CheckLossProblem(design.responses, design.regressors, tau, w)
        out[b] = solve_weighted_qr(problem, check_rank=False).coefs
    return out


def _quantile_process(design, uniforms, multipliers=None) -> np.ndarray:
    """(B, k, p+1) fits at orders U*_{b,j}; row b uses weights multipliers[b] (unweighted if None)."""
    n_rep, k = uniforms.shape
    if multipliers is None:
        flat = solve_qr_path(design, uniforms.reshape(-1), check_rank=False)
        return flat.reshape(n_rep, k, design.n_cols)
    out = np.empty((n_rep, k, design.n_cols))
    for b in range(n_rep):
        out[b] = solve_qr_path(design, uniforms[b], weights=multipliers[b], check_rank=False)
    return out


def _count_explosive(coefs: np.ndarray) -> int:
    if not logger.isEnabledFor(logging.DEBUG):
        return 0
    count = 0
    for c in np.atleast_2d(coefs):
        roots = np.roots(np.concatenate([[1.0], -c[1:]]))
        if roots.size and np.max(np.abs(roots)) >= 1.0:
            count += 1
    return count


def _ls_refits(series_matrix: np.ndarray, p: int) -> np.ndarray:
    """Least-squares AR(p) coefficients for each bootstrap series (one per row)."""
    out = np.empty((series_matrix.shape[0], p + 1))
    for b, y in enumerate(series_matrix):
        design = build_design(y, p)
        coefs, _, rank, _ = np.linalg.lstsq(design.regressors, design.responses, rcond=None)
        if rank < p + 1:
            raise RankDeficient("bootstrap series produced a collinear design")
        out[b] = coefs
    return out


def _lad_refits(series_matrix: np.ndarray, p: int, tau: float = 0.5) -> np.ndarray:
    out = np.empty((series_matrix.shape[0], p + 1))
    for b, y in enumerate(series_matrix):
        out[b] = fit_design_quantile(build_design(y, p), tau).coefs.coefs
    return out


def _forward_series(observed: np.ndarray, p: int, coefs, errors: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Forward bootstrap series of the observed length, each seeded by p consecutive observations."""
    n = observed.size
    out = np.empty((errors.shape[0], n))
    for b, s in enumerate(starts):
        init = observed[s:s + p]
        out[b, :p] = init
        out[b, p:] = recurse_paths(init, coefs, errors[b:b + 1])[0]
    return out


# ---------------------------------------------------------------------- #
# Multiplier-bootstrap methods (pure cores)
# ---------------------------------------------------------------------- #
def ar_perc_sample(fit: ARFit, history, multipliers, errors) -> IntervalSample:
    """Percentile sample: Y*_{n+j} from multiplier-refitted coefficients plus resampled errors."""
    coef_star = _weighted_fits(fit.design, fit.tau, np.atleast_2d(multipliers))
    paths = recurse_paths(history, coef_star, errors)
    point = predict_recursive(history, fit.coefs, paths.shape[1])
    return IntervalSample("ar-perc", "percentile", point, values=paths,
                          info={"explosive": _count_explosive(coef_star)})


def ar_proot_sample(fit: ARFit, history, multipliers, errors) -> IntervalSample:
    """Predictive-root sample: future with the original fit, prediction with the refit."""
    coef_star = _weighted_fits(fit.design, fit.tau, np.atleast_2d(multipliers))
    errors = np.atleast_2d(errors)
    predicted = recurse_paths(history, coef_star, np.zeros_like(errors))
    future = recurse_paths(history, fit.coefs.coefs, errors)
    point = predict_recursive(history, fit.coefs, errors.shape[1])
    z = lag_vector(history)
    return IntervalSample(
        "ar-proot", "root", point, values=future - predicted,
        estimation_part=(fit.coefs.coefs - coef_star) @ z,
        innovation_part=errors[:, 0].copy(),
        info={"explosive": _count_explosive(coef_star)},
    )


def qar_perc_sample(design, history, uniforms, multipliers=None, point=None,
                    method: str = "qar-perc") -> IntervalSample:
    """Percentile sample of the quantile autoregression.

    Each replication fits the model at U*_{n+1..n+k} with one shared
    multiplier vector; ``multipliers=None`` gives unweighted fits.
    """
    uniforms = np.atleast_2d(uniforms)
    coefs = _quantile_process(design, uniforms,
                              None if multipliers is None else np.atleast_2d(multipliers))
    paths = recurse_paths(history, coefs, np.zeros_like(uniforms))
    if point is None:
        point = np.median(paths, axis=0)
    return IntervalSample(method, "percentile", np.asarray(point, dtype=float), values=paths)


def qar_proot_sample(design, history, tau0: float, uniforms, multipliers) -> IntervalSample:
    """Predictive-root sample of the quantile autoregression anchored at order tau0."""
    uniforms = np.atleast_2d(uniforms)
    fit0 = fit_design_quantile(design, tau0, check_rank=False).coefs.coefs
    coef_star = _weighted_fits(design, tau0, np.atleast_2d(multipliers))
    zeros = np.zeros_like(uniforms)
    predicted = recurse_paths(history, coef_star, zeros)
    coefs_u = _quantile_process(design, uniforms)
    future = recurse_paths(history, coefs_u, zeros)
    point = predict_recursive(history, fit0, uniforms.shape[1])
    z = lag_vector(history)
    return IntervalSample(
        "qar-proot", "root", point, values=future - predicted,
        estimation_part=(fit0 - coef_star) @ z,
        innovation_part=(coefs_u[:, 0, :] - fit0) @ z,
    )


# ---------------------------------------------------------------------- #
# Public method entry points
# ---------------------------------------------------------------------- #
def _prepare(series, cfg: MethodConfig):
    series = as_series(series)
    design = build_design(series, cfg.p)
    check_full_rank(design.regressors)
    return series, design, series.tail(cfg.p)


def _multiplier_matrix(cfg, rng: RngStream, rows: int) -> np.ndarray:
    return draw_multipliers(cfg.multiplier, rng.child("multipliers"), (cfg.replications, rows))


def bootstrap_ar_perc(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    rng = as_stream(rng)
    series, design, history = _prepare(series, cfg)
    fit = fit_design_quantile(design, cfg.tau, check_rank=False)
    errors = residual_dist(fit, "ordinary").sample(rng.child("innovations"), (cfg.replications, k))
    return ar_perc_sample(fit, history, _multiplier_matrix(cfg, rng, design.n_rows), errors)


def bootstrap_ar_proot(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    rng = as_stream(rng)
    series, design, history = _prepare(series, cfg)
    fit = fit_design_quantile(design, cfg.tau, check_rank=False)
    dist = predictive_residuals(series, cfg.p, cfg.tau, "quantile", cfg.loo)
    errors = dist.sample(rng.child("innovations"), (cfg.replications, k))
    return ar_proot_sample(fit, history, _multiplier_matrix(cfg, rng, design.n_rows), errors)


def bootstrap_qar_perc(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    rng = as_stream(rng)
    series, design, history = _prepare(series, cfg)
    uniforms = _open_uniforms(rng.child("uniforms"), (cfg.replications, k))
    point = predict_recursive(history, fit_design_quantile(design, cfg.tau0, check_rank=False).coefs, k)
    return qar_perc_sample(design, history, uniforms, _multiplier_matrix(cfg, rng, design.n_rows), point)


def bootstrap_x(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    rng = as_stream(rng)
    series, design, history = _prepare(series, cfg)
    uniforms = _open_uniforms(rng.child("uniforms"), (cfg.replications, k))
    point = predict_recursive(history, fit_design_quantile(design, cfg.tau0, check_rank=False).coefs, k)
    return qar_perc_sample(design, history, uniforms, None, point, method="x")


def bootstrap_qar_proot(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    rng = as_stream(rng)
    series, design, history = _prepare(series, cfg)
    uniforms = _open_uniforms(rng.child("uniforms"), (cfg.replications, k))
    return qar_proot_sample(design, history, cfg.tau0, uniforms,
                            _multiplier_matrix(cfg, rng, design.n_rows))


def gaussian_bj(series, cfg: MethodConfig, rng=None, k: int = 1) -> IntervalSample:
    """Box-Jenkins interval: LS point prediction +- z * sigma * sqrt(sum psi_j^2)."""
    series = as_series(series)
    design = build_design(series, cfg.p)
    try:
        fit = fit_design_ls(design)
        coefs = fit.coefs.coefs
        residuals = fit.residuals
    except RankDeficient:
        # An exactly fitted degenerate design (e.g. a constant series) still
        # has well defined predictions and zero residual variance.
        values = design.series_values()
        if np.ptp(values) == 0.0:
            coefs = np.zeros(design.n_cols)
            coefs[0] = values[0]
            residuals = np.zeros(design.n_rows)
        else:
            coefs = np.linalg.lstsq(design.regressors, design.responses, rcond=None)[0]
            residuals = design.responses - design.regressors @ coefs
            scale = max(1.0, float(np.max(np.abs(design.responses))))
            if np.max(np.abs(residuals)) > 1e-10 * scale:
                raise
        logger.warning("bj: collinear design fitted exactly; interval has zero width")
    dof = design.n_rows - design.n_cols
    if dof <= 0:
        raise InsufficientDoF(f"bj: {design.n_rows} rows leave no residual degrees of freedom")
    sigma = math.sqrt(float(residuals @ residuals) / dof)
    history = series.tail(cfg.p)
    point = predict_recursive(history, coefs, k)
    psi = ma_weights(coefs, k)
    return IntervalSample("bj", "gaussian", point, scale=sigma * np.sqrt(np.cumsum(psi ** 2)),
                          info={"sigma": sigma})


def bootstrap_cb(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    """Future paths from the single LS fit with resampled rescaled residuals."""
    rng = as_stream(rng)
    series = as_series(series)
    fit = fit_design_ls(build_design(series, cfg.p))
    history = series.tail(cfg.p)
    errors = residual_dist(fit, "rescaled_centered").sample(rng.child("innovations"), (cfg.replications, k))
    paths = recurse_paths(history, fit.coefs.coefs, errors)
    return IntervalSample("cb", "percentile", predict_recursive(history, fit.coefs, k), values=paths)


def bootstrap_ts(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    """Backward bootstrap: regenerate the past from the fixed last p values, refit by LS."""
    rng = as_stream(rng)
    series = as_series(series)
    y, p, n_rep = series.values, cfg.p, cfg.replications
    fwd = fit_design_ls(build_design(series, p))
    bwd = fit_design_ls(build_design(y[::-1], p))
    bwd_errors = residual_dist(bwd, "rescaled_centered").sample(rng.child("series"), (n_rep, y.size - p))

    reversed_tail = y[::-1][:p]
    past = recurse_paths(reversed_tail, bwd.coefs.coefs, bwd_errors)
    boot_series = np.hstack([np.broadcast_to(reversed_tail, (n_rep, p)), past])[:, ::-1]
    coef_star = _ls_refits(boot_series, p)

    history = series.tail(p)
    errors = residual_dist(fwd, "rescaled_centered").sample(rng.child("innovations"), (n_rep, k))
    paths = recurse_paths(history, coef_star, errors)
    return IntervalSample("ts", "percentile", predict_recursive(history, fwd.coefs, k), values=paths,
                          info={"explosive": _count_explosive(coef_star)})


def bootstrap_prr(series, cfg: MethodConfig, rng, k: int = 1, estimator: str = "LS") -> IntervalSample:
    """Forward bootstrap: regenerate a series to refit coefficients, then simulate futures."""
    rng = as_stream(rng)
    series = as_series(series)
    y, p, n_rep = series.values, cfg.p, cfg.replications
    design = build_design(series, p)
    if estimator == "LS":
        fit, method = fit_design_ls(design), "prr"
    elif estimator == "LAD":
        fit, method = fit_design_quantile(design, 0.5), "prr-lad"
    else:
        raise DomainError(f"estimator must be 'LS' or 'LAD', got '{estimator}'")
    dist = residual_dist(fit, "rescaled_centered")

    series_rng = rng.child("series")
    starts = series_rng.child("starts").generator().integers(0, y.size - p + 1, size=n_rep)
    boot_series = _forward_series(y, p, fit.coefs.coefs, dist.sample(series_rng, (n_rep, y.size - p)), starts)
    coef_star = _ls_refits(boot_series, p) if estimator == "LS" else _lad_refits(boot_series, p)

    history = series.tail(p)
    paths = recurse_paths(history, coef_star, dist.sample(rng.child("innovations"), (n_rep, k)))
    return IntervalSample(method, "percentile", predict_recursive(history, fit.coefs, k), values=paths,
                          info={"explosive": _count_explosive(coef_star)})


def bootstrap_pp(series, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    """Forward bootstrap with predictive residuals and a predictive root."""
    rng = as_stream(rng)
    series = as_series(series)
    y, p, n_rep = series.values, cfg.p, cfg.replications
    fit = fit_design_ls(build_design(series, p))
    pred = predictive_residuals(series, p, estimator="least_squares", loo="row")
    dist = EmpiricalResidualDist(pred.atoms - pred.atoms.mean(), "predictive")

    series_rng = rng.child("series")
    starts = series_rng.child("starts").generator().integers(0, y.size - p + 1, size=n_rep)
    boot_series = _forward_series(y, p, fit.coefs.coefs, dist.sample(series_rng, (n_rep, y.size - p)), starts)
    coef_star = _ls_refits(boot_series, p)

    history = series.tail(p)
    errors = dist.sample(rng.child("innovations"), (n_rep, k))
    predicted = recurse_paths(history, coef_star, np.zeros_like(errors))
    future = recurse_paths(history, fit.coefs.coefs, errors)
    return IntervalSample("pp", "root", predict_recursive(history, fit.coefs, k), values=future - predicted)


def oracle_sample(history, true_model: DgpSpec, cfg: MethodConfig, rng, k: int = 1) -> IntervalSample:
    """Empirical quantiles of draws from the true process conditioned on the tail."""
    rng = as_stream(rng)
    paths = draw_future_paths(history, true_model, k, cfg.replications, rng.child("futures"))
    return IntervalSample("oracle", "percentile", np.median(paths, axis=0), values=paths)


# ---------------------------------------------------------------------- #
# Dispatch
# ---------------------------------------------------------------------- #
_BUILDERS: Dict[str, Callable] = {
    "bj": gaussian_bj,
    "ts": bootstrap_ts,
    "cb": bootstrap_cb,
    "prr": lambda s, c, r, k=1: bootstrap_prr(s, c, r, k, "LS"),
    "prr-lad": lambda s, c, r, k=1: bootstrap_prr(s, c, r, k, "LAD"),
    "pp": bootstrap_pp,
    "ar-perc": bootstrap_ar_perc,
    "ar-proot": bootstrap_ar_proot,
    "x": bootstrap_x,
    "qar-perc": bootstrap_qar_perc,
    "qar-proot": bootstrap_qar_proot,
}


def bootstrap_sample(series, cfg: MethodConfig, rng, k: int = 1,
                     true_model: Optional[DgpSpec] = None) -> IntervalSample:
    """Run the method named by ``cfg`` once for horizons 1..k.

    With ``rng=None`` the stream is seeded from ``cfg.seed``.
    """
    if rng is None and cfg.seed is not None:
        rng = RngStream(cfg.seed)
    if k < 1:
        raise DomainError("horizon k must be positive")
    if cfg.method == "oracle":
        if true_model is None:
            raise DomainError("oracle intervals need the true model")
        return oracle_sample(as_series(series).tail(true_model.p), true_model, cfg, rng, k)
    return _BUILDERS[cfg.method](series, cfg, rng, k)


def prediction_intervals(series, cfg: MethodConfig, rng, k: int = 1,
                         levels: Optional[Sequence[float]] = None,
                         true_model: Optional[DgpSpec] = None) -> List[PredictionInterval]:
    """Intervals for horizons 1..k at ``levels`` (default: cfg.level) from one bootstrap sample."""
    levels = [cfg.level] if levels is None else list(levels)
    if cfg.method not in BOOTSTRAP_FREE:
        for level in levels:
            cfg.check_replications(level)
    return bootstrap_sample(series, cfg, rng, k, true_model).intervals(levels)


def ar_perc(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="ar-perc"), rng, k)


def ar_proot(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="ar-proot"), rng, k)


def qar_perc(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="qar-perc"), rng, k)


def qar_proot(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="qar-proot"), rng, k)


def x_method(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="x"), rng, k)


def bj(series, cfg, k=1):
    return prediction_intervals(series, cfg.with_options(method="bj"), None, k)


def ts(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="ts"), rng, k)


def cb(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="cb"), rng, k)


def prr(series, cfg, rng, estimator="LS", k=1):
    if estimator not in ("LS", "LAD"):
        raise DomainError(f"estimator must be 'LS' or 'LAD', got '{estimator}'")
    method = "prr" if estimator == "LS" else "prr-lad"
    return prediction_intervals(series, cfg.with_options(method=method), rng, k)


def pp(series, cfg, rng, k=1):
    return prediction_intervals(series, cfg.with_options(method="pp"), rng, k)


def oracle(series_tail, true_model: DgpSpec, cfg, rng, k=1):
    return prediction_intervals(series_tail, cfg.with_options(method="oracle"), rng, k,
                                true_model=true_model)
