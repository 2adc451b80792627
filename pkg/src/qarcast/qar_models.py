"""
AR / QAR model engine

Least-squares and quantile fits of the lagged design, residual
distributions (ordinary, rescaled-centered, predictive) and the forward
recursions used for point prediction and bootstrap path simulation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError, InsufficientDoF
from .qar_series import LaggedDesign, RngLike, as_generator, as_series, build_design
from .qar_solver import CheckLossProblem, CoefVector, check_full_rank, solve_weighted_qr

logger = logging.getLogger(__name__)

ESTIMATORS = ("least_squares", "quantile")
RESIDUAL_KINDS = ("ordinary", "rescaled_centered", "predictive")
LOO_MODES = ("full", "row")


@dataclass(frozen=True)
class ARFit:
    """A fitted AR(p) model and its residuals on the lagged design."""

    coefs: CoefVector
    residuals: np.ndarray
    estimator: str
    p: int
    design: LaggedDesign
    tau: Optional[float] = None

    @property
    def n_rows(self) -> int:
        return int(self.residuals.size)


@dataclass(frozen=True)
class EmpiricalResidualDist:
    """Equal-weight atoms that bootstrap errors are resampled from."""

    atoms: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in RESIDUAL_KINDS:
            raise DomainError(f"unknown residual kind '{self.kind}'")
        object.__setattr__(self, "atoms", np.asarray(self.atoms, dtype=float).reshape(-1))

    def sample(self, rng: RngLike, size) -> np.ndarray:
        """Draw atoms uniformly at random, with replacement."""
        idx = as_generator(rng).integers(0, self.atoms.size, size=size)
        return self.atoms[idx]


# ---------------------------------------------------------------------- #
# Fitting
# ---------------------------------------------------------------------- #
def _ls_coefs(design: LaggedDesign) -> np.ndarray:
    return np.linalg.lstsq(design.regressors, design.responses, rcond=None)[0]


def fit_design_ls(design: LaggedDesign) -> ARFit:
    check_full_rank(design.regressors)
    coefs = CoefVector(_ls_coefs(design))
    residuals = design.responses - design.regressors @ coefs.coefs
    return ARFit(coefs, residuals, "least_squares", design.p, design)


def fit_design_quantile(design: LaggedDesign, tau: float, weights=None, check_rank: bool = True) -> ARFit:
    problem = CheckLossProblem.from_design(design, tau, weights)
    coefs = solve_weighted_qr(problem, check_rank=check_rank)
    residuals = design.responses - design.regressors @ coefs.coefs
    return ARFit(coefs, residuals, "quantile", design.p, design, tau)


def fit_ar_ls(series, p: int) -> ARFit:
    """Least-squares AR(p) fit with intercept."""
    return fit_design_ls(build_design(as_series(series), p))


def fit_ar_quantile(series, p: int, tau: float) -> ARFit:
    """Quantile AR(p) fit at order ``tau``; residuals are Y_t - phi' Z_{t,p}."""
    return fit_design_quantile(build_design(as_series(series), p), tau)


# ---------------------------------------------------------------------- #
# Residual distributions
# ---------------------------------------------------------------------- #
def rescale_factor(n_rows: int, p: int) -> float:
    dof = n_rows - (p + 1)
    if dof <= 0:
        raise InsufficientDoF(f"{n_rows} residuals leave no degrees of freedom for {p + 1} coefficients")
    return float(np.sqrt(n_rows / dof))


def residual_dist(fit: ARFit, kind: str = "ordinary") -> EmpiricalResidualDist:
    """Empirical residual distribution of a fit.

    ``ordinary`` keeps the raw residuals; ``rescaled_centered`` multiplies them
    by sqrt((n-p)/(n-p-(p+1))) and removes their mean.
    """
    if kind == "ordinary":
        return EmpiricalResidualDist(fit.residuals.copy(), "ordinary")
    if kind == "rescaled_centered":
        scaled = fit.residuals * rescale_factor(fit.n_rows, fit.p)
        return EmpiricalResidualDist(scaled - scaled.mean(), "rescaled_centered")
    raise DomainError(f"residual_dist supports 'ordinary' and 'rescaled_centered', got '{kind}'")


def loo_rows(n_rows: int, i: int, p: int, loo: str) -> np.ndarray:
    """Boolean mask of the design rows kept when observation of row ``i`` is left out.

    With ``loo='full'`` every row containing that observation (as response or
    any lag) is dropped, i.e. rows i..i+p; ``loo='row'`` drops row i only.
    """
    keep = np.ones(n_rows, dtype=bool)
    if loo == "full":
        keep[i:min(i + p + 1, n_rows)] = False
    elif loo == "row":
        keep[i] = False
    else:
        raise DomainError(f"loo must be one of {LOO_MODES}, got '{loo}'")
    return keep


def predictive_residuals(series, p: int, tau: float = 0.5, estimator: str = "quantile",
                         loo: str = "full") -> EmpiricalResidualDist:
    """Leave-one-out (predictive) residuals Y_t - Yhat_t, t = p+1..n.

    Args:
        series: Observed series.
        p: Lag order.
        tau: Quantile order of the refits (ignored for least squares).
        estimator: 'quantile' or 'least_squares'.
        loo: 'full' drops every row involving Y_t, 'row' drops only row t.

    Raises:
        InsufficientDoF: when the reduced designs cannot identify p+1 coefficients.
    """
    if estimator not in ESTIMATORS:
        raise DomainError(f"unknown estimator '{estimator}'")
    design = build_design(as_series(series), p)
    m, q = design.n_rows, design.n_cols
    removed = p + 1 if loo == "full" else 1
    if m - removed < q:
        raise InsufficientDoF(
            f"{m} design rows leave {m - removed} after deletion, fewer than {q} coefficients"
        )
    check_full_rank(design.regressors)

    if estimator == "least_squares" and loo == "row":
        # delete-one regression residuals via leverages
        fit = fit_design_ls(design)
        Q = np.linalg.qr(design.regressors)[0]
        leverage = np.einsum("ij,ij->i", Q, Q)
        atoms = fit.residuals / (1.0 - leverage)
        return EmpiricalResidualDist(atoms, "predictive")

    atoms = np.empty(m)
    for i in range(m):
        reduced = design.subset(loo_rows(m, i, p, loo))
        if estimator == "quantile":
            coefs = fit_design_quantile(reduced, tau).coefs.coefs
        else:
            coefs = fit_design_ls(reduced).coefs.coefs
        atoms[i] = design.responses[i] - design.regressors[i] @ coefs
    return EmpiricalResidualDist(atoms, "predictive")


# ---------------------------------------------------------------------- #
# Recursions
# ---------------------------------------------------------------------- #
def recurse_paths(history, coefs, innovations) -> np.ndarray:
    """Run Y_{n+j} = c_0 + sum_i c_i Y_{n+j-i} + e_{n+j} forward for many paths.

    Args:
        history: Last p observations in time order, shape (p,).
        coefs: (p+1,) shared coefficients, (B, p+1) per path, or
            (B, k, p+1) per path and step (quantile autoregression).
        innovations: (B, k) additive terms.

    Returns:
        np.ndarray: (B, k) simulated values.
    """
    history = np.asarray(history, dtype=float).reshape(-1)
    e = np.atleast_2d(np.asarray(innovations, dtype=float))
    n_paths, k = e.shape
    c = np.asarray(coefs, dtype=float)
    p = c.shape[-1] - 1
    if history.size != p:
        raise DomainError(f"history has {history.size} values, coefficients need {p}")

    if c.ndim == 1:
        c = np.broadcast_to(c, (n_paths, k, p + 1))
    elif c.ndim == 2:
        c = np.broadcast_to(c[:, None, :], (n_paths, k, p + 1))

    # state columns hold (Y_{t-1}, ..., Y_{t-p}) for every path
    state = np.broadcast_to(history[::-1], (n_paths, p)).copy()
    out = np.empty((n_paths, k))
    for j in range(k):
        step = c[:, j, 0] + np.einsum("bi,bi->b", c[:, j, 1:], state) + e[:, j]
        out[:, j] = step
        if p:
            state[:, 1:] = state[:, :-1]
            state[:, 0] = step
    return out


def predict_recursive(history, coefs, k: int) -> np.ndarray:
    """Point predictions Yhat_{n+1..n+k} with observed values as initial lags."""
    c = coefs.coefs if isinstance(coefs, CoefVector) else np.asarray(coefs, dtype=float)
    return recurse_paths(history, c, np.zeros((1, int(k))))[0]


def simulate_forward(history, coefs, innovations) -> np.ndarray:
    """One future path with additive innovations e_{n+1..n+k}."""
    c = coefs.coefs if isinstance(coefs, CoefVector) else np.asarray(coefs, dtype=float)
    e = np.asarray(innovations, dtype=float).reshape(1, -1)
    return recurse_paths(history, c, e)[0]


def ma_weights(coefs, k: int) -> np.ndarray:
    """First k moving-average weights psi_0..psi_{k-1} of the fitted AR polynomial."""
    c = coefs.coefs if isinstance(coefs, CoefVector) else np.asarray(coefs, dtype=float)
    phi = c[1:]
    psi = np.zeros(k)
    psi[0] = 1.0
    for j in range(1, k):
        lags = min(j, phi.size)
        psi[j] = sum(phi[i] * psi[j - 1 - i] for i in range(lags))
    return psi
