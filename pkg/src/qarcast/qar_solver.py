"""
Quantile Regression Solver

Exact minimization of the (optionally multiplier-weighted) check-loss
objective. The problem is written as the standard linear program with split
positive/negative residual parts and solved with the HiGHS dual simplex,
which returns a basic (vertex) solution. The vertex is then recomputed
exactly from its interpolated rows.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.optimize import linprog

from .exceptions import DomainError, NoConvergence, RankDeficient
from .qar_series import LaggedDesign

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


def check_loss(u, tau: float):
    """Quantile loss rho_tau(u) = u * (tau - I(u < 0)); works elementwise on arrays."""
    u_arr = np.asarray(u, dtype=float)
    out = u_arr * (tau - (u_arr < 0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class CoefVector:
    """Intercept plus lag coefficients (phi_0, phi_1, ..., phi_p) fitted at ``tau``."""

    coefs: np.ndarray
    tau: Optional[float] = None

    def __post_init__(self):
        coefs = np.asarray(self.coefs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(coefs)):
            raise NoConvergence("coefficient vector contains non-finite entries")
        object.__setattr__(self, "coefs", coefs)

    def __len__(self):
        return int(self.coefs.size)

    @property
    def p(self) -> int:
        return len(self) - 1

    @property
    def intercept(self) -> float:
        return float(self.coefs[0])

    @property
    def slopes(self) -> np.ndarray:
        return self.coefs[1:]


@dataclass(frozen=True)
class CheckLossProblem:
    """Weighted check-loss problem: argmin_phi sum_t w_t rho_tau(y_t - phi' x_t)."""

    responses: np.ndarray
    regressors: np.ndarray
    tau: float
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.responses, dtype=float).reshape(-1)
        X = np.asarray(self.regressors, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] != y.size:
            raise DomainError(f"{X.shape[0]} regressor rows for {y.size} responses")
        if not 0.0 < self.tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {self.tau}")
        w = np.ones(y.size) if self.weights is None else np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size != y.size:
            raise DomainError(f"{w.size} weights for {y.size} rows")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError("weights must be strictly positive and finite")
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "regressors", X)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_design(cls, design: LaggedDesign, tau: float, weights=None) -> "CheckLossProblem":
        return cls(design.responses, design.regressors, tau, weights)

    @property
    def n_rows(self) -> int:
        return int(self.responses.size)

    @property
    def n_cols(self) -> int:
        return int(self.regressors.shape[1])

    def residuals(self, coefs) -> np.ndarray:
        coefs = coefs.coefs if isinstance(coefs, CoefVector) else np.asarray(coefs, dtype=float)
        return self.responses - self.regressors @ coefs

    def objective(self, coefs) -> float:
        return float(np.dot(self.weights, check_loss(self.residuals(coefs), self.tau)))


def check_full_rank(regressors: np.ndarray, tol: float = RANK_TOLERANCE) -> None:
    """Raise RankDeficient unless the column-pivoted QR has a well separated diagonal."""
    X = np.asarray(regressors, dtype=float)
    if X.shape[0] < X.shape[1]:
        raise RankDeficient(f"{X.shape[0]} rows cannot identify {X.shape[1]} coefficients")
    r = scipy.linalg.qr(X, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0 or diag[-1] <= tol * diag[0]:
        raise RankDeficient("regressor columns are collinear")


def _vertex_from_rows(problem: CheckLossProblem, order: np.ndarray):
    """Solve exactly through the first linearly independent rows taken in ``order``.

    Returns:
        tuple: (coefficients, basis row indices), or (None, None).
    """
    X = problem.regressors
    q = problem.n_cols
    chosen = []
    for idx in order:
        candidate = chosen + [int(idx)]
        if np.linalg.matrix_rank(X[candidate]) == len(candidate):
            chosen = candidate
            if len(chosen) == q:
                break
    if len(chosen) < q:
        return None, None
    return np.linalg.solve(X[chosen], problem.responses[chosen]), np.array(chosen)


def _solve_vertex(problem: CheckLossProblem):
    m, q = problem.n_rows, problem.n_cols
    w, tau = problem.weights, problem.tau
    c = np.concatenate([np.zeros(q), tau * w, (1.0 - tau) * w])
    eye = sparse.identity(m, format="csr")
    A_eq = sparse.hstack([sparse.csr_matrix(problem.regressors), eye, -eye], format="csr")
    bounds = [(None, None)] * q + [(0, None)] * (2 * m)

    res = linprog(c, A_eq=A_eq, b_eq=problem.responses, bounds=bounds, method="highs-ds")
    if res.status != 0 or res.x is None:
        raise NoConvergence(f"quantile regression LP did not reach an optimum: {res.message}")
    lp_coefs = res.x[:q]

    # Recompute the vertex from the rows the LP interpolates.
    order = np.argsort(np.abs(problem.residuals(lp_coefs)), kind="stable")
    vertex, rows = _vertex_from_rows(problem, order)
    if vertex is not None and np.all(np.isfinite(vertex)):
        lp_obj = problem.objective(lp_coefs)
        if problem.objective(vertex) <= lp_obj + 1e-9 * max(1.0, abs(lp_obj)):
            return vertex, rows
    return lp_coefs, None


def solve_weighted_qr(problem: CheckLossProblem, check_rank: bool = True) -> CoefVector:
    """Global minimizer of the weighted check-loss objective.

    Args:
        problem: The weighted check-loss problem.
        check_rank: Skip the pivoted-QR rank test when the caller already ran it
            on the same regressors (weights do not change the rank).

    Returns:
        CoefVector at a vertex solution of the equivalent linear program.

    Raises:
        RankDeficient: collinear regressors.
        NoConvergence: the LP solver stopped without an optimal basis.
    """
    if check_rank:
        check_full_rank(problem.regressors)
    coefs, _ = _solve_vertex(problem)
    return CoefVector(coefs, problem.tau)


def vertex_is_optimal(problem: CheckLossProblem, coefs: np.ndarray, rows: np.ndarray,
                      tol: float = 1e-12) -> bool:
    """Subgradient certificate that the vertex through ``rows`` is optimal at ``problem.tau``.

    At a vertex with basis rows h the objective is minimal iff the multipliers
    s_h solving X_h' (w_h * s_h) = -sum_{t not in h} w_t psi_tau(r_t) x_t lie in
    [tau - 1, tau]. Off-basis rows with zero residual make the test inconclusive.
    """
    tau, w, X = problem.tau, problem.weights, problem.regressors
    r = problem.residuals(coefs)
    off = np.ones(problem.n_rows, dtype=bool)
    off[rows] = False
    scale = max(1.0, float(np.max(np.abs(problem.responses))))
    if np.any(np.abs(r[off]) <= 1e-12 * scale):
        return False
    psi = tau - (r[off] < 0)
    g = X[off].T @ (w[off] * psi)
    try:
        s = -np.linalg.solve(X[rows].T, g) / w[rows]
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(s >= tau - 1.0 - tol) and np.all(s <= tau + tol))


def solve_qr_path(design: LaggedDesign, taus, weights=None, check_rank: bool = True) -> np.ndarray:
    """Quantile fits at many orders sharing one design and one weight vector.

    The orders are visited in increasing order and the previous vertex is kept
    while its optimality certificate holds, so the linear program is only
    re-solved when the quantile process jumps.

    Returns:
        np.ndarray: (len(taus), p+1) coefficients in the order of ``taus``.
    """
    taus = np.asarray(taus, dtype=float).reshape(-1)
    if check_rank:
        check_full_rank(design.regressors)
    out = np.empty((taus.size, design.n_cols))
    current, rows = None, None
    solves = 0
    for idx in np.argsort(taus, kind="stable"):
        problem = CheckLossProblem(design.responses, design.regressors, taus[idx], weights)
        if current is None or rows is None or not vertex_is_optimal(problem, current, rows):
            current, rows = _solve_vertex(problem)
            solves += 1
        out[idx] = current
    logger.debug(f"quantile path: {solves} LP solves for {taus.size} orders")
    return out


def solve_qr(design: LaggedDesign, tau: float, check_rank: bool = True) -> CoefVector:
    """Unweighted quantile regression of the lagged design at order ``tau``."""
    return solve_weighted_qr(CheckLossProblem.from_design(design, tau), check_rank=check_rank)


def enumerate_vertex_solutions(problem: CheckLossProblem):
    """Brute-force oracle: best objective over all exactly interpolating row subsets.

    Only meant for small problems (it visits every q-subset of rows).

    Returns:
        tuple: (CoefVector, objective value)
    """
    X, y = problem.regressors, problem.responses
    q = problem.n_cols
    best_coefs, best_obj = None, np.inf
    for rows in itertools.combinations(range(problem.n_rows), q):
        sub = X[list(rows)]
        if np.linalg.matrix_rank(sub) < q:
            continue
        coefs = np.linalg.solve(sub, y[list(rows)])
        obj = problem.objective(coefs)
        if obj < best_obj:
            best_coefs, best_obj = coefs, obj
    if best_coefs is None:
        raise RankDeficient("no interpolating row subset has full rank")
    return CoefVector(best_coefs, problem.tau), float(best_obj)
