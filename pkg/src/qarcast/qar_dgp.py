"""
Simulation models

The four data-generating processes of the coverage study: two linear
autoregressions with additive innovations (M1, M2) and two quantile
autoregressions driven by a latent uniform variable (M3, M4).
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DomainError
from .qar_models import recurse_paths
from .qar_series import InnovationLaw, RngLike, TimeSeries, as_generator

logger = logging.getLogger(__name__)

MODELS = ("M1", "M2", "M3", "M4")
COEFFICIENT_READINGS = ("uniform", "literal")

# smallest positive value drawn in place of an exact 0 from Generator.random
_U_FLOOR = 2.0 ** -54


@dataclass(frozen=True)
class DgpSpec:
    """Data-generating process of the simulation study.

    ``coefficient_reading`` controls the argument of the M3/M4 slope
    functions: ``uniform`` uses U_t itself, ``literal`` uses F_a(U_t).
    ``center_innovations`` subtracts the law's median from additive
    innovations of M1/M2 (relevant for the skewed chi-squared law).
    """

    model: str = "M1"
    phi1: float = 0.6
    order: int = 2
    gamma0: float = 0.25
    gamma1: float = 0.85
    innovation: str = "normal"
    burn_in: int = 300
    coefficient_reading: str = "uniform"
    center_innovations: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"model must be one of {MODELS}, got '{self.model}'")
        if self.model == "M1" and not 0.0 < self.phi1 < 1.0:
            raise DomainError(f"M1 needs 0 < phi1 < 1, got {self.phi1}")
        if self.model == "M2" and self.order < 2:
            raise DomainError(f"M2 needs order >= 2, got {self.order}")
        if self.burn_in < 0:
            raise DomainError("burn_in must be non-negative")
        if self.coefficient_reading not in COEFFICIENT_READINGS:
            raise DomainError(f"coefficient_reading must be one of {COEFFICIENT_READINGS}")
        InnovationLaw.parse(self.innovation)

    @property
    def law(self) -> InnovationLaw:
        return InnovationLaw.parse(self.innovation)

    @property
    def p(self) -> int:
        return {"M1": 1, "M2": self.order, "M3": 1, "M4": 2}[self.model]

    @property
    def is_quantile_model(self) -> bool:
        return self.model in ("M3", "M4")

    def to_dict(self) -> dict:
        return asdict(self)

    def label(self) -> str:
        detail = {"M1": f"phi1={self.phi1:g}", "M2": f"p={self.order}",
                  "M3": f"gamma=({self.gamma0:g},{self.gamma1:g})", "M4": ""}[self.model]
        return " ".join(part for part in (self.model, detail, self.law.tag) if part)


def ar_coefficients(spec: DgpSpec) -> np.ndarray:
    """(phi_0, ..., phi_p) of the linear models M1 and M2."""
    if spec.model == "M1":
        return np.array([0.0, spec.phi1])
    if spec.model == "M2":
        tail = [(-1) ** (v - 1) * 0.50 for v in range(2, spec.order + 1)]
        return np.array([0.0, 0.75] + tail)
    raise DomainError(f"{spec.model} has random coefficients")


def coefficient_functions(spec: DgpSpec, u) -> np.ndarray:
    """Random coefficients phi(U) of the quantile models, one row per uniform."""
    law = spec.law
    u = np.asarray(u, dtype=float).reshape(-1)
    g = u if spec.coefficient_reading == "uniform" else law.cdf(u)
    intercept = law.ppf(u)
    if spec.model == "M3":
        slope = np.minimum(spec.gamma0 + spec.gamma1 * g, 1.0)
        return np.column_stack([intercept, slope])
    if spec.model == "M4":
        return np.column_stack([intercept, np.full(u.size, 0.3), 0.7 * g])
    raise DomainError(f"{spec.model} has fixed coefficients")


def draw_shocks(spec: DgpSpec, rng: RngLike, shape) -> np.ndarray:
    """Innovations (M1/M2) or latent uniforms (M3/M4) for the given shape."""
    gen = as_generator(rng)
    if spec.is_quantile_model:
        u = gen.random(shape)
        return np.where(u == 0.0, _U_FLOOR, u)
    a = spec.law.draw(gen, shape)
    if spec.center_innovations:
        a = a - spec.law.median()
    return a


def extend_paths(spec: DgpSpec, history, shocks) -> np.ndarray:
    """Extend ``history`` forward with the true model under the given shocks.

    Args:
        spec: The model.
        history: Last p values in time order.
        shocks: (F, k) innovations for M1/M2 or uniforms for M3/M4.

    Returns:
        np.ndarray: (F, k) future values.
    """
    shocks = np.atleast_2d(np.asarray(shocks, dtype=float))
    if not spec.is_quantile_model:
        return recurse_paths(history, ar_coefficients(spec), shocks)
    n_paths, k = shocks.shape
    coefs = coefficient_functions(spec, shocks.reshape(-1)).reshape(n_paths, k, spec.p + 1)
    return recurse_paths(history, coefs, np.zeros_like(shocks))


def simulate_dgp(spec: DgpSpec, n: int, rng: RngLike) -> TimeSeries:
    """Generate burn_in + n values from zero initial lags and keep the last n."""
    if n < 1:
        raise DomainError("n must be positive")
    total = spec.burn_in + int(n)
    shocks = draw_shocks(spec, rng, (1, total))
    path = extend_paths(spec, np.zeros(spec.p), shocks)[0]
    return TimeSeries(path[spec.burn_in:])


def draw_future_paths(history, spec: DgpSpec, k: int, F: int, rng: RngLike) -> np.ndarray:
    """F independent length-k continuations of the true process."""
    history = np.asarray(history, dtype=float)[-spec.p:]
    if history.size < spec.p:
        raise DomainError(f"need at least {spec.p} values to condition on")
    return extend_paths(spec, history, draw_shocks(spec, rng, (int(F), int(k))))


def draw_true_futures(history, spec: DgpSpec, k: int, F: int, rng: RngLike) -> np.ndarray:
    """Terminal values Y_{n+k} of F independent continuations."""
    return draw_future_paths(history, spec, k, F, rng)[:, k - 1]
