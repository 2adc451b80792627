"""
Time Series Core

Series container, lagged design construction, the empirical-quantile
convention shared by every interval method, the four innovation laws and
the seeded random streams every stochastic operation draws from.
"""

from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats

from .exceptions import (
    DomainError,
    EmptyInput,
    NonFinite,
    NonMonotoneLabels,
    SeriesTooShort,
)

logger = logging.getLogger(__name__)

# Slack used when turning alpha*m into an order-statistic rank, so that
# products such as 0.07 * 100 = 7.000000000000001 keep their exact rank.
_RANK_EPS = 1e-9


# ---------------------------------------------------------------------- #
# Series and lagged design
# ---------------------------------------------------------------------- #
@dataclass(frozen=True)
class TimeSeries:
    """Ordered real observations with optional, strictly increasing labels."""

    values: np.ndarray
    labels: Optional[pd.Index] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise EmptyInput("time series is empty")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise NonFinite(f"non-finite value at position {bad}")
        object.__setattr__(self, "values", values)

        if self.labels is not None:
            labels = pd.Index(self.labels)
            if len(labels) != values.size:
                raise ValueError(
                    f"labels length {len(labels)} does not match values length {values.size}"
                )
            if not (labels.is_monotonic_increasing and labels.is_unique):
                raise NonMonotoneLabels("time labels must be strictly increasing")
            object.__setattr__(self, "labels", labels)

    def __len__(self):
        return int(self.values.size)

    def tail(self, p: int) -> np.ndarray:
        """Return the last ``p`` observations in time order."""
        return self.values[len(self) - p:].copy()

    def window(self, start: int, length: int) -> "TimeSeries":
        labels = None if self.labels is None else self.labels[start:start + length]
        return TimeSeries(self.values[start:start + length], labels)

    def shifted(self, c: float) -> "TimeSeries":
        return TimeSeries(self.values + c, self.labels)


def as_series(series: Union[TimeSeries, Sequence[float], np.ndarray]) -> TimeSeries:
    if isinstance(series, TimeSeries):
        return series
    return TimeSeries(np.asarray(series, dtype=float))


@dataclass(frozen=True)
class LaggedDesign:
    """Responses Y_t (t = p+1..n) and regressor rows (1, Y_{t-1}, ..., Y_{t-p})."""

    responses: np.ndarray
    regressors: np.ndarray
    p: int

    @property
    def n_rows(self) -> int:
        return int(self.responses.size)

    @property
    def n_cols(self) -> int:
        return int(self.regressors.shape[1])

    def series_values(self) -> np.ndarray:
        """Reassemble the original series from the first row's lags and the responses."""
        head = self.regressors[0, 1:][::-1]
        return np.concatenate([head, self.responses])

    def subset(self, keep: np.ndarray) -> "LaggedDesign":
        return LaggedDesign(self.responses[keep], self.regressors[keep], self.p)


def build_design(series, p: int) -> LaggedDesign:
    """Build the lagged regression design of an AR(p)/QAR(p) fit.

    Args:
        series: TimeSeries or array of observations Y_1..Y_n.
        p: Lag order (positive integer).

    Returns:
        LaggedDesign with n-p rows whose leading regressor entry is 1.

    Raises:
        SeriesTooShort: when n - p < p + 2.
        NonFinite: when any value is not finite.
    """
    if int(p) != p or p < 1:
        raise DomainError(f"lag order must be a positive integer, got {p}")
    p = int(p)
    y = np.asarray(series.values if isinstance(series, TimeSeries) else series, dtype=float)
    y = y.reshape(-1)
    if not np.all(np.isfinite(y)):
        raise NonFinite("series contains non-finite values")
    n = y.size
    if n - p < p + 2:
        raise SeriesTooShort(
            f"series of length {n} is too short for lag order {p} (need at least {2 * p + 2})"
        )

    lags = np.lib.stride_tricks.sliding_window_view(y[:-1], p)[:, ::-1]
    regressors = np.column_stack([np.ones(n - p), lags])
    return LaggedDesign(responses=y[p:].copy(), regressors=np.ascontiguousarray(regressors), p=p)


def lag_vector(history: np.ndarray) -> np.ndarray:
    """Regressor row (1, Y_n, ..., Y_{n-p+1}) for a history given in time order."""
    history = np.asarray(history, dtype=float)
    return np.concatenate([[1.0], history[::-1]])


# ---------------------------------------------------------------------- #
# Empirical quantiles
# ---------------------------------------------------------------------- #
def quantile_rank(alpha: float, m: int) -> int:
    """1-based rank ceil(alpha*m) of the left-continuous inverse CDF."""
    rank = math.ceil(alpha * m - _RANK_EPS)
    return min(max(rank, 1), m)


def empirical_quantile(samples, alpha: float) -> float:
    """Left-continuous empirical quantile: the ceil(alpha*m)-th order statistic.

    Raises:
        EmptyInput: when ``samples`` is empty.
        DomainError: when alpha is outside (0, 1).
    """
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size == 0:
        raise EmptyInput("cannot take a quantile of an empty sample")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("samples contain non-finite values")
    rank = quantile_rank(alpha, x.size)
    return float(np.partition(x, rank - 1)[rank - 1])


def empirical_quantiles(samples: np.ndarray, alphas: Sequence[float]) -> np.ndarray:
    """Column-wise empirical quantiles of a (m, k) sample matrix.

    Returns an array of shape (len(alphas), k).
    """
    x = np.sort(np.asarray(samples, dtype=float), axis=0)
    if x.shape[0] == 0:
        raise EmptyInput("cannot take a quantile of an empty sample")
    ranks = [quantile_rank(a, x.shape[0]) - 1 for a in alphas]
    return x[ranks]


# ---------------------------------------------------------------------- #
# Random streams
# ---------------------------------------------------------------------- #
def _tag_code(tag: str) -> int:
    # crc32 is stable across interpreter runs, unlike hash()
    return zlib.crc32(tag.encode("utf-8"))


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (master_seed, purpose path, index).

    Two streams with the same key always produce the same variates; the key
    never depends on execution order, so parallel runs reproduce serial ones.
    """

    master_seed: int
    stream_index: int = 0
    path: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.master_seed < 0 or self.master_seed >= 2 ** 64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise DomainError("stream_index must be non-negative")

    def child(self, tag: str, index: int = 0) -> "RngStream":
        """Derive an independent stream for a named purpose."""
        return RngStream(self.master_seed, int(index), self.path + ((str(tag), self.stream_index),))

    def seed_sequence(self) -> np.random.SeedSequence:
        entropy = [self.master_seed & 0xFFFFFFFF, self.master_seed >> 32]
        for tag, index in self.path:
            entropy.extend([_tag_code(tag), index])
        entropy.append(self.stream_index)
        return np.random.SeedSequence(entropy)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def draw_uniform(rng: RngLike, size=None):
    return as_generator(rng).random(size)


def draw_standard_normal(rng: RngLike, size=None):
    return as_generator(rng).standard_normal(size)


def draw_student_t(df: int, rng: RngLike, size=None):
    if df <= 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    return as_generator(rng).standard_t(df, size)


def draw_chi_squared(df: int, rng: RngLike, size=None):
    if df <= 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    return as_generator(rng).chisquare(df, size)


def draw_exponential_mean1(rng: RngLike, size=None):
    return as_generator(rng).exponential(1.0, size)


# ---------------------------------------------------------------------- #
# Innovation laws
# ---------------------------------------------------------------------- #
_LAW_ALIASES = {
    "normal": ("normal", None),
    "n01": ("normal", None),
    "t3": ("student_t", 3),
    "chi2_5": ("chi_squared", 5),
}


@dataclass(frozen=True)
class InnovationLaw:
    """One of the laws used by the simulation models: normal, Student t, chi-squared."""

    family: str
    df: Optional[int] = None

    def __post_init__(self):
        if self.family not in ("normal", "student_t", "chi_squared"):
            raise DomainError(f"unknown distribution family '{self.family}'")
        if self.family != "normal" and (self.df is None or self.df <= 0):
            raise DomainError(f"{self.family} needs positive degrees of freedom")

    @classmethod
    def parse(cls, tag) -> "InnovationLaw":
        """Accept 'normal', 't3', 'chi2_5', 'student_t(4)', 'chi_squared(2)' or a law."""
        if isinstance(tag, InnovationLaw):
            return tag
        key = str(tag).strip().lower()
        if key in _LAW_ALIASES:
            return cls(*_LAW_ALIASES[key])
        for family in ("student_t", "chi_squared"):
            if key.startswith(family + "(") and key.endswith(")"):
                return cls(family, int(key[len(family) + 1:-1]))
        raise DomainError(f"unknown innovation law '{tag}'")

    @property
    def tag(self) -> str:
        if self.family == "normal":
            return "normal"
        short = {"student_t": "t", "chi_squared": "chi2_"}[self.family]
        return f"{short}{self.df}"

    @property
    def frozen(self):
        if self.family == "normal":
            return stats.norm()
        if self.family == "student_t":
            return stats.t(self.df)
        return stats.chi2(self.df)

    def draw(self, rng: RngLike, size=None):
        if self.family == "normal":
            return draw_standard_normal(rng, size)
        if self.family == "student_t":
            return draw_student_t(self.df, rng, size)
        return draw_chi_squared(self.df, rng, size)

    def ppf(self, u):
        return inverse_cdf(self, u)

    def cdf(self, x):
        return cdf(self, x)

    def median(self) -> float:
        return float(self.frozen.median())


def inverse_cdf(dist, u):
    """Quantile function F^{-1}(u) of one of the simulation laws.

    Raises:
        DomainError: when any u lies outside (0, 1).
    """
    law = InnovationLaw.parse(dist)
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0.0) & (u_arr < 1.0))):
        raise DomainError("inverse_cdf needs 0 < u < 1")
    out = law.frozen.ppf(u_arr)
    return float(out) if np.ndim(out) == 0 else out


def cdf(dist, x):
    law = InnovationLaw.parse(dist)
    out = law.frozen.cdf(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out
