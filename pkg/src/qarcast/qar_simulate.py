"""
Monte-Carlo coverage experiments.

Each replication s simulates a series from the true model, runs every
configured method for horizons 1..K, draws F true continuations and scores
the conditional coverage of every interval. Per-(method, horizon, level)
cells are then aggregated into coverage, tail-miss and length statistics.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .exceptions import ConfigError, DomainError, QarcastError
from .qar_dgp import DgpSpec, draw_future_paths, simulate_dgp
from .qar_intervals import (
    BOOTSTRAP_FREE,
    METHOD_DEFAULTS,
    QAR_METHODS,
    MethodConfig,
    PredictionInterval,
    bootstrap_sample,
    normalize_method,
)
from .qar_io import save_json, save_table
from .qar_series import RngStream

logger = logging.getLogger(__name__)

PROFILE_ENV_VAR = "QARCAST_PROFILE"

PROFILES = {
    "desk": {"S": 200, "F": 500, "B_ar": 500, "B_qar": 2000},
    "paper": {"S": 500, "F": 1000, "B_ar": 1000, "B_qar": 5000},
}

DEFAULT_EXPERIMENT = {
    "n": 50,
    "horizons": [1, 2, 3, 4],
    "methods": ["bj", "ts", "cb", "prr", "prr-lad", "pp", "ar-perc", "ar-proot", "x",
                "qar-perc", "qar-proot", "oracle"],
    "beta": 0.95,
    "levels": [],
    "seed": 1,
    "profile": None,
    "performance": {"max_workers": 1},
}

STATISTICS = ("beta_bar", "se", "mse", "gamma_hat", "a_bar", "b_bar", "len_bar", "len_se", "median",
              "replications")

# gamma_hat compares beta_s >= beta; counts/F can land one ulp below beta
_GE_SLACK = 1e-12


# ---------------------------------------------------------------------- #
# Configuration
# ---------------------------------------------------------------------- #
@dataclass(frozen=True)
class ExperimentConfig:
    """One cell grid of the coverage study: a model, a sample size and a method list."""

    dgp: DgpSpec
    n: int
    horizons: Tuple[int, ...]
    methods: Tuple[MethodConfig, ...]
    S: int = PROFILES["desk"]["S"]
    F: int = PROFILES["desk"]["F"]
    beta: float = 0.95
    seed: int = 1
    levels: Tuple[float, ...] = ()
    max_workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "horizons", tuple(sorted({int(k) for k in self.horizons})))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "levels", tuple(float(b) for b in self.levels))
        if self.S < 2:
            raise DomainError(f"S must be at least 2, got {self.S}")
        if self.F < 1:
            raise DomainError(f"F must be at least 1, got {self.F}")
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")
        if not self.horizons or self.horizons[0] < 1:
            raise DomainError("horizons must be positive integers")
        if not self.methods:
            raise DomainError("at least one method is required")
        tags = [m.method for m in self.methods]
        if len(set(tags)) != len(tags):
            raise DomainError("each method may appear only once per experiment")
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")
        for m in self.methods:
            if m.method not in BOOTSTRAP_FREE:
                for level in self.level_list:
                    m.check_replications(level)

    @property
    def level_list(self) -> List[float]:
        out = [self.beta]
        out.extend(b for b in self.levels if b not in out)
        return out

    @property
    def max_horizon(self) -> int:
        return max(self.horizons)

    def to_dict(self) -> dict:
        return {
            "dgp": self.dgp.to_dict(),
            "n": self.n,
            "horizons": list(self.horizons),
            "methods": [_method_dict(m) for m in self.methods],
            "S": self.S,
            "F": self.F,
            "beta": self.beta,
            "levels": list(self.levels),
            "seed": self.seed,
        }


def _method_dict(m: MethodConfig) -> dict:
    return {
        "method": m.method, "p": m.p, "tau": m.tau, "tau0": m.tau0, "B": m.replications,
        "multiplier": m.multiplier, "loo": m.loo,
    }


def resolve_profile(cli_profile: Optional[str] = None, config_profile: Optional[str] = None) -> str:
    """Pick the run profile: CLI flag, then the environment, then the config file, then 'desk'."""
    for source, value in (("--profile", cli_profile), (PROFILE_ENV_VAR, os.environ.get(PROFILE_ENV_VAR)),
                          ("profile", config_profile)):
        if value:
            if value not in PROFILES:
                raise ConfigError(f"unknown profile '{value}'; expected one of {', '.join(PROFILES)}",
                                  key_path=source)
            return value
    return "desk"


_DGP_TYPES = {
    "model": str, "phi1": float, "order": int, "gamma0": float, "gamma1": float,
    "innovation": str, "burn_in": int, "coefficient_reading": str, "center_innovations": bool,
}
_METHOD_TYPES = {
    "method": str, "p": int, "tau": float, "tau0": float, "B": int, "multiplier": str,
    "loo": str, "oracle_draws": int,
}
_TOP_TYPES = {
    "dgp": dict, "n": int, "horizons": list, "methods": list, "S": int, "F": int, "beta": float,
    "levels": list, "seed": int, "profile": str, "performance": dict,
}
_PERFORMANCE_TYPES = {"max_workers": int}


def _check_type(value, expected, key_path):
    if expected is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif expected is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, expected)
    if not ok:
        raise ConfigError(f"expected {expected.__name__}, got {type(value).__name__}", key_path=key_path)
    return value


def _check_keys(doc: dict, types: dict, prefix: str):
    for key, value in doc.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in types:
            raise ConfigError("unknown key", key_path=path)
        if value is not None:
            _check_type(value, types[key], path)


def method_from_entry(entry, index: int, default_p: int, profile: str, level: float) -> MethodConfig:
    """Build a MethodConfig from a config entry: a tag or a {'method': tag, ...} mapping."""
    path = f"methods[{index}]"
    if isinstance(entry, str):
        entry = {"method": entry}
    if not isinstance(entry, dict):
        raise ConfigError("expected a method tag or an object", key_path=path)
    _check_keys(entry, _METHOD_TYPES, path)
    if "method" not in entry:
        raise ConfigError("missing key", key_path=f"{path}.method")
    options = {k: v for k, v in entry.items() if v is not None}
    try:
        tag = normalize_method(options.pop("method"))
        options.setdefault("p", default_p)
        if tag != "oracle" and tag not in BOOTSTRAP_FREE:
            options.setdefault("B", PROFILES[profile]["B_qar" if tag in QAR_METHODS else "B_ar"])
        return MethodConfig(method=tag, level=level, **options)
    except DomainError as e:
        raise ConfigError(str(e), key_path=path)


def experiment_from_dict(doc: dict, profile: Optional[str] = None) -> ExperimentConfig:
    """Validate a config document and merge it over the defaults of its profile.

    Raises:
        ConfigError: naming the offending key path.
    """
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", key_path="<document>")
    _check_keys(doc, _TOP_TYPES, "")
    if "dgp" not in doc:
        raise ConfigError("missing key", key_path="dgp")
    _check_keys(doc["dgp"], _DGP_TYPES, "dgp")
    performance = doc.get("performance") or {}
    _check_keys(performance, _PERFORMANCE_TYPES, "performance")

    profile = resolve_profile(profile, doc.get("profile"))
    merged = dict(DEFAULT_EXPERIMENT)
    merged.update({k: v for k, v in doc.items() if v is not None})
    merged.setdefault("S", PROFILES[profile]["S"])
    merged.setdefault("F", PROFILES[profile]["F"])

    try:
        dgp = DgpSpec(**doc["dgp"])
    except (DomainError, TypeError) as e:
        raise ConfigError(str(e), key_path="dgp")

    for i, k in enumerate(merged["horizons"]):
        _check_type(k, int, f"horizons[{i}]")
    for i, b in enumerate(merged["levels"]):
        _check_type(b, float, f"levels[{i}]")
    beta = float(merged["beta"])
    levels = [beta] + [float(b) for b in merged["levels"]]
    methods = [method_from_entry(entry, i, dgp.p, profile, max(levels))
               for i, entry in enumerate(merged["methods"])]
    methods = [m.with_options(level=beta) for m in methods]

    try:
        cfg = ExperimentConfig(
            dgp=dgp, n=merged["n"], horizons=merged["horizons"], methods=methods,
            S=merged["S"], F=merged["F"], beta=beta, seed=merged["seed"],
            levels=merged["levels"], max_workers=performance.get("max_workers", 1) or 1,
        )
    except DomainError as e:
        raise ConfigError(str(e))
    logger.info(f"Experiment {dgp.label()} n={cfg.n} S={cfg.S} F={cfg.F} profile={profile} "
                f"methods={','.join(m.method for m in cfg.methods)}")
    return cfg


def load_experiment_config(config_file, profile: Optional[str] = None) -> ExperimentConfig:
    """Load an experiment configuration from a JSON file."""
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON (line {e.lineno}, column {e.colno}): {e.msg}",
                          key_path="<document>")
    logger.info(f"Loaded configuration from {config_file}")
    return experiment_from_dict(doc, profile)


# ---------------------------------------------------------------------- #
# Scoring and aggregation
# ---------------------------------------------------------------------- #
def conditional_coverage(interval: PredictionInterval, futures) -> Tuple[float, float, float]:
    """Fractions of futures inside, strictly above and strictly below the interval.

    Returns:
        tuple: (beta_s, A_s, B_s)
    """
    y = np.asarray(futures, dtype=float).reshape(-1)
    if y.size == 0:
        raise DomainError("need at least one future value")
    inside = int(np.count_nonzero(interval.contains(y)))
    above = int(np.count_nonzero(y > interval.upper))
    below = int(np.count_nonzero(y < interval.lower))
    # boundary hits on a non-degenerate interval count as neither
    boundary = y.size - inside - above - below
    if boundary and interval.lower != interval.upper:
        logger.debug(f"{boundary} future values fell on an interval endpoint")
    return inside / y.size, above / y.size, below / y.size


@dataclass
class CellStats:
    """Aggregate statistics of one (method, horizon, level) cell."""

    method: str
    horizon: int
    level: float
    beta_bar: float
    se: float
    mse: float
    gamma_hat: float
    a_bar: float
    b_bar: float
    len_bar: float
    len_se: float
    median: float
    replications: int
    beta_s: np.ndarray = field(repr=False, default=None)
    lengths: np.ndarray = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in ("method", "horizon", "level") + STATISTICS}


def coverage_statistics(beta_s, a_s, b_s, lengths, beta: float) -> Dict[str, float]:
    """Mean, standard error, MSE, gamma-hat, tail means and length statistics over S replications."""
    beta_s = np.asarray(beta_s, dtype=float)
    lengths = np.asarray(lengths, dtype=float)
    S = beta_s.size
    if S < 2:
        raise DomainError(f"need at least 2 replications, got {S}")
    beta_bar = float(beta_s.mean())
    len_bar = float(lengths.mean())
    return {
        "beta_bar": beta_bar,
        "se": float(beta_s.std(ddof=1) / np.sqrt(S)),
        "mse": float(np.mean((beta_s - beta) ** 2)),
        "gamma_hat": float(np.mean(beta_s >= beta - _GE_SLACK)),
        "a_bar": float(np.mean(a_s)),
        "b_bar": float(np.mean(b_s)),
        "len_bar": len_bar,
        "len_se": float(np.sqrt(np.sum((lengths - len_bar) ** 2) / (S - 1)) / S),
        "median": float(np.median(beta_s)),
        "replications": S,
    }


@dataclass
class CoverageReport:
    """Aggregated cells plus the per-replication raw table of one experiment."""

    cells: List[CellStats]
    raw: pd.DataFrame
    excluded: Dict[str, int]
    config: dict = field(default_factory=dict)

    def cell(self, method: str, horizon: int = 1, level: Optional[float] = None) -> CellStats:
        method = normalize_method(method)
        for c in self.cells:
            if c.method == method and c.horizon == horizon and (level is None or np.isclose(c.level, level)):
                return c
        raise KeyError(f"no cell for {method} at horizon {horizon}")

    def summary_frame(self) -> pd.DataFrame:
        return pd.DataFrame([c.as_dict() for c in self.cells])

    def to_frame(self) -> pd.DataFrame:
        """Long form: one row per method x horizon x level x statistic."""
        wide = self.summary_frame()
        if wide.empty:
            return pd.DataFrame(columns=["method", "horizon", "level", "statistic", "value"])
        long = wide.melt(id_vars=["method", "horizon", "level"], value_vars=list(STATISTICS),
                         var_name="statistic", value_name="value")
        order = {name: i for i, name in enumerate(STATISTICS)}
        long["_stat"] = long["statistic"].map(order)
        method_order = {m: i for i, m in enumerate(dict.fromkeys(wide["method"]))}
        long["_method"] = long["method"].map(method_order)
        long = long.sort_values(["_method", "horizon", "level", "_stat"], kind="stable")
        return long.drop(columns=["_stat", "_method"]).reset_index(drop=True)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "cells": [c.as_dict() for c in self.cells],
            "excluded": self.excluded,
        }

    def save(self, out_dir) -> List[str]:
        """Write coverage_report.csv/.json, coverage_raw.csv and excluded.json under ``out_dir``."""
        paths = [os.path.join(out_dir, name) for name in
                 ("coverage_report.csv", "coverage_report.json", "coverage_raw.csv", "excluded.json")]
        save_table(self.to_frame(), paths[0])
        save_json(self.to_dict(), paths[1])
        save_table(self.raw, paths[2])
        save_json(self.excluded, paths[3])
        return paths


RAW_COLUMNS = ["s", "method", "horizon", "level", "beta_s", "A_s", "B_s", "length"]


def aggregate(raw: pd.DataFrame, methods: Sequence[str], excluded: Optional[Dict[str, int]] = None,
              config: Optional[dict] = None) -> CoverageReport:
    """Aggregate per-replication scores into a CoverageReport.

    Cells are emitted in the order of ``methods`` then horizon then level.
    Cells left with fewer than two scored replications get NaN statistics.
    """
    cells = []
    for method in methods:
        sub = raw[raw["method"] == method]
        for (horizon, level), grp in sub.groupby(["horizon", "level"], sort=True):
            grp = grp.sort_values("s")
            if len(grp) < 2:
                logger.warning(f"{method} k={horizon}: only {len(grp)} scored replications")
                stats = {name: float("nan") for name in STATISTICS}
                stats["replications"] = len(grp)
            else:
                stats = coverage_statistics(grp["beta_s"], grp["A_s"], grp["B_s"], grp["length"], level)
            cells.append(CellStats(method, int(horizon), float(level), beta_s=grp["beta_s"].to_numpy(),
                                   lengths=grp["length"].to_numpy(), **stats))
    return CoverageReport(cells, raw, dict(excluded or {}), dict(config or {}))


# ---------------------------------------------------------------------- #
# Experiment driver
# ---------------------------------------------------------------------- #
def run_replication(cfg: ExperimentConfig, s: int):
    """Simulate series s, run every method and score it against fresh futures.

    Returns:
        tuple: (score rows, list of (method, message) for excluded cells)
    """
    root = RngStream(cfg.seed)
    series = simulate_dgp(cfg.dgp, cfg.n, root.child("series", s))
    history = series.tail(cfg.dgp.p)
    futures = draw_future_paths(history, cfg.dgp, cfg.max_horizon, cfg.F, root.child("futures", s))

    rows, failures = [], []
    for m in cfg.methods:
        try:
            sample = bootstrap_sample(series, m, root.child(m.method, s), cfg.max_horizon, true_model=cfg.dgp)
            intervals = sample.intervals(cfg.level_list)
        except QarcastError as e:
            failures.append((m.method, f"{type(e).__name__}: {e}"))
            continue
        for iv in intervals:
            if iv.horizon not in cfg.horizons:
                continue
            beta_s, a_s, b_s = conditional_coverage(iv, futures[:, iv.horizon - 1])
            rows.append((s, m.method, iv.horizon, iv.level, beta_s, a_s, b_s, iv.length))
    return rows, failures


def _run_replication_args(args):
    return run_replication(*args)


def run_experiment(cfg: ExperimentConfig, workers: Optional[int] = None) -> CoverageReport:
    """Run all S replications and aggregate per (method, horizon, level).

    The result does not depend on ``workers``: every replication draws from
    streams keyed by (seed, purpose, s) and results are collected in s order.
    """
    workers = cfg.max_workers if workers is None else workers
    workers = max(1, min(int(workers), os.cpu_count() or 1, cfg.S))
    logger.info(f"Running {cfg.S} replications of {cfg.dgp.label()} n={cfg.n} with {workers} worker(s)")
    start = time.perf_counter()

    jobs = [(cfg, s) for s in range(1, cfg.S + 1)]
    if workers == 1:
        results = [run_replication(*job) for job in jobs]
    else:
        with Pool(processes=workers) as pool:
            results = pool.map(_run_replication_args, jobs)

    rows, excluded = [], {m.method: 0 for m in cfg.methods}
    for (rep_rows, failures), (_, s) in zip(results, jobs):
        rows.extend(rep_rows)
        for method, message in failures:
            excluded[method] += 1
            logger.warning(f"replication {s}: {method} excluded ({message})")
    total = sum(excluded.values())
    if total:
        logger.warning(f"{total} (method, replication) cells excluded")

    raw = pd.DataFrame(rows, columns=RAW_COLUMNS)
    report = aggregate(raw, [m.method for m in cfg.methods], excluded, cfg.to_dict())
    logger.info(f"Experiment finished in {time.perf_counter() - start:.1f}s")
    return report


def sweep_phi(cfg: ExperimentConfig, phis: Sequence[float] = tuple(np.round(np.arange(0.1, 1.0, 0.1), 1)),
              workers: Optional[int] = None) -> Dict[float, CoverageReport]:
    """Re-run an M1 experiment over a grid of autoregressive coefficients."""
    if cfg.dgp.model != "M1":
        raise DomainError(f"sweep_phi needs model M1, got {cfg.dgp.model}")
    out = {}
    for phi in phis:
        dgp = DgpSpec(**{**cfg.dgp.to_dict(), "phi1": float(phi)})
        run_cfg = ExperimentConfig(dgp, cfg.n, cfg.horizons, cfg.methods, cfg.S, cfg.F, cfg.beta,
                                   cfg.seed, cfg.levels, cfg.max_workers)
        out[float(phi)] = run_experiment(run_cfg, workers)
    return out


def time_methods(dgp: DgpSpec, n: int, k: int, methods: Sequence[MethodConfig], repeats: int = 5,
                 seed: int = 1) -> pd.DataFrame:
    """Mean and standard deviation of wall-clock seconds per method over ``repeats`` series.

    Every method sees the same simulated series.
    """
    root = RngStream(seed)
    series = [simulate_dgp(dgp, n, root.child("series", r)) for r in range(repeats)]
    records = []
    for m in methods:
        seconds = []
        for r, y in enumerate(series):
            start = time.perf_counter()
            bootstrap_sample(y, m, root.child(m.method, r), k, true_model=dgp)
            seconds.append(time.perf_counter() - start)
        records.append({"method": m.method, "mean_seconds": float(np.mean(seconds)),
                        "sd_seconds": float(np.std(seconds, ddof=1)) if repeats > 1 else 0.0,
                        "repeats": repeats})
        logger.info(f"{m.method}: {records[-1]['mean_seconds']:.3f}s per run")
    return pd.DataFrame(records)


def default_method_configs(p: int, level: float = METHOD_DEFAULTS["level"],
                           profile: str = "desk", tags: Optional[Sequence[str]] = None) -> List[MethodConfig]:
    """Method configurations with the replication counts of a profile."""
    tags = DEFAULT_EXPERIMENT["methods"] if tags is None else tags
    return [method_from_entry(tag, i, p, profile, level) for i, tag in enumerate(tags)]
