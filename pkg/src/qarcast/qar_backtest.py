"""
Rolling-window pseudo-out-of-sample backtests.

A training window of R observations slides forward one observation at a
time; every method builds intervals from each window and is scored on the
observations that follow it.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .exceptions import DomainError, QarcastError, SeriesTooShort
from .qar_intervals import MethodConfig, bootstrap_sample
from .qar_io import save_json, save_table
from .qar_series import RngStream, TimeSeries, as_series

logger = logging.getLogger(__name__)

WINDOW_COLUMNS = ["window", "method", "horizon", "t", "lower", "upper", "point", "target", "covered"]


@dataclass(frozen=True)
class BacktestConfig:
    window: int
    p: int
    methods: Tuple[MethodConfig, ...]
    horizons: Tuple[int, ...] = (1, 2, 3, 4)
    level: float = 0.95
    seed: int = 1
    max_workers: int = 1
    common_windows: bool = False

    def __post_init__(self):
        object.__setattr__(self, "horizons", tuple(sorted({int(k) for k in self.horizons})))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.horizons or self.horizons[0] < 1:
            raise DomainError("horizons must be positive integers")
        if not self.methods:
            raise DomainError("at least one method is required")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level}")
        if self.window < 2 * self.p + 2:
            raise SeriesTooShort(f"window {self.window} is too short for lag order {self.p} "
                                 f"(need at least {2 * self.p + 2})")
        for m in self.methods:
            if m.method == "oracle":
                raise DomainError("oracle intervals need the true model and cannot be backtested")

    @property
    def max_horizon(self) -> int:
        return max(self.horizons)

    def window_count(self, length: int, k: int) -> int:
        """Scored windows for horizon k; ``common_windows`` scores every horizon on the windows of the largest."""
        if self.common_windows:
            k = self.max_horizon
        return length - self.window - k + 1


@dataclass
class BacktestReport:
    """Per-method coverage (percent), mean length and window counts per horizon."""

    methods: List[str]
    horizons: Tuple[int, ...]
    level: float
    hits: Dict[str, Dict[int, np.ndarray]]
    lengths: Dict[str, Dict[int, np.ndarray]]
    excluded: Dict[str, int] = field(default_factory=dict)
    records: Optional[pd.DataFrame] = None

    def coverage(self, method: str, k: int) -> float:
        hits = self.hits[method][k]
        return 100.0 * float(np.count_nonzero(hits)) / hits.size if hits.size else float("nan")

    def mean_length(self, method: str, k: int) -> float:
        lengths = self.lengths[method][k]
        return float(lengths.mean()) if lengths.size else float("nan")

    def windows(self, method: str, k: int) -> int:
        return int(self.hits[method][k].size)

    def d_bar(self, method: str) -> float:
        """Mean absolute deviation of the per-horizon coverage from the nominal level, in percent."""
        return float(np.mean([abs(self.coverage(method, k) - 100.0 * self.level) for k in self.horizons]))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for method in self.methods:
            row = {"method": method}
            row.update({f"beta_{k}": self.coverage(method, k) for k in self.horizons})
            row["D_bar"] = self.d_bar(method)
            row.update({f"len_{k}": self.mean_length(method, k) for k in self.horizons})
            row.update({f"windows_{k}": self.windows(method, k) for k in self.horizons})
            rows.append(row)
        return pd.DataFrame(rows)

    def ranking(self) -> List[str]:
        """Methods sorted by increasing D_bar."""
        return sorted(self.methods, key=self.d_bar)

    def save(self, out_dir) -> List[str]:
        """Write backtest_report.csv/.json and, when kept, the per-window intervals in backtest_windows.csv."""
        frame = self.to_frame()
        paths = [os.path.join(out_dir, "backtest_report.csv"), os.path.join(out_dir, "backtest_report.json")]
        save_table(frame, paths[0])
        save_json({"level": self.level, "horizons": list(self.horizons),
                   "methods": frame.to_dict(orient="records"), "excluded": self.excluded}, paths[1])
        if self.records is not None:
            paths.append(os.path.join(out_dir, "backtest_windows.csv"))
            save_table(self.records, paths[-1])
        return paths


def score_window(series: TimeSeries, cfg: BacktestConfig, i: int):
    """Fit every method on window i (0-based start) and score the horizons it can reach.

    Returns:
        tuple: (rows of (method, k, covered, length, lower, upper, point, target),
        list of (method, message))
    """
    root = RngStream(cfg.seed)
    train = series.window(i, cfg.window)
    y = series.values
    reachable = [k for k in cfg.horizons if i < cfg.window_count(len(series), k)]
    rows, failures = [], []
    for m in cfg.methods:
        try:
            sample = bootstrap_sample(train, m, root.child(m.method, i + 1), cfg.max_horizon)
            intervals = sample.intervals([cfg.level])
        except QarcastError as e:
            failures.append((m.method, f"{type(e).__name__}: {e}"))
            continue
        for k in reachable:
            iv = intervals[k - 1]
            target = float(y[i + cfg.window - 1 + k])
            rows.append((m.method, k, bool(iv.contains(target)), iv.length, iv.lower, iv.upper, iv.point, target))
    return rows, failures


def _score_window_args(args):
    return score_window(*args)


def rwpoos(series, cfg: BacktestConfig, workers: Optional[int] = None) -> BacktestReport:
    """Rolling-window evaluation over every start i = 1..len-R-k+1 for each horizon k.

    Raises:
        SeriesTooShort: when the series does not extend beyond the window by
            the largest horizon.
    """
    series = as_series(series)
    n = len(series)
    if cfg.window_count(n, cfg.max_horizon) < 1:
        raise SeriesTooShort(f"series of length {n} leaves no evaluation window for R={cfg.window} "
                             f"and horizon {cfg.max_horizon}")
    for m in cfg.methods:
        if m.p != cfg.p:
            raise DomainError(f"{m.method}: lag order {m.p} differs from the backtest order {cfg.p}")

    n_windows = max(cfg.window_count(n, k) for k in cfg.horizons)
    workers = cfg.max_workers if workers is None else workers
    workers = max(1, min(int(workers), os.cpu_count() or 1, n_windows))
    logger.info(f"Backtesting {len(cfg.methods)} method(s) on {n_windows} windows of {cfg.window} "
                f"with {workers} worker(s)")
    start = time.perf_counter()

    jobs = [(series, cfg, i) for i in range(n_windows)]
    if workers == 1:
        results = [score_window(*job) for job in jobs]
    else:
        with Pool(processes=workers) as pool:
            results = pool.map(_score_window_args, jobs)

    tags = [m.method for m in cfg.methods]
    hits = {m: {k: [] for k in cfg.horizons} for m in tags}
    lengths = {m: {k: [] for k in cfg.horizons} for m in tags}
    excluded = {m: 0 for m in tags}
    records = []
    for i, (rows, failures) in enumerate(results):
        for method, k, covered, length, lower, upper, point, target in rows:
            hits[method][k].append(covered)
            lengths[method][k].append(length)
            # t is the 1-based position of the scored observation
            records.append((i + 1, method, k, i + cfg.window + k, lower, upper, point, target, covered))
        for method, message in failures:
            excluded[method] += 1
            logger.warning(f"window {i + 1}: {method} excluded ({message})")

    report = BacktestReport(
        tags, cfg.horizons, cfg.level,
        {m: {k: np.array(v, dtype=bool) for k, v in by_k.items()} for m, by_k in hits.items()},
        {m: {k: np.array(v, dtype=float) for k, v in by_k.items()} for m, by_k in lengths.items()},
        excluded,
        _window_frame(records, series),
    )
    for method in tags:
        logger.info(f"{method}: D_bar={report.d_bar(method):.2f} "
                    + " ".join(f"k{k}={report.coverage(method, k):.2f}" for k in cfg.horizons))
    logger.info(f"Backtest finished in {time.perf_counter() - start:.1f}s")
    return report


def _window_frame(records, series: TimeSeries) -> pd.DataFrame:
    frame = pd.DataFrame(records, columns=WINDOW_COLUMNS)
    if series.labels is not None:
        frame.insert(4, "label", series.labels[frame["t"].to_numpy() - 1])
    return frame


def backtest_methods(tags: Sequence[str], p: int, level: float, B: Optional[int] = None,
                     tau0: float = 0.5) -> List[MethodConfig]:
    return [MethodConfig(method=tag, p=p, level=level, B=B, tau0=tau0) for tag in tags]
