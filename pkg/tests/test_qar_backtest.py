import json
import os

import numpy as np
import pandas as pd
import pytest

from conftest import data_file
from qarcast import qar_backtest
from qarcast.exceptions import DomainError, MethodError, SeriesTooShort
from qarcast.qar_backtest import BacktestConfig, BacktestReport, backtest_methods, rwpoos, score_window
from qarcast.qar_intervals import IntervalSample, MethodConfig
from qarcast.qar_io import load_series_csv
from qarcast.qar_series import TimeSeries


def _config(**kwargs):
    defaults = {"window": 20, "p": 1, "methods": (MethodConfig("bj"),), "horizons": (1, 2)}
    defaults.update(kwargs)
    return BacktestConfig(**defaults)


class TestConfig:
    def test_window_too_short_for_order(self):
        with pytest.raises(SeriesTooShort):
            _config(window=5, p=2)

    def test_oracle_cannot_be_backtested(self):
        with pytest.raises(DomainError):
            _config(methods=(MethodConfig("oracle"),))

    def test_window_counts(self):
        cfg = _config(window=50, horizons=(1, 2, 3, 4))
        assert [cfg.window_count(155, k) for k in (1, 4)] == [105, 102]
        common = _config(window=50, horizons=(1, 2, 3, 4), common_windows=True)
        assert [common.window_count(155, k) for k in (1, 4)] == [102, 102]


class TestReport:
    def test_coverage_and_deviation(self):
        report = BacktestReport(
            ["a", "b"], (1, 2), 0.9,
            hits={"a": {1: np.array([1, 1, 0, 1], bool), 2: np.array([1, 1, 1], bool)},
                  "b": {1: np.array([1, 1, 1, 1], bool), 2: np.array([0, 1, 1], bool)}},
            lengths={"a": {1: np.array([1.0, 2.0, 3.0, 4.0]), 2: np.array([2.0, 2.0, 2.0])},
                     "b": {1: np.array([1.0, 1.0, 1.0, 1.0]), 2: np.array([3.0, 3.0, 3.0])}},
        )
        assert report.coverage("a", 1) == 75.0
        assert report.mean_length("a", 1) == 2.5
        assert report.windows("a", 2) == 3
        assert report.d_bar("a") == pytest.approx((15.0 + 10.0) / 2)
        assert report.d_bar("b") == pytest.approx((10.0 + 100.0 * (0.9 - 2 / 3)) / 2)
        assert report.ranking() == ["a", "b"]
        frame = report.to_frame()
        assert list(frame.columns) == ["method", "beta_1", "beta_2", "D_bar", "len_1", "len_2",
                                       "windows_1", "windows_2"]


class TestRollingWindows:
    def test_constant_series_with_bj(self):
        series = TimeSeries(np.full(60, 4.0))
        report = rwpoos(series, _config())
        assert report.windows("bj", 1) == 40 and report.windows("bj", 2) == 39
        assert report.coverage("bj", 1) == 100.0 and report.coverage("bj", 2) == 100.0
        assert report.mean_length("bj", 1) == 0.0

    def test_targets_follow_each_window(self, monkeypatch):
        # y_t = t; the stub's interval for horizon k is centred on last + k
        def stub(train, cfg, rng, k=1, true_model=None):
            spread = np.linspace(-0.5, 0.5, 101)[:, None]
            centres = train.values[-1] + np.arange(1, k + 1)
            return IntervalSample(cfg.method, "percentile", centres, values=centres + spread)

        monkeypatch.setattr(qar_backtest, "bootstrap_sample", stub)
        report = rwpoos(TimeSeries(np.arange(40.0)), _config(horizons=(1, 2, 3)))
        for k in (1, 2, 3):
            assert report.coverage("bj", k) == 100.0
            assert report.windows("bj", k) == 40 - 20 - k + 1

    def test_common_windows(self):
        cfg = _config(horizons=(1, 3), common_windows=True)
        report = rwpoos(TimeSeries(np.full(40, 1.0)), cfg)
        assert report.windows("bj", 1) == report.windows("bj", 3) == 18

    def test_series_too_short(self):
        with pytest.raises(SeriesTooShort):
            rwpoos(TimeSeries(np.arange(21.0)), _config(horizons=(1, 2)))

    def test_order_mismatch(self, ar1_series):
        cfg = _config(methods=(MethodConfig("bj", p=2),))
        with pytest.raises(DomainError):
            rwpoos(ar1_series, cfg)

    def test_failures_are_excluded(self, ar1_series, monkeypatch):
        real = qar_backtest.bootstrap_sample

        def flaky(train, cfg, rng, k=1, true_model=None):
            if cfg.method == "cb":
                raise MethodError("collinear bootstrap design")
            return real(train, cfg, rng, k)

        monkeypatch.setattr(qar_backtest, "bootstrap_sample", flaky)
        cfg = _config(methods=(MethodConfig("bj"), MethodConfig("cb", B=50)))
        report = rwpoos(ar1_series, cfg)
        assert report.excluded == {"bj": 0, "cb": 30}
        assert report.windows("cb", 1) == 0
        assert np.isnan(report.coverage("cb", 1))
        assert report.windows("bj", 1) == 30

    def test_too_few_rows_for_refits_are_excluded(self):
        # four observations leave three design rows; full leave-one-out deletes two of them
        series = TimeSeries(np.random.default_rng(8).normal(size=30))
        cfg = _config(window=4, methods=(MethodConfig("bj"), MethodConfig("ar-proot", B=40)), horizons=(1,))
        report = rwpoos(series, cfg)
        assert report.excluded == {"bj": 0, "ar-proot": 26}
        assert report.windows("ar-proot", 1) == 0
        assert report.windows("bj", 1) == 26

    def test_shift_leaves_hits_unchanged(self, ar1_series):
        methods = tuple(backtest_methods(["bj", "ar-perc", "ar-proot"], 1, 0.9, B=40))
        cfg = _config(window=30, methods=methods, level=0.9)
        base = rwpoos(ar1_series, cfg)
        moved = rwpoos(ar1_series.shifted(100.0), cfg)
        for method in ("bj", "ar-perc", "ar-proot"):
            for k in (1, 2):
                np.testing.assert_array_equal(moved.hits[method][k], base.hits[method][k])
                np.testing.assert_allclose(moved.lengths[method][k], base.lengths[method][k], atol=1e-8)

    def test_window_records(self):
        series = TimeSeries(np.arange(40.0), pd.Index(np.arange(1960, 2000)))
        report = rwpoos(series, _config(horizons=(1, 3)))
        records = report.records
        assert list(records.columns) == ["window", "method", "horizon", "t", "label", "lower", "upper",
                                         "point", "target", "covered"]
        assert len(records) == report.windows("bj", 1) + report.windows("bj", 3)
        first = records[(records["window"] == 1) & (records["horizon"] == 3)].iloc[0]
        assert first["t"] == 23 and first["label"] == 1982 and first["target"] == 22.0

    def test_worker_count_does_not_change_results(self, ar1_series):
        cfg = _config(methods=tuple(backtest_methods(["bj", "cb", "ar-perc"], 1, 0.9, B=40)))
        serial = rwpoos(ar1_series, cfg, workers=1).to_frame()
        parallel = rwpoos(ar1_series, cfg, workers=2).to_frame()
        pd.testing.assert_frame_equal(serial, parallel)

    def test_score_window_rows(self, ar1_series):
        cfg = _config(methods=(MethodConfig("cb", B=50),), horizons=(1, 2))
        rows, failures = score_window(ar1_series, cfg, 29)
        # the last window only reaches horizon 1
        assert [(m, k) for m, k, *_ in rows] == [("cb", 1)]
        assert failures == []

    def test_save(self, ar1_series, tmp_path):
        report = rwpoos(ar1_series, _config())
        paths = report.save(str(tmp_path / "bt"))
        assert all(os.path.exists(p) for p in paths)
        with open(paths[1], encoding="utf-8") as f:
            doc = json.load(f)
        assert doc["level"] == 0.95 and doc["methods"][0]["method"] == "bj"
        windows = pd.read_csv(paths[2])
        assert len(windows) == report.windows("bj", 1) + report.windows("bj", 2)


AR_BASED = ("bj", "ts", "cb", "prr", "prr-lad", "pp", "ar-perc", "ar-proot")
QAR_BASED = ("x", "qar-perc", "qar-proot")


def _real_data_report(name, window, p, workers=4):
    series = load_series_csv(data_file(name))
    methods = tuple(backtest_methods(AR_BASED + QAR_BASED, p, 0.95))
    cfg = BacktestConfig(window=window, p=p, methods=methods, horizons=(1, 2, 3, 4), common_windows=True)
    return rwpoos(series, cfg, workers=workers)


@pytest.mark.data
@pytest.mark.slow
def test_unemployment_backtest():
    report = _real_data_report("unemployment.csv", 50, 2)
    assert all(report.windows("ar-perc", k) == 102 for k in (1, 2, 3, 4))
    assert report.d_bar("ar-perc") <= 5.0
    assert "ar-perc" in report.ranking()[:3]
    reference = {1: 92.16, 2: 91.18, 3: 90.20, 4: 92.16}
    for k, value in reference.items():
        assert report.coverage("ar-perc", k) == pytest.approx(value, abs=2.5)


@pytest.mark.data
@pytest.mark.slow
def test_gasoline_backtest():
    report = _real_data_report("gasoline.csv", 600, 4)
    assert report.windows("qar-perc", 1) == 96
    for k in (1, 2, 3, 4):
        assert all(report.coverage(m, k) >= 92.0 for m in QAR_BASED)
        assert all(report.coverage(m, k) <= 90.0 for m in AR_BASED)
    assert report.d_bar("qar-perc") <= 3.0
