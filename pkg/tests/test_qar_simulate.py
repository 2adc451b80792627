import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from qarcast import qar_simulate
from qarcast.exceptions import ConfigError, DomainError, MethodError
from qarcast.qar_dgp import DgpSpec
from qarcast.qar_intervals import MethodConfig, PredictionInterval
from qarcast.qar_simulate import (
    PROFILE_ENV_VAR,
    RAW_COLUMNS,
    STATISTICS,
    ExperimentConfig,
    aggregate,
    conditional_coverage,
    coverage_statistics,
    default_method_configs,
    experiment_from_dict,
    load_experiment_config,
    resolve_profile,
    run_experiment,
    sweep_phi,
    time_methods,
)

TEMPLATE = os.path.join(os.path.dirname(__file__), "..", "config_template.json")


@pytest.fixture(autouse=True)
def no_profile_env(monkeypatch):
    monkeypatch.delenv(PROFILE_ENV_VAR, raising=False)


@pytest.fixture()
def small_experiment():
    methods = (MethodConfig("bj"), MethodConfig("cb", B=50), MethodConfig("oracle", oracle_draws=200))
    return ExperimentConfig(dgp=DgpSpec(model="M1", phi1=0.6), n=30, horizons=(1, 2), methods=methods,
                            S=4, F=50, seed=3)


class TestScoring:
    def test_conditional_coverage_counts(self):
        pi = PredictionInterval(-1.0, 1.0, 1, 0.95, "bj")
        beta_s, above, below = conditional_coverage(pi, [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
        assert (beta_s, above, below) == (2 / 6, 1 / 6, 1 / 6)

    def test_zero_width_interval(self):
        pi = PredictionInterval(0.0, 0.0, 1, 0.95, "cb")
        assert conditional_coverage(pi, [0.0, 0.0, 1.0, -1.0]) == (0.5, 0.25, 0.25)

    def test_needs_futures(self):
        with pytest.raises(DomainError):
            conditional_coverage(PredictionInterval(0.0, 1.0, 1, 0.95, "bj"), [])

    def test_statistics_by_hand(self):
        stats = coverage_statistics([0.9, 1.0], [0.05, 0.0], [0.05, 0.0], [2.0, 4.0], 0.95)
        assert stats["beta_bar"] == pytest.approx(0.95)
        assert stats["se"] == pytest.approx(0.05)
        assert stats["mse"] == pytest.approx(0.0025)
        assert stats["gamma_hat"] == 0.5
        assert stats["a_bar"] == pytest.approx(0.025) and stats["b_bar"] == pytest.approx(0.025)
        assert stats["len_bar"] == 3.0
        assert stats["len_se"] == pytest.approx(math.sqrt(2.0) / 2.0)
        assert stats["median"] == pytest.approx(0.95)
        assert stats["replications"] == 2

    def test_gamma_counts_exact_hits(self):
        stats = coverage_statistics([57 / 60, 0.5, 1.0], [0, 0, 0], [0, 0, 0], [1, 1, 1], 0.95)
        assert stats["gamma_hat"] == pytest.approx(2 / 3)

    def test_needs_two_replications(self):
        with pytest.raises(DomainError):
            coverage_statistics([0.9], [0.0], [0.1], [1.0], 0.95)

    def test_aggregate_short_cell_is_nan(self):
        raw = pd.DataFrame([(1, "bj", 1, 0.95, 0.9, 0.05, 0.05, 3.0)], columns=RAW_COLUMNS)
        (cell,) = aggregate(raw, ["bj"]).cells
        assert cell.replications == 1
        assert math.isnan(cell.beta_bar)


class TestProfiles:
    def test_precedence(self, monkeypatch):
        assert resolve_profile() == "desk"
        assert resolve_profile(config_profile="paper") == "paper"
        monkeypatch.setenv(PROFILE_ENV_VAR, "paper")
        assert resolve_profile(config_profile="desk") == "paper"
        assert resolve_profile("desk", "paper") == "desk"

    def test_unknown_profile(self):
        with pytest.raises(ConfigError) as err:
            resolve_profile("huge")
        assert err.value.key_path == "--profile"

    def test_replications_follow_profile(self):
        desk = {m.method: m.replications for m in default_method_configs(1)}
        paper = {m.method: m.replications for m in default_method_configs(1, profile="paper")}
        assert (desk["ar-perc"], desk["qar-proot"], desk["oracle"]) == (500, 2000, 10000)
        assert (paper["ar-perc"], paper["qar-proot"]) == (1000, 5000)
        assert len(desk) == 12


class TestConfigParsing:
    def test_template_loads(self):
        cfg = load_experiment_config(TEMPLATE)
        assert cfg.dgp.model == "M1" and cfg.n == 50
        assert cfg.horizons == (1, 2, 3, 4)
        assert cfg.level_list == [0.95, 0.90]
        assert (cfg.S, cfg.F) == (200, 500)
        assert cfg.max_workers == 4
        assert [m.method for m in cfg.methods][-1] == "oracle"
        by_tag = {m.method: m for m in cfg.methods}
        assert by_tag["ar-perc"].replications == 500
        assert by_tag["qar-perc"].replications == 2000

    def test_explicit_profile_overrides_file(self):
        cfg = load_experiment_config(TEMPLATE, profile="paper")
        assert (cfg.S, cfg.F) == (500, 1000)

    def test_explicit_values_win(self):
        cfg = experiment_from_dict({"dgp": {"model": "M2", "order": 3}, "S": 10, "F": 20,
                                    "methods": [{"method": "ar-perc", "B": 77}]})
        assert (cfg.S, cfg.F, cfg.dgp.p) == (10, 20, 3)
        assert cfg.methods[0].replications == 77 and cfg.methods[0].p == 3

    @pytest.mark.parametrize("doc, key_path", [
        ({"n": 50}, "dgp"),
        ({"dgp": {"model": "M1"}, "n": "50"}, "n"),
        ({"dgp": {"model": "M1"}, "n": True}, "n"),
        ({"dgp": {"model": "M1", "sigma": 1.0}}, "dgp.sigma"),
        ({"dgp": {"model": "M9"}}, "dgp"),
        ({"dgp": {"model": "M1"}, "extra": 1}, "extra"),
        ({"dgp": {"model": "M1"}, "methods": ["bj", {"method": "qar-perc", "tau0": 1.5}]}, "methods[1]"),
        ({"dgp": {"model": "M1"}, "methods": [{"tau": 0.5}]}, "methods[0].method"),
        ({"dgp": {"model": "M1"}, "methods": [{"method": "cb", "B": 100}], "levels": [0.99]}, "methods[0]"),
        ({"dgp": {"model": "M1"}, "performance": {"threads": 2}}, "performance.threads"),
        ({"dgp": {"model": "M1"}, "horizons": [1, 2.5]}, "horizons[1]"),
    ])
    def test_errors_name_the_key(self, doc, key_path):
        with pytest.raises(ConfigError) as err:
            experiment_from_dict(doc)
        assert err.value.key_path == key_path

    def test_duplicate_methods(self):
        with pytest.raises(ConfigError):
            experiment_from_dict({"dgp": {"model": "M1"}, "methods": ["cb", "cb"]})

    def test_too_few_replications_in_config(self):
        with pytest.raises(ConfigError):
            experiment_from_dict({"dgp": {"model": "M1"}, "S": 1})

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"dgp": {"model": "M1"},', encoding="utf-8")
        with pytest.raises(ConfigError) as err:
            load_experiment_config(str(path))
        assert err.value.key_path == "<document>"


class TestRunExperiment:
    def test_cells_and_raw_rows(self, small_experiment):
        report = run_experiment(small_experiment, workers=1)
        assert len(report.cells) == 3 * 2
        assert len(report.raw) == 4 * 3 * 2
        assert report.excluded == {"bj": 0, "cb": 0, "oracle": 0}
        cell = report.cell("oracle", 2)
        assert cell.replications == 4
        assert 0.0 <= cell.beta_bar <= 1.0
        assert cell.a_bar + cell.b_bar + cell.beta_bar == pytest.approx(1.0)

    def test_worker_count_does_not_change_results(self, small_experiment):
        serial = run_experiment(small_experiment, workers=1)
        parallel = run_experiment(small_experiment, workers=2)
        pd.testing.assert_frame_equal(serial.raw, parallel.raw)
        pd.testing.assert_frame_equal(serial.to_frame(), parallel.to_frame())

    def test_seed_changes_results(self, small_experiment):
        from dataclasses import replace
        a = run_experiment(small_experiment, workers=1).raw
        b = run_experiment(replace(small_experiment, seed=4), workers=1).raw
        assert not a["beta_s"].equals(b["beta_s"])

    def test_failures_are_excluded(self, small_experiment, monkeypatch):
        real = qar_simulate.bootstrap_sample

        def flaky(series, cfg, rng, k=1, true_model=None):
            if cfg.method == "cb":
                raise MethodError("collinear bootstrap design")
            return real(series, cfg, rng, k, true_model=true_model)

        monkeypatch.setattr(qar_simulate, "bootstrap_sample", flaky)
        report = run_experiment(small_experiment, workers=1)
        assert report.excluded["cb"] == 4
        assert not any(c.method == "cb" for c in report.cells)
        assert report.cell("bj").replications == 4

    def test_extra_levels(self):
        cfg = ExperimentConfig(dgp=DgpSpec(model="M1"), n=30, horizons=(1,),
                               methods=(MethodConfig("bj"),), S=3, F=20, levels=(0.8,))
        report = run_experiment(cfg, workers=1)
        narrow, wide = report.cell("bj", 1, 0.8), report.cell("bj", 1, 0.95)
        assert narrow.len_bar < wide.len_bar

    def test_save_writes_reports(self, small_experiment, tmp_path):
        report = run_experiment(small_experiment, workers=1)
        paths = report.save(str(tmp_path / "out"))
        assert all(os.path.exists(p) for p in paths)
        with open(paths[0], encoding="utf-8") as f:
            assert f.readline().strip() == "method,horizon,level,statistic,value"
        frame = pd.read_csv(paths[0])
        assert len(frame) == len(report.cells) * len(STATISTICS)
        with open(paths[1], encoding="utf-8") as f:
            doc = json.load(f)
        assert doc["config"]["S"] == 4 and len(doc["cells"]) == 6
        assert list(pd.read_csv(paths[2]).columns) == RAW_COLUMNS


class TestStudyHelpers:
    def test_sweep_needs_ar1_model(self, small_experiment):
        from dataclasses import replace
        with pytest.raises(DomainError):
            sweep_phi(replace(small_experiment, dgp=DgpSpec(model="M3")))

    def test_sweep_over_coefficients(self):
        cfg = ExperimentConfig(dgp=DgpSpec(model="M1"), n=30, horizons=(1,), methods=(MethodConfig("bj"),),
                               S=2, F=10)
        reports = sweep_phi(cfg, phis=(0.3, 0.9), workers=1)
        assert sorted(reports) == [0.3, 0.9]
        assert reports[0.9].config["dgp"]["phi1"] == 0.9

    def test_time_methods(self):
        frame = time_methods(DgpSpec(model="M1"), 30, 1, [MethodConfig("bj"), MethodConfig("cb", B=50)],
                             repeats=2)
        assert list(frame["method"]) == ["bj", "cb"]
        assert (frame["mean_seconds"] >= 0).all()


@pytest.mark.slow
def test_oracle_and_bootstrap_coverage_under_ar1():
    methods = (MethodConfig("bj"), MethodConfig("ar-proot", B=500), MethodConfig("oracle"))
    cfg = ExperimentConfig(dgp=DgpSpec(model="M1", phi1=0.6), n=50, horizons=(1,), methods=methods,
                           S=100, F=1000, seed=11)
    report = run_experiment(cfg)
    assert report.cell("oracle").beta_bar == pytest.approx(0.95, abs=0.01)
    assert report.cell("bj").beta_bar > 0.9
    assert report.cell("ar-proot").beta_bar > 0.9
    assert np.isfinite(report.cell("ar-proot").len_bar)


@pytest.mark.slow
@pytest.mark.parametrize("model", ["M1", "M2", "M3", "M4"])
def test_oracle_within_three_standard_errors(model):
    dgp = DgpSpec(model=model)
    cfg = ExperimentConfig(dgp=dgp, n=50, horizons=(1, 2, 3, 4), methods=(MethodConfig("oracle", p=dgp.p),),
                           S=200, F=500, seed=5)
    report = run_experiment(cfg)
    for cell in report.cells:
        assert abs(cell.beta_bar - 0.95) <= 3 * cell.se


@pytest.mark.slow
def test_timing_order():
    """Only a partial ordering is checked. Least-squares refits are vectorised
    across replications and qar-proot reuses solver vertices along the quantile
    path. The prr family, ts and pp are left unordered and qar-proot is only
    compared with x.
    """
    methods = [MethodConfig(tag, p=1, B=1000 if tag not in ("x", "qar-perc", "qar-proot") else 5000)
               for tag in ("cb", "ar-perc", "ts", "prr", "prr-lad", "pp", "x", "qar-perc", "qar-proot")]
    frame = time_methods(DgpSpec(model="M1"), 200, 4, methods, repeats=3).set_index("method")
    seconds = frame["mean_seconds"]
    assert seconds["cb"] < seconds["ar-perc"] < seconds["qar-perc"]
    assert seconds["x"] < seconds["qar-perc"]
    assert seconds["x"] < seconds["qar-proot"]
