import json

import numpy as np
import pandas as pd
import pytest

from qarcast.exceptions import EmptyFile, NonMonotoneLabels, ParseError
from qarcast.qar_io import load_series_csv, save_json, save_table


class TestLoadSeries:
    def test_two_rows(self, write_csv):
        series = load_series_csv(write_csv("date,value\n1948-01,3.4\n1948-07,3.8\n"))
        assert len(series) == 2
        np.testing.assert_allclose(series.values, [3.4, 3.8])
        assert isinstance(series.labels, pd.DatetimeIndex)

    def test_numeric_labels(self, series_csv, ar1_series):
        series = load_series_csv(series_csv)
        np.testing.assert_allclose(series.values, ar1_series.values, rtol=1e-12)
        assert list(series.labels[:2]) == [2000, 2001]

    def test_string_labels(self, write_csv):
        series = load_series_csv(write_csv("period,value\nalpha,1.0\nbeta,2.0\ngamma,1.5\n"))
        assert list(series.labels) == ["alpha", "beta", "gamma"]

    def test_out_of_order_dates(self, write_csv):
        with pytest.raises(NonMonotoneLabels):
            load_series_csv(write_csv("date,value\n1948-07,3.8\n1948-01,3.4\n"))

    def test_non_numeric_value_reports_row(self, write_csv):
        with pytest.raises(ParseError) as err:
            load_series_csv(write_csv("date,value\n1948-01,3.4\n1948-07,n/a\n"))
        assert err.value.row == 2

    def test_missing_value(self, write_csv):
        with pytest.raises(ParseError) as err:
            load_series_csv(write_csv("date,value\n1,3.4\n2,\n3,1.0\n"))
        assert err.value.row == 2

    def test_empty_file(self, write_csv):
        with pytest.raises(EmptyFile):
            load_series_csv(write_csv(""))

    def test_header_only(self, write_csv):
        with pytest.raises(EmptyFile):
            load_series_csv(write_csv("date,value\n"))

    def test_single_column(self, write_csv):
        with pytest.raises(ParseError):
            load_series_csv(write_csv("value\n1.0\n2.0\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_series_csv(str(tmp_path / "absent.csv"))


class TestSaveTable:
    @pytest.fixture()
    def frame(self):
        return pd.DataFrame({"method": ["bj", "pp"], "value": [1.0 / 3.0, 12345.678901]})

    def test_csv_uses_six_significant_digits(self, frame, tmp_path):
        path = tmp_path / "out" / "table.csv"
        save_table(frame, str(path))
        assert path.read_text(encoding="utf-8") == "method,value\nbj,0.333333\npp,12345.7\n"

    def test_json_keeps_full_precision(self, frame, tmp_path):
        path = tmp_path / "table.json"
        save_table(frame, str(path))
        records = json.loads(path.read_text(encoding="utf-8"))
        assert records[0]["value"] == 1.0 / 3.0

    def test_tab_separated(self, frame, tmp_path):
        path = tmp_path / "table.tsv"
        save_table(frame, str(path))
        assert path.read_text(encoding="utf-8").splitlines()[0] == "method\tvalue"

    def test_excel(self, frame, tmp_path):
        pytest.importorskip("openpyxl")
        path = tmp_path / "table.xlsx"
        save_table(frame, str(path))
        back = pd.read_excel(path, engine="openpyxl")
        assert list(back["method"]) == ["bj", "pp"]

    def test_unsupported_extension(self, frame, tmp_path):
        with pytest.raises(ValueError):
            save_table(frame, str(tmp_path / "table.parquet"))

    def test_json_numpy_values(self, tmp_path):
        path = tmp_path / "doc.json"
        save_json({"count": np.int64(3), "values": np.array([0.5, 1.5])}, str(path))
        assert json.loads(path.read_text(encoding="utf-8")) == {"count": 3, "values": [0.5, 1.5]}
