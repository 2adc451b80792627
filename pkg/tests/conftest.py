import os

import numpy as np
import pytest

from qarcast.qar_dgp import DgpSpec, simulate_dgp
from qarcast.qar_series import RngStream


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run Monte-Carlo reproduction tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture()
def ar1_spec() -> DgpSpec:
    return DgpSpec(model="M1", phi1=0.6)


@pytest.fixture()
def ar1_series(ar1_spec):
    # AR(1) with phi_1 = 0.6 and N(0,1) innovations
    return simulate_dgp(ar1_spec, 50, RngStream(20240601))


@pytest.fixture()
def qar_series():
    return simulate_dgp(DgpSpec(model="M4"), 120, RngStream(7))


@pytest.fixture()
def write_csv(tmp_path):
    def _write(text, name="series.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture()
def series_csv(write_csv, ar1_series):
    lines = ["date,value"]
    lines += [f"{2000 + i},{float(v)!r}" for i, v in enumerate(ar1_series.values)]
    return write_csv("\n".join(lines) + "\n")


def data_file(name):
    """Path of a fetched real series, or skip the test when it is absent."""
    data_dir = os.environ.get("QARCAST_DATA_DIR")
    path = os.path.join(data_dir, name) if data_dir else None
    if not path or not os.path.exists(path):
        pytest.skip(f"{name} not found under QARCAST_DATA_DIR")
    return path


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
