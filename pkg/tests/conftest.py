import sys

import numpy as np
import pytest

from ldpfreq import data


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def _known(key):
    try:
        return data.fetch(key)
    except data.DatasetUnavailable as exc:
        pytest.fail(f"{key} dataset unavailable: {exc}")


@pytest.fixture(scope="session")
def statlog_path():
    return _known("statlog")


@pytest.fixture(scope="session")
def adult_path():
    return _known("adult")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.LINES:
        terminalreporter.write_line(line)
