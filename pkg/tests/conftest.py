import numpy as np
import pytest

from tunebench.gp import Observation
from tunebench.params import ParamPoint


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long reproduction suite")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="long suite; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def random_dataset(rng, n, scale=1.0, y_hi=0.3):
    """``n`` distinct observations with points in ``[0, scale]^2`` and values in ``[0, y_hi]``."""
    X = rng.uniform(0.0, scale, (n, 2))
    y = rng.uniform(0.0, y_hi, n)
    return [Observation(ParamPoint(float(a), float(t)), float(v)) for (a, t), v in zip(X, y)]


@pytest.fixture
def rng():
    return np.random.default_rng(20170607)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
