import numpy as np
import pytest

from steinersym import verify
from steinersym.geom import Polygon


@pytest.fixture(scope="session")
def store(tmp_path_factory):
    return verify.MapStore(1e-4, tmp_path_factory.mktemp("maps"))


@pytest.fixture(scope="session")
def fixtures():
    return {fx.name: fx for fx in verify.corpus()}


@pytest.fixture(scope="session")
def square():
    return Polygon.rectangle(-1, -1, 1, 1)


@pytest.fixture(scope="session")
def diamond():
    return Polygon.from_complex(np.array([1, 1j, -1, -1j]))


CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
