import numpy as np
import pytest

from delaunay_locality import Dictionary


@pytest.fixture
def triangle():
    return Dictionary.from_rows([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def four_points():
    return Dictionary.from_rows([[0, 0], [1, 0], [0, 1], [2, 2]])


@pytest.fixture
def square():
    return Dictionary.from_rows([[1, 0], [0, 1], [-1, 0], [0, -1]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_dictionary(rng, n, d):
    return Dictionary.from_rows(rng.random((n, d)))


_ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record one pass/fail line per acceptance criterion."""

    def log(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[k])
