from pathlib import Path

import numpy as np
import pytest

from npduel.cnf import CnfFormula

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def sigma():
    """(x + y + ~z)(~x + ~y)(~y + z) over x1=x, x2=y, x3=z."""
    return CnfFormula.from_ints(3, [[1, 2, -3], [-1, -2], [-2, 3]])


@pytest.fixture
def contradiction():
    return CnfFormula.from_ints(1, [[1], [-1]])


@pytest.fixture
def tautology():
    return CnfFormula.from_ints(1, [[1, -1]])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
