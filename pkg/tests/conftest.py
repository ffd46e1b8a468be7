import numpy as np
import pytest

from gaussrank import expr as E
from gaussrank import variety as V


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def twisted_cubic():
    return V.rational_normal_curve(3, "twisted cubic")


@pytest.fixture
def ruled_quadric():
    s, t = E.param(0), E.param(1)
    return V.ParametrizedVariety("ruled quadric", 2, 3, [E.const(1), s, t, s * t])


@pytest.fixture
def veronese():
    s, t = E.param(0), E.param(1)
    return V.ParametrizedVariety("Veronese surface", 2, 5,
                                 [E.const(1), s, t, s * s, s * t, t * t])


@pytest.fixture
def conic_cone():
    t = E.param(0)
    conic = V.ParametrizedVariety("conic", 1, 3, [E.const(1), t, t * t, E.const(0)])
    return V.cone(conic, [[0, 0, 0, 1]], name="cone over conic")


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
