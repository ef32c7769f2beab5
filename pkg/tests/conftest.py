import pytest

from wagner.chart import Chart, FiberPoint
from wagner.finsler import FinslerMetric
from wagner.options import EngineOptions


@pytest.fixture(scope='session')
def heis5():
    return Chart.preset('HEIS5')


@pytest.fixture(scope='session')
def euc():
    return FinslerMetric.preset('F_EUC', 2)


@pytest.fixture(scope='session')
def warp5():
    return FinslerMetric.preset('WARP5')


@pytest.fixture(scope='session')
def curv5():
    return FinslerMetric.preset('CURV5')


@pytest.fixture(scope='session')
def rand5():
    return FinslerMetric.preset('RAND5')


@pytest.fixture(scope='session')
def origin_e1():
    return FiberPoint((0.0, 0.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))


@pytest.fixture(scope='session')
def generic_point():
    return FiberPoint((0.25, -0.5, 0.1, 0.3, 0.7), (0.6, -0.2, 0.9, 0.4))


@pytest.fixture(scope='session')
def options():
    return EngineOptions()
