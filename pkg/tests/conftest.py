import pytest

from wavelet_qm import (MinimalPacketWavelet, PhysicalParams, ScalePositionGrid, SpatialGrid,
                        calibrate_frame, evaluate_wavelet)
from wavelet_qm import _kernels

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def params():
    return PhysicalParams(1.0, 1.0)


@pytest.fixture(scope="session")
def x_grid():
    return SpatialGrid(-40.0, 40.0, 2048)


@pytest.fixture(scope="session")
def ab_grid(x_grid):
    return ScalePositionGrid(0.25, 8.0, 32, x_grid)


@pytest.fixture(scope="session")
def wavelet():
    return MinimalPacketWavelet(1.0, 5.0, 0.0)


@pytest.fixture(scope="session")
def probe(wavelet, params, x_grid):
    return evaluate_wavelet(wavelet, params, x_grid)


@pytest.fixture(scope="session")
def calibration(wavelet, ab_grid, params, probe):
    return calibrate_frame(wavelet, ab_grid, params, probe)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    if request.param == "numba" and not _kernels.HAS_NUMBA:
        pytest.skip("numba not installed")
    old = _kernels.BACKEND
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(old)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
