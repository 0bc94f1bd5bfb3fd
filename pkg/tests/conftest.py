import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fourier_pole.geometry import CameraView, OrthographicIntrinsics, SphericalPosition, hover_frame


def ortho_view(n=64, lat=0.25, lon=0.0, roll=0.0, scale=None, r=10.0):
    """Orthographic hovering view; the default scale fits a radius-1.6 body."""
    scale = 0.33 * n / 1.6 if scale is None else scale
    pos = SphericalPosition(r, lat, lon)
    return CameraView(pos, hover_frame(pos, roll), OrthographicIntrinsics(scale, n // 2, n // 2), n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
