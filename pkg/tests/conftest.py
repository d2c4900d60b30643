import math

import pytest
from hypothesis import HealthCheck, settings

from lgallee.model import ModelParams

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE: dict[int, str] = {}

Q_MINUS = (73 - math.sqrt(5)) / 200
Q_PLUS = (73 + math.sqrt(5)) / 200


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


@pytest.fixture(scope="session")
def jit():
    """Compile the integrator kernels once so timed sections measure computation."""
    from lgallee.dynamics import integrate

    p = ModelParams(0.5, -0.05, 0.51, 0.1)
    integrate((0.5, 0.2), p, 1.0)
    from lgallee.dynamics.basins import basins

    basins(p, resolution=1, detect_cycles=False)
    return True
