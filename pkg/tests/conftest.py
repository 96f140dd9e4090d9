import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("locklab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("locklab")


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_isochoric(rng, scale=0.4):
    F = np.eye(3) + scale * rng.standard_normal((3, 3))
    while np.linalg.det(F) <= 0.05:
        F = np.eye(3) + scale * rng.standard_normal((3, 3))
    return F / np.linalg.det(F) ** (1.0 / 3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
