import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hardpulse.pulse import HardPulse

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_pulse(rng, length, amp, start=None, delta=1.0):
    om = rng.uniform(0, amp, length) * np.exp(2j * np.pi * rng.uniform(size=length))
    if start is None:
        start = int(rng.integers(-length, 4))
    return HardPulse(delta, start, om)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
