import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from invest_eq.model import CpParams, Market

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

psi_values = st.floats(min_value=0.01, max_value=10.0, allow_nan=False)
b_values = st.floats(min_value=1.0, max_value=3.0, allow_nan=False)
Q_values = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


@st.composite
def cps(draw, psi=psi_values, b=b_values):
    return CpParams.from_psi(draw(psi), draw(b))


@st.composite
def markets(draw, min_size=1, max_size=4, psi=psi_values, b=b_values):
    n = draw(st.integers(min_size, max_size))
    return Market(tuple(draw(cps(psi, b)) for _ in range(n)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
