import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hill_spectra.potential import Potential

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

COS2 = Potential.cos(1, 2.0)


@pytest.fixture
def cos2():
    return COS2


def _coeff(real_only):
    part = st.floats(-1.0, 1.0, allow_nan=False).map(lambda v: round(v, 6))
    if real_only:
        return part
    return st.tuples(part, part).map(lambda t: complex(*t))


@st.composite
def potentials(draw, max_bandwidth=3, real=None, max_amplitude=1.0):
    """Random band-limited zero-mean potentials (real unless ``real=False``)."""
    M = draw(st.integers(1, max_bandwidth))
    is_real = draw(st.booleans()) if real is None else real
    coeffs = {}
    for n in range(1, M + 1):
        c = draw(_coeff(False)) * max_amplitude
        if is_real:
            coeffs[n] = c
            coeffs[-n] = np.conj(c)
        else:
            coeffs[n] = c
            coeffs[-n] = draw(_coeff(False)) * max_amplitude
    return Potential(coeffs, M)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
