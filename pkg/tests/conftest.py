import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings, strategies as st

from kshflow import QuadraticHamiltonian

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def hyperbolic_hamiltonians(draw, allow_zero_h11=False):
    """Quadratic H with det Hess <= -0.05 and |h11| in [0.2, 5] (or 0)."""
    if allow_zero_h11 and draw(st.booleans()):
        h11 = 0.0
    else:
        h11 = draw(st.sampled_from([-1.0, 1.0])) * draw(st.floats(0.2, 5.0))
    h12 = draw(st.floats(-2.0, 2.0))
    h22 = draw(st.floats(-3.0, 3.0))
    H = QuadraticHamiltonian(h11, h12, h22)
    assume(-H.disc() >= 0.05)
    return H


@pytest.fixture
def grid25():
    u = np.linspace(-2.0, 2.0, 5)
    p, x = np.meshgrid(u, u, indexing="ij")
    return np.c_[p.ravel(), x.ravel()]
