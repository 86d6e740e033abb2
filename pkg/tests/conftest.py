import numpy as np
import pytest

from vexlab.exponent import build_tilde_p, conjugate, theorem52_width
from vexlab.fourier import build_phi_n


@pytest.fixture(scope="session")
def tilde_p_50():
    return build_tilde_p(50)


@pytest.fixture(scope="session")
def tilde_q_50(tilde_p_50):
    return conjugate(tilde_p_50)


@pytest.fixture(scope="session")
def phi_trains():
    """Plain spike trains for the lemma-level checks."""
    return {n: build_phi_n(n) for n in (25, 50, 100)}


@pytest.fixture(scope="session")
def phi_trains_budgeted():
    """Spike trains respecting the grid-exponent width slots."""
    return {
        n: build_phi_n(n, width_budget=lambda k, n=n: theorem52_width(n, k))
        for n in (25, 50, 100)
    }


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
