import numpy as np
import pytest
from scipy.optimize import brentq

from hillgaps import galerkin
from hillgaps.discriminant import band_edges_from_trace, delta_comb_trace
from hillgaps.potential import power_decay

SEED = 0


def kp_gap_oracle(alpha, n):
    """Gap n of the delta comb from tan(eps/2) = alpha / (2 (n pi + eps)).

    The lower edge sits at (n pi)^2, the upper at (n pi + eps)^2.
    """
    f = lambda e: np.tan(e / 2) - alpha / (2 * (n * np.pi + e))
    eps = brentq(f, 1e-300, np.pi - 1e-9, xtol=1e-14, rtol=1e-15)
    return (n * np.pi + eps) ** 2 - (n * np.pi) ** 2


@pytest.fixture(scope="session")
def pd3():
    return power_decay(3, SEED)


@pytest.fixture(scope="session")
def pd3_spectrum(pd3):
    return galerkin.band_edges(pd3, 48, tol=1e-10)


@pytest.fixture(scope="session")
def kp_exact():
    return band_edges_from_trace(lambda lam: delta_comb_trace(1.0, lam), 64, root_tol=1e-12)
