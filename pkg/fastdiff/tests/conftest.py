import math

import numpy as np
import pytest

from fastdiff.analysis_functions.params import ParamSet
from fastdiff.analysis_functions import profiles


@pytest.fixture(scope="session")
def params5():
    return ParamSet(3, 0.2, 1.0, 5.0)


@pytest.fixture(scope="session")
def params8():
    return ParamSet(3, 0.2, 1.0, 8.0)


@pytest.fixture(scope="session")
def sandwich_grid():
    return np.linspace(0.0, math.log(1e3), 400)


@pytest.fixture(scope="session")
def regular8(params8):
    return profiles.solve_regular(params8, r_max=1e3, tol=1e-10)


@pytest.fixture(scope="session")
def singular8(params8):
    return profiles.solve_singular(params8, r_max=1e3, tol=1e-10)


@pytest.fixture(scope="session")
def regular_tail8(params8):
    """Regular profile out to s = 100, long enough for tail fits."""
    return profiles.solve_regular(params8, r_max=math.exp(100), tol=1e-10, n_nodes=2000)


@pytest.fixture(scope="session")
def regular_tail8_lambda2(params8):
    from dataclasses import replace
    return profiles.solve_regular(replace(params8, lam=2.0), r_max=math.exp(100), tol=1e-10, n_nodes=2000)
