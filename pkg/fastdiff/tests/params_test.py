import math

import pytest
from hypothesis import given, assume, settings, strategies as st

from fastdiff.analysis_functions.params import (ParamSet, validate, derive, tail_roots, beta0_threshold,
                                                classify_beta, beta2_lower_bound)
from fastdiff.utils.errors import RangeError


def test_closed_form_constants(params5):
    c = derive(params5)
    assert c.k == pytest.approx(0.4, rel=1e-14)
    assert c.alpha == pytest.approx(13.75, rel=1e-14)
    assert c.beta1 == pytest.approx(2.5, rel=1e-14)
    assert c.beta0 == pytest.approx(2.0, rel=1e-14)
    assert c.Cstar == pytest.approx(0.2, rel=1e-14)
    assert c.n_beta_minus_alpha == pytest.approx(1.25, rel=1e-14)
    assert c.A_of_beta == pytest.approx(4.0, rel=1e-14)
    assert c.discriminant == pytest.approx(13.44, rel=1e-14)


def test_tail_roots_vieta(params5):
    c = derive(params5)
    assert not c.complex_roots
    assert c.gamma1 * c.gamma2 == pytest.approx(1.0, rel=1e-13)
    assert c.gamma1 + c.gamma2 == pytest.approx(5.0, rel=1e-13)
    assert 0 < c.gamma1 < c.gamma2
    assert c.M0 == pytest.approx(2 * 0.2 * 0.4 / (0.8 * (c.gamma2 - c.gamma1)), rel=1e-13)


def test_second_order_tail_exponent(params8):
    c = derive(params8)
    assert c.gamma1 == pytest.approx(0.12701665379, rel=1e-9)
    assert c.regime.name == "second-order"
    assert c.A1_beta == pytest.approx(1 / 0.8 - 8 * c.gamma1, rel=1e-13)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_beta0_at_the_critical_exponent(n):
    m = (n - 2) / (n + 2)
    params = ParamSet(n, m, 1.0, 10.0)
    k = n - 2 - n * m
    assert beta0_threshold(params) == pytest.approx(math.sqrt(2 * (1 - m) / k), rel=1e-13)
    # at beta0 the discriminant closes
    _, disc, gamma1, gamma2 = tail_roots(params, beta0_threshold(params))
    assert gamma1 == pytest.approx(gamma2, rel=1e-6)


def test_beta2_is_at_least_the_other_thresholds(params5):
    beta2 = beta2_lower_bound(params5)
    assert beta2 >= 2.5
    assert beta2 == pytest.approx(2 * math.sqrt(2 * 0.8 / (0.4 * (1 - 0.9 ** 4))), rel=1e-12)


@pytest.mark.parametrize("beta,regime", [(2.0, "existence-only"), (5.0, "real-roots"), (8.0, "second-order")])
def test_regimes(beta, regime):
    assert classify_beta(ParamSet(3, 0.2, 1.0, beta)).name == regime


def test_uniqueness_boundary():
    regime = classify_beta(ParamSet(3, 0.2, 1.0, 2.5))
    assert regime.at_uniqueness_boundary
    assert regime.sign == 0


@pytest.mark.parametrize("bad", [
    ParamSet(2, 0.1, 1.0, 5.0),
    ParamSet(3, 0.0, 1.0, 5.0),
    ParamSet(3, 1 / 3, 1.0, 5.0),
    ParamSet(3, 0.2, -1.0, 5.0),
    ParamSet(3, 0.2, 1.0, 0.4),
    ParamSet(3, 0.2, 1.0, 5.0, lam=0.0),
    ParamSet(3, 0.2, 1.0, float("nan")),
])
def test_validate_rejects(bad):
    with pytest.raises(RangeError):
        validate(bad)


def test_validate_accepts_beta_min():
    validate(ParamSet(3, 0.2, 1.0, 0.5))


@st.composite
def param_sets(draw):
    n = draw(st.integers(min_value=3, max_value=8))
    m = draw(st.floats(min_value=0.02, max_value=0.98)) * (n - 2) / n
    rho1 = draw(st.floats(min_value=0.1, max_value=10.0))
    params = ParamSet(n, m, rho1, 1.0)
    beta = params.beta_min * draw(st.floats(min_value=1.0, max_value=50.0))
    return ParamSet(n, m, rho1, beta)


@settings(max_examples=100, deadline=None)
@given(param_sets())
def test_sign_of_n_beta_minus_alpha(params):
    c = derive(params)
    beta1 = params.rho1 / params.k
    assume(abs(params.beta - beta1) > 1e-6 * beta1)
    assert (c.n_beta_minus_alpha > 0) == (params.beta > beta1)
    assert c.Cstar > 0
    assert c.alpha > 0


@settings(max_examples=100, deadline=None)
@given(param_sets())
def test_real_roots_satisfy_vieta(params):
    m, k = params.m, params.k
    A, disc, gamma1, gamma2 = tail_roots(params, params.beta)
    assume(gamma1 is not None)
    assert gamma1 <= gamma2 * (1 + 1e-12)
    assert gamma1 * gamma2 == pytest.approx(2 * k / (1 - m), rel=1e-9)
    assert gamma1 + gamma2 == pytest.approx(A / (1 - m), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(param_sets())
def test_roots_are_real_from_beta0(params):
    beta0 = beta0_threshold(params)
    _, _, gamma1, _ = tail_roots(params, beta0 * (1 + 1e-6))
    assert gamma1 is not None
    assert gamma1 > 0
