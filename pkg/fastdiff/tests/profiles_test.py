import math
from dataclasses import replace

import numpy as np
import pytest

from fastdiff.analysis_functions.params import ParamSet
from fastdiff.analysis_functions import profiles
from fastdiff.analysis_functions.profiles import (cylinder, solve_regular, solve_singular, solve_profile,
                                                  ode_residual, integral_identity_residual, invert,
                                                  rescale_lambda, check_sandwich, ProfileEvaluator,
                                                  SlowManifoldSeries)
from fastdiff.utils.errors import RangeError, WrongExponent, WrongKind, GridMismatch, WrongRegime


def test_cylinder_value(params5):
    cyl = cylinder(params5, s_grid=np.array([-1.0, 0.0, 1.0]))
    assert cyl.v[1] == pytest.approx(0.2 ** 1.25, rel=1e-14)
    assert np.all(cyl.dv < 0)


def test_cylinder_residuals(params5):
    cyl = cylinder(params5, s_grid=np.linspace(-3, 3, 601))
    assert np.max(np.abs(ode_residual(cyl))) <= 1e-10
    assert np.max(np.abs(integral_identity_residual(cyl))) <= 1e-8


def test_regular_profile(params5):
    tol = 1e-8
    regular = solve_regular(params5, tol=tol, n_nodes=4000)
    assert np.all(regular.v > 0)
    assert np.all(regular.dv <= 0)
    assert regular.v[0] == pytest.approx(1.0, rel=1e-6)
    assert np.max(np.abs(ode_residual(regular))) <= 10 * tol
    assert np.max(np.abs(integral_identity_residual(regular))) <= 10 * tol


def test_taylor_head_fourth_order(params5):
    K, L = profiles.taylor_coefficients(params5)
    n, m, lam = params5.n, params5.m, params5.lam

    def defect(r):
        v = lam * (1 - K * r ** 2 + L * r ** 4)
        dv = lam * (-2 * K * r + 4 * L * r ** 3)
        d2v = lam * (-2 * K + 12 * L * r ** 2)
        dvm = m * v ** (m - 1) * dv
        d2vm = m * (m - 1) * v ** (m - 2) * dv ** 2 + m * v ** (m - 1) * d2v
        return d2vm + (n - 1) / r * dvm + params5.alpha * v + params5.beta * r * dv

    # both the r^0 and r^2 orders cancel, so halving r divides the defect by 16
    r = 1e-2
    assert defect(r) / defect(r / 2) == pytest.approx(16.0, rel=0.05)


def test_singular_profile(singular8):
    assert singular8.kind == profiles.KIND_SINGULAR
    assert np.all(singular8.v > 0)
    assert np.all(singular8.dv < 0)
    assert np.max(np.abs(ode_residual(singular8))) <= 1e-5
    assert np.max(np.abs(integral_identity_residual(singular8))) <= 1e-5


def test_singular_identity_needs_beta1():
    params = ParamSet(3, 0.2, 1.0, 2.0)
    s = np.linspace(-2.0, 2.0, 50)
    singular = profiles.RadialProfile(profiles.KIND_SINGULAR, params, s, np.exp(-3 * s), -3 * np.exp(-4 * s),
                                      params.alpha, params.beta)
    with pytest.raises(WrongRegime):
        integral_identity_residual(singular)


def test_sandwich(params8, sandwich_grid):
    regular = solve_regular(params8, s_grid=sandwich_grid, tol=1e-10)
    cyl = cylinder(params8, s_grid=sandwich_grid)
    singular = solve_singular(params8, s_grid=sandwich_grid, tol=1e-10)
    report = check_sandwich(regular, cyl, singular)
    assert report.holds
    assert report.lower_margin > 0
    assert report.upper_margin > 0


def test_sandwich_grid_mismatch(params8, sandwich_grid):
    regular = solve_regular(params8, s_grid=sandwich_grid)
    cyl = cylinder(params8, s_grid=sandwich_grid[:-1])
    with pytest.raises(GridMismatch):
        check_sandwich(regular, cyl, cyl)


def test_regular_profiles_increase_with_lambda(params5):
    s_grid = np.linspace(-4, math.log(100.0), 300)
    low = solve_regular(params5, s_grid=s_grid)
    high = solve_regular(replace(params5, lam=2.0), s_grid=s_grid)
    assert np.all(high.v > low.v)


def test_singular_profiles_decrease_with_lambda(params8):
    s_grid = np.linspace(0.0, math.log(1e3), 200)
    cyl = cylinder(params8, s_grid=s_grid).v
    family = [solve_singular(replace(params8, lam=lam), s_grid=s_grid, tol=1e-10) for lam in (1.0, 2.0, 4.0, 8.0)]
    for low, high in zip(family, family[1:]):
        assert np.all(high.v < low.v)
    # and they close in on the cylinder on r >= 1
    gaps = [np.max(np.abs(g.v - cyl)) for g in family]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_singular_identity_at_beta1():
    params = ParamSet(3, 0.2, 1.0, 2.5)
    singular = solve_singular(params, r_max=1e3, tol=1e-10)
    assert np.max(np.abs(integral_identity_residual(singular))) <= 1e-5


def test_rescale_lambda_matches_direct_solve(params5):
    regular = solve_regular(params5, tol=1e-10)
    rescaled = rescale_lambda(regular, 2.0)
    direct = solve_regular(replace(params5, lam=2.0), s_grid=rescaled.s_grid, tol=1e-10)
    assert rescaled.params.lam == 2.0
    assert rescaled.meta["rescaled_from"] == 1.0
    assert np.max(np.abs(rescaled.v / direct.v - 1)) <= 1e-6


def test_rescale_lambda_singular(singular8):
    rescaled = rescale_lambda(singular8, 3.0)
    assert rescaled.xi0 == pytest.approx(singular8.xi0 / 3.0)
    assert np.max(np.abs(ode_residual(rescaled))) <= 1e-5


def test_rescale_lambda_rejects_cylinder(params5):
    with pytest.raises(WrongKind):
        rescale_lambda(cylinder(params5), 2.0)


def test_inversion():
    params = ParamSet(4, 1 / 3, 1.0, 3.0)
    regular = solve_regular(params, r_max=100.0, tol=1e-10)
    inverted = invert(regular)
    assert inverted.inverted
    assert inverted.beta == -3.0
    assert inverted.alpha == pytest.approx(regular.alpha - 6 * 3.0)
    assert np.max(np.abs(ode_residual(inverted))) <= 1e-5
    back = invert(inverted)
    assert not back.inverted
    np.testing.assert_allclose(back.v, regular.v, rtol=1e-12)
    np.testing.assert_allclose(back.s_grid, regular.s_grid, rtol=0, atol=1e-12)


def test_inversion_needs_critical_exponent():
    with pytest.raises(WrongExponent):
        invert(solve_regular(ParamSet(4, 0.2, 1.0, 3.0), r_max=10.0, n_nodes=100))
    with pytest.raises(WrongKind):
        integral_identity_residual(invert(cylinder(ParamSet(4, 1 / 3, 1.0, 3.0))))


def test_singular_start_outside_blowup_region(params8):
    with pytest.raises(RangeError):
        solve_singular(params8, xi0=1e5, r_max=1e6, start="literal")
    with pytest.raises(RangeError):
        solve_singular(params8, xi0=1e4, r_max=1e3)


def test_series_head_matches_leading_power_law(params8):
    series = SlowManifoldSeries(params8)
    s = np.array([-400.0, -300.0])
    x = series.x(s)
    np.testing.assert_allclose(x, series.log_L - series.delta * s, rtol=0, atol=1e-12)
    assert series.leading_ratio(x[0]) < 1e-10


def test_literal_start_converges_to_series(params8):
    s_grid = np.linspace(math.log(10.0), math.log(1e3), 200)
    series = solve_singular(params8, xi0=1e-6, s_grid=s_grid, tol=1e-10)

    def literal_error(xi0):
        literal = solve_singular(params8, xi0=xi0, s_grid=s_grid, start="literal", tol=1e-10)
        return np.max(np.abs(literal.v / series.v - 1))

    assert literal_error(1e-6) < literal_error(1e-3)


def test_xi0_halving(params8):
    assert profiles.xi0_halving_error(params8, r_max=1e3, n_nodes=200, tol=1e-10) <= 1e-6


def test_envelope_constant(singular8):
    C0 = profiles.envelope_constant(singular8)
    assert C0 >= 0
    with pytest.raises(WrongKind):
        profiles.envelope_constant(cylinder(singular8.params))


def test_evaluator(regular8, singular8):
    evaluate = ProfileEvaluator(regular8)
    assert evaluate(0.0)[0] == pytest.approx(1.0)
    np.testing.assert_allclose(evaluate(regular8.r[5:-5]), regular8.v[5:-5], rtol=1e-12)
    # beyond the grid the profile keeps approaching the cylinder
    far = evaluate(np.array([1e4, 1e6]))
    cyl = (0.2 / np.array([1e4, 1e6]) ** 2) ** 1.25
    assert np.all(np.abs(far / cyl - 1) < np.abs(regular8.v[-1] / ((0.2 / regular8.r[-1] ** 2) ** 1.25) - 1))
    with pytest.raises(RangeError):
        ProfileEvaluator(singular8)(0.0)


def test_solve_profile_dispatch(params5):
    assert solve_profile("cylinder", params5, tol=1e-8).kind == profiles.KIND_CYLINDER
    with pytest.raises(WrongKind):
        solve_profile("annulus", params5)
