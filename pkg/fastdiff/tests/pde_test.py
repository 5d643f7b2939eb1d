import math

import numpy as np
import pytest

from fastdiff.analysis_functions.params import ParamSet, derive
from fastdiff.analysis_functions import pde
from fastdiff.analysis_functions.pde import (RadialGrid, PdeState, Boundary, Perturbation, make_initial, step,
                                             rescale, l1_distance, evolve, contraction_check,
                                             extinction_time_estimate, sphere_area)
from fastdiff.analysis_functions.profiles import solve_regular, solve_singular
from fastdiff.utils.errors import (GridMismatch, NotExtincting, RangeError, KindMismatch,
                                   SandwichViolation, PastExtinction)


@pytest.fixture(scope="module")
def ball():
    return RadialGrid.geometric(3, 1e-2, 3.0, 100)


@pytest.fixture(scope="module")
def window():
    return RadialGrid.geometric(3, 1e-3, 1.0, 50)


@pytest.fixture(scope="module")
def reference5(params5):
    return solve_regular(params5, r_max=4.0, tol=1e-10)


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


def test_grid_volumes(ball):
    assert len(ball) == 100
    assert ball.ball
    assert ball.nodes[0] == 0.0
    assert np.sum(ball.volumes) == pytest.approx(3.0 ** 3 / 3, rel=1e-12)
    punctured = RadialGrid.geometric(3, None, 3.0, 80, r_min=0.5)
    assert not punctured.ball
    assert punctured.r_min == pytest.approx(0.5)
    assert np.sum(punctured.weights) == pytest.approx(4 * math.pi * (27 - 0.125) / 3, rel=1e-12)


def test_grid_rejects_bad_ranges():
    with pytest.raises(RangeError):
        RadialGrid.geometric(3, 5.0, 3.0, 100)
    with pytest.raises(RangeError):
        RadialGrid.geometric(3, 1e-2, 3.0, 2)


def test_l1_distance(ball):
    ones = np.ones(len(ball))
    assert l1_distance(ones, np.zeros(len(ball)), ball) == pytest.approx(4 * math.pi * 9, rel=1e-12)
    with pytest.raises(GridMismatch):
        l1_distance(ones[:-1], ones[:-1], ball)


def test_constant_state_is_stationary_without_flux(params5, ball):
    state = PdeState(0.0, np.full(len(ball), 0.7), params5, 1.0, ball, Boundary("neumann"))
    after = step(state, 0.01)
    np.testing.assert_allclose(after.u, 0.7, rtol=1e-12)
    assert after.boundary_flux == 0.0
    assert after.t == pytest.approx(0.01)


def test_no_flux_conserves_mass(params5, ball):
    u0 = 1.0 + np.exp(-ball.nodes ** 2)
    state = PdeState(0.0, u0, params5, 1.0, ball, Boundary("neumann"))
    for _ in range(5):
        state = step(state, 0.01)
    assert state.mass == pytest.approx(float(np.sum(ball.weights * u0)), rel=1e-8)
    # diffusion flattens the bump
    assert np.max(state.u) < np.max(u0)
    assert np.min(state.u) > np.min(u0)


def test_steps_preserve_order(params5, ball):
    low = 1.0 + 0.5 * np.exp(-ball.nodes ** 2)
    high = low * (1 + 0.2 * (ball.nodes > 1.0))
    a = PdeState(0.0, low, params5, 1.0, ball, Boundary("neumann"))
    b = PdeState(0.0, high, params5, 1.0, ball, Boundary("neumann"))
    for _ in range(3):
        a, b = step(a, 0.02), step(b, 0.02)
    assert np.all(b.u >= a.u * (1 - 1e-9))
    assert l1_distance(a.u, b.u, ball) <= l1_distance(low, high, ball) * (1 + 1e-8)


def test_dirichlet_needs_a_solution():
    with pytest.raises(RangeError):
        Boundary("dirichlet")
    with pytest.raises(RangeError):
        Boundary("robin")


def test_initial_data_follow_the_profile(params5, ball, reference5):
    state = make_initial("psi", params5, 1.0, ball, profile=reference5)
    assert state.u[0] == pytest.approx(1.0)
    assert state.s == pytest.approx(0.0)
    # rescaling at t = 0 with T = 1 reads the nodes back
    np.testing.assert_allclose(rescale(state, ball.nodes[1:]), state.u[1:], rtol=1e-10)


def test_rescale_exponents(params5, ball, reference5):
    state = make_initial("psi", params5, 2.0, ball, profile=reference5)
    y = 2.0 ** params5.beta * ball.nodes[1:10]
    expected = 2.0 ** (-params5.alpha) * state.u[1:10]
    np.testing.assert_allclose(rescale(state, y), expected, rtol=1e-10)
    with pytest.raises(RangeError):
        rescale(state, np.array([2.0 ** params5.beta * 10.0]))


def test_initial_data_checks(params5, ball, reference5):
    with pytest.raises(RangeError):
        make_initial("psi", ParamSet(3, 0.2, 2.0, 5.0), 1.0, ball)
    with pytest.raises(RangeError):
        make_initial("V", params5, 1.0, ball, profile=reference5)
    punctured = RadialGrid.geometric(3, None, 3.0, 80, r_min=0.1)
    with pytest.raises(KindMismatch):
        make_initial("V", params5, 1.0, punctured, profile=reference5)
    with pytest.raises(SandwichViolation):
        make_initial("perturbed_psi", params5, 1.0, ball, profile=reference5,
                     perturbation=Perturbation(amplitude=0.5, envelope=(0.9, 1.1)))


def test_perturbation_placement():
    placed = Perturbation(r_lo=1.0, r_hi=3.0, width=0.5).placed(seed=7)
    again = Perturbation(r_lo=1.0, r_hi=3.0, width=0.5).placed(seed=7)
    assert placed == again
    assert 1.0 <= placed.r_lo and placed.r_hi <= 3.0
    assert placed.r_hi - placed.r_lo == pytest.approx(0.5)
    with pytest.raises(RangeError):
        Perturbation(r_lo=1.0, r_hi=2.0, width=2.0).placed(seed=0)
    cosine = Perturbation(shape="cosine", r_lo=1.0, r_hi=2.0)
    assert cosine.bump(np.array([0.5, 1.5, 2.5])).tolist() == pytest.approx([0.0, 1.0, 0.0])


def test_exact_run_stays_on_the_profile(params5, ball, window, reference5):
    state = make_initial("psi", params5, 1.0, ball, profile=reference5)
    traj = evolve(state, 0.005, 0.05, window, target=reference5)
    assert len(traj.s_values) == 11
    assert traj.s_values[-1] == pytest.approx(0.05)
    assert np.max(traj.sup_history) <= 0.1
    assert np.all(np.diff(traj.max_u) < 0)


def test_outer_radius_must_cover_the_window(params5, ball, reference5):
    state = make_initial("psi", params5, 1.0, ball, profile=reference5)
    with pytest.raises(RangeError):
        evolve(state, 0.01, 2.0, RadialGrid.geometric(3, 1e-3, 1.0, 50))


def test_contraction(params5, ball, window, reference5):
    exact = make_initial("psi", params5, 1.0, ball, profile=reference5)
    perturbed = make_initial("perturbed_psi", params5, 1.0, ball, profile=reference5,
                             perturbation=Perturbation(amplitude=0.1, r_lo=0.5, r_hi=1.0))
    assert np.all(perturbed.u >= exact.u)
    run1 = evolve(perturbed, 0.01, 0.1, window)
    run2 = evolve(exact, 0.01, 0.1, window)
    report = contraction_check(run1, run2, derive(params5))
    assert report.nonincreasing
    assert report.predicted_rate == pytest.approx(1.25)
    assert np.all(run1.states >= run2.states * (1 - 1e-9))


def test_extinction_time_estimate():
    t = np.linspace(0.0, 1.0, 10)
    max_u = 2.0 * (1.5 - t) ** 13.75
    assert extinction_time_estimate(t, max_u, 13.75) == pytest.approx(1.5, rel=1e-9)


@pytest.mark.parametrize("times,max_u", [
    ([0.0, 0.5], [2.0, 1.0]),
    ([0.0, 0.5, 1.0], [1.0, 1.0, 1.0]),
    ([0.0, 0.5, 1.0], [1.0, 2.0, 3.0]),
])
def test_not_extincting(times, max_u):
    with pytest.raises(NotExtincting):
        extinction_time_estimate(times, max_u, 13.75)


def test_self_similar_solution_past_extinction(reference5):
    solution = pde.SelfSimilarSolution(reference5, 1.0)
    with pytest.raises(PastExtinction):
        solution(np.array([1.0]), 1.0)


def test_default_step_scales_with_alpha(params5, params8):
    assert pde.default_ds(params5) * params5.alpha == pytest.approx(pde.DEFAULT_ALPHA_DS)
    assert pde.default_ds(params8) < pde.default_ds(params5)
    assert pde.default_ds(ParamSet(3, 0.2, 1.0, 0.5)) <= pde.MAX_DEFAULT_DS
    assert pde.default_snapshot_every(0.01, 1.0) == 1
    assert pde.default_snapshot_every(1e-4, 1.0) == 100


def test_time_error_halves_with_the_step(params5, ball, window, reference5):
    state = make_initial("psi", params5, 1.0, ball, profile=reference5)
    runs = [evolve(state, ds, 0.2, window, snapshot_every=int(round(0.2 / ds)), target=reference5)
            for ds in (0.01, 0.005, 0.0025)]
    final = [run.snapshots[-1] for run in runs]
    coarse = np.max(np.abs(final[0] - final[1]))
    fine = np.max(np.abs(final[1] - final[2]))
    # backward Euler is first order in s
    assert coarse / fine == pytest.approx(2.0, rel=0.3)


@pytest.mark.parametrize("sup,floor,expected", [
    ([0.3, 0.2, 0.1, 0.01], 0.005, True),
    ([0.1, 0.3, 0.2, 0.05], 0.005, True),
    ([0.3, 0.1, 0.004, 0.0045], 0.005, True),
    ([0.004, 0.003, 0.0045], 0.005, True),
    ([0.01, 0.1, 0.2, 0.3], 0.005, False),
    ([0.3, 0.1, 0.2, 0.05], 0.005, False),
    ([0.3, 0.3, 0.3], 0.005, False),
])
def test_decreases_to_floor(sup, floor, expected):
    assert pde.decreases_to_floor(sup, floor) == expected


def test_convergence_diagnostics(params5, ball, window, reference5):
    state = make_initial("psi", params5, 1.0, ball, profile=reference5)
    traj = evolve(state, 0.005, 0.05, window, target=reference5)
    report = pde.convergence_diagnostics(traj, reference5, floor=0.1)
    assert report.floor == 0.1
    np.testing.assert_allclose(report.sup, traj.sup_history)
    assert report.decreasing_to_floor
    assert len(report.l1) == len(traj.s_values)
    with pytest.raises(RangeError):
        pde.convergence_diagnostics(traj, reference5, floor=-1.0)
    singular = solve_singular(params5, r_max=4.0)
    with pytest.raises(KindMismatch):
        pde.convergence_diagnostics(traj, singular)


def test_contraction_rate_over_two_units(params5):
    # outer radius covers the unit window at s = 2
    ball = RadialGrid.geometric(3, 1e-2, 1.05 * math.exp(2 * params5.beta), 120)
    reference = solve_regular(params5, r_max=1.05 * math.exp(2 * params5.beta), tol=1e-10)
    exact = make_initial("psi", params5, 1.0, ball, profile=reference)
    perturbed = make_initial("perturbed_psi", params5, 1.0, ball, profile=reference,
                             perturbation=Perturbation(amplitude=0.1, r_lo=0.5, r_hi=1.0))
    window = RadialGrid.geometric(3, 1e-3, 1.0, 50)
    run1 = evolve(perturbed, 0.01, 2.0, window, snapshot_every=10)
    run2 = evolve(exact, 0.01, 2.0, window, snapshot_every=10)
    report = contraction_check(run1, run2, derive(params5))
    assert run1.s_values[-1] - run1.s_values[0] >= 2.0 - 1e-12
    assert report.nonincreasing
    assert report.relative_error <= 0.15
