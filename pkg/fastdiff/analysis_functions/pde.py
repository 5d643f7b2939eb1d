"""
Radial fast diffusion u_t = r^{1-n}(r^{n-1}(u^m)_r)_r on a ball [0, R] or a
punctured ball [r_min, R], with runs anchored to the self-similar solutions

    psi_lambda(x, t) = (T-t)^alpha v_lambda((T-t)^beta x)
    V_lambda(x, t)   = (T-t)^alpha g_lambda((T-t)^beta x)

and observed in the rescaled frame u~(y, s) = (T-t)^{-alpha} u((T-t)^{-beta} y, t),
s = -log(T-t).
"""

from dataclasses import dataclass, field, replace
from typing import Optional
import math

import numpy as np
from scipy.linalg import solve_banded
from scipy.interpolate import PchipInterpolator
from scipy.special import gamma as gamma_fn

from fastdiff.analysis_functions.params import ParamSet, validate
from fastdiff.analysis_functions.profiles import (RadialProfile, ProfileEvaluator, solve_regular,
                                                  solve_singular, rescale_lambda, KIND_REGULAR,
                                                  KIND_SINGULAR)
from fastdiff.utils.custom_logger import logger
from fastdiff.utils.errors import (RangeError, GridMismatch, KindMismatch, NewtonDivergence,
                                   PositivityLoss, PastExtinction, NotExtincting, SandwichViolation)

KIND_PSI = "psi"
KIND_V = "V"
KIND_PERTURBED_PSI = "perturbed_psi"
KIND_PERTURBED_V = "perturbed_V"
INITIAL_KINDS = [KIND_PSI, KIND_V, KIND_PERTURBED_PSI, KIND_PERTURBED_V]

BOUNDARY_DIRICHLET = "dirichlet"
BOUNDARY_NEUMANN = "neumann"

NEWTON_TOL = 1e-10
DEFAULT_MAX_NEWTON = 50
MAX_SUBDIVISIONS = 3
DEFAULT_ENVELOPE = (1e-3, 1e3)
# backward Euler leaves a stationary error of about 1.3 alpha ds against the exact profile
DEFAULT_ALPHA_DS = 2.5e-3
MAX_DEFAULT_DS = 0.02
DEFAULT_SNAPSHOTS = 100


def default_ds(params: ParamSet) -> float:
    """Step in s that keeps alpha ds at DEFAULT_ALPHA_DS."""
    return min(MAX_DEFAULT_DS, DEFAULT_ALPHA_DS / params.alpha)


def default_snapshot_every(ds, s_span) -> int:
    return max(1, int(math.ceil(s_span / ds - 1e-9)) // DEFAULT_SNAPSHOTS)


def sphere_area(n):
    """Area of the unit sphere in R^n."""
    return 2 * math.pi ** (n / 2) / gamma_fn(n / 2)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Cell-centred radial grid. faces has one more entry than nodes; for a ball
    the first face and the first node sit at the origin.
    """

    n: int
    faces: np.ndarray
    nodes: np.ndarray
    volumes: np.ndarray
    weights: np.ndarray
    trans: np.ndarray
    t_outer: float
    t_inner: Optional[float]

    @property
    def ball(self):
        return self.t_inner is None

    @property
    def r_min(self):
        return self.faces[0]

    @property
    def R(self):
        return self.faces[-1]

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def geometric(cls, n, r_first, r_max, cells, r_min=None):
        if cells < 3:
            raise RangeError(f"a radial grid needs at least 3 cells, got {cells}")
        if r_min is None:
            if not 0 < r_first < r_max:
                raise RangeError(f"need 0 < r_first < r_max, got r_first={r_first}, r_max={r_max}")
            faces = np.concatenate([[0.0], np.geomspace(r_first, r_max, cells)])
            nodes = np.sqrt(faces[:-1] * faces[1:])
            nodes[0] = 0.0
        else:
            if not 0 < r_min < r_max:
                raise RangeError(f"need 0 < r_min < r_max, got r_min={r_min}, r_max={r_max}")
            faces = np.geomspace(r_min, r_max, cells + 1)
            nodes = np.sqrt(faces[:-1] * faces[1:])

        volumes = (faces[1:] ** n - faces[:-1] ** n) / n
        trans = faces[1:-1] ** (n - 1) / np.diff(nodes)
        t_outer = faces[-1] ** (n - 1) / (faces[-1] - nodes[-1])
        t_inner = None if r_min is None else faces[0] ** (n - 1) / (nodes[0] - faces[0])
        return cls(n, faces, nodes, volumes, sphere_area(n) * volumes, trans, t_outer, t_inner)


class SelfSimilarSolution:
    """(T-t)^alpha p((T-t)^beta r) for a regular or singular profile p."""

    def __init__(self, profile: RadialProfile, T: float):
        self.profile = profile
        self.evaluate = ProfileEvaluator(profile)
        self.alpha = profile.params.alpha
        self.beta = profile.params.beta
        self.T = T

    def __call__(self, r, t):
        tau = self.T - t
        if tau <= 0:
            raise PastExtinction(f"self-similar solution is extinct at t={t:.6g} >= T={self.T:.6g}")
        return tau ** self.alpha * self.evaluate(tau ** self.beta * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Boundary:
    mode: str
    solution: Optional[SelfSimilarSolution] = None

    def __post_init__(self):
        if self.mode not in (BOUNDARY_DIRICHLET, BOUNDARY_NEUMANN):
            raise RangeError(f"boundary must be `dirichlet` or `neumann`, got `{self.mode}`")
        if self.mode == BOUNDARY_DIRICHLET and self.solution is None:
            raise RangeError("dirichlet boundaries need a reference self-similar solution")

    def values(self, grid: RadialGrid, t):
        """Boundary values of u^m at (r_min, R); None where no data are imposed."""
        if self.mode == BOUNDARY_NEUMANN:
            return None, None
        m = self.solution.profile.params.m
        outer = float(self.solution(grid.R, t)[0]) ** m
        inner = None if grid.ball else float(self.solution(grid.r_min, t)[0]) ** m
        return inner, outer


@dataclass(frozen=True, eq=False)
class PdeState:
    t: float
    u: np.ndarray
    params: ParamSet
    T: float
    grid: RadialGrid
    boundary: Boundary
    kind: str = KIND_PSI
    boundary_flux: float = 0.0
    newton_iterations: int = 0

    @property
    def s(self):
        return -math.log(self.T - self.t)

    @property
    def mass(self):
        return float(np.sum(self.grid.weights * self.u))


@dataclass(frozen=True)
class Perturbation:
    """Multiplicative bump u0 = reference (1 + amplitude b(r)) supported on [r_lo, r_hi]."""

    shape: str = "box"
    amplitude: float = 0.1
    r_lo: float = 1.0
    r_hi: float = 2.0
    width: Optional[float] = None
    envelope: tuple = DEFAULT_ENVELOPE

    def placed(self, seed=None):
        """Draw the support inside [r_lo, r_hi] when a width is given."""
        if self.width is None:
            return self
        if not 0 < self.width <= self.r_hi - self.r_lo:
            raise RangeError(f"bump width {self.width} does not fit in [{self.r_lo}, {self.r_hi}]")
        rng = np.random.default_rng(seed)
        lo = float(rng.uniform(self.r_lo, self.r_hi - self.width))
        return replace(self, r_lo=lo, r_hi=lo + self.width, width=None)

    def bump(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r >= self.r_lo) & (r <= self.r_hi)
        if self.shape == "box":
            return inside.astype(float)
        if self.shape == "cosine":
            phase = 2 * math.pi * (r - self.r_lo) / (self.r_hi - self.r_lo)
            return np.where(inside, 0.5 * (1 - np.cos(phase)), 0.0)
        raise RangeError(f"bump shape must be `box` or `cosine`, got `{self.shape}`")


@dataclass(frozen=True, eq=False)
class RescaledTrajectory:
    kind: str
    params: ParamSet
    T: float
    grid: RadialGrid
    y_grid: RadialGrid
    s_values: np.ndarray
    times: np.ndarray
    snapshots: np.ndarray
    states: np.ndarray
    max_u: np.ndarray
    mass: np.ndarray
    boundary_flux: np.ndarray
    newton_iterations: np.ndarray
    sup_history: Optional[np.ndarray] = None
    l1_history: Optional[np.ndarray] = None


def _reference_profile(kind, params, T, grid, y_max, tol):
    r_top = 1.1 * max(T ** params.beta * grid.R, y_max)
    if kind in (KIND_PSI, KIND_PERTURBED_PSI):
        return solve_regular(params, r_max=r_top, tol=tol)
    return solve_singular(params, r_max=r_top, tol=tol)


def make_initial(kind, params: ParamSet, T, grid: RadialGrid, perturbation: Perturbation = None,
                 boundary=BOUNDARY_DIRICHLET, profile: RadialProfile = None, tol=1e-10, seed=None,
                 y_max=1.0) -> PdeState:
    validate(params)
    if kind not in INITIAL_KINDS:
        raise RangeError(f"initial data kind must be one of {', '.join(INITIAL_KINDS)}, got `{kind}`")
    if params.rho1 != 1:
        raise RangeError(f"self-similar solutions of the flow need rho1 = 1, got rho1={params.rho1}")
    if not T > 0:
        raise RangeError(f"T must be positive, got T={T}")
    singular = kind in (KIND_V, KIND_PERTURBED_V)
    if singular and grid.ball:
        raise RangeError("singular initial data need a punctured grid (set r_min)")

    if profile is None:
        profile = _reference_profile(kind, params, T, grid, y_max, tol)
    expected = KIND_SINGULAR if singular else KIND_REGULAR
    if profile.kind != expected:
        raise KindMismatch(f"{kind} initial data need a {expected} profile, got {profile.kind}")

    reference = SelfSimilarSolution(profile, T)
    u0 = reference(grid.nodes, 0.0)

    if kind in (KIND_PERTURBED_PSI, KIND_PERTURBED_V):
        perturbation = (perturbation or Perturbation()).placed(seed)
        u0 = u0 * (1 + perturbation.amplitude * perturbation.bump(grid.nodes))
        low, high = (params.lam * e for e in perturbation.envelope)
        if singular:
            low, high = high, low
        lower = SelfSimilarSolution(rescale_lambda(profile, low), T)(grid.nodes, 0.0)
        upper = SelfSimilarSolution(rescale_lambda(profile, high), T)(grid.nodes, 0.0)
        if np.any(u0 <= 0) or np.any(u0 < lower) or np.any(u0 > upper):
            raise SandwichViolation(
                f"perturbed data leave the envelope between lambda*{perturbation.envelope[0]:g} "
                f"and lambda*{perturbation.envelope[1]:g}")
        logger.debug(f"{perturbation.shape} bump of amplitude {perturbation.amplitude:g} "
                     f"on [{perturbation.r_lo:.6g}, {perturbation.r_hi:.6g}]")

    return PdeState(0.0, u0, params, T, grid, Boundary(boundary, reference if boundary == BOUNDARY_DIRICHLET else None),
                    kind=kind)


def _newton_system(P, u_old, grid, dt, m, inner, outer):
    vol_dt = grid.volumes / dt
    flux = grid.trans * (P[1:] - P[:-1])
    div = np.zeros_like(P)
    div[:-1] += flux
    div[1:] -= flux
    diag = vol_dt * P ** (1 / m - 1) / m
    diag[:-1] += grid.trans
    diag[1:] += grid.trans
    if outer is not None:
        div[-1] += grid.t_outer * (outer - P[-1])
        diag[-1] += grid.t_outer
    if inner is not None:
        div[0] += grid.t_inner * (inner - P[0])
        diag[0] += grid.t_inner
    G = vol_dt * (P ** (1 / m) - u_old) - div
    return G, diag


def step(state: PdeState, dt, max_iterations=DEFAULT_MAX_NEWTON) -> PdeState:
    """One backward Euler step, Newton on P = u^m with the tridiagonal Jacobian."""
    if not dt > 0:
        raise RangeError(f"time step must be positive, got dt={dt}")
    grid = state.grid
    m = state.params.m
    t_new = state.t + dt
    inner, outer = state.boundary.values(grid, t_new)

    P = state.u ** m
    off = -grid.trans
    ab = np.zeros((3, len(P)))
    for iteration in range(1, max_iterations + 1):
        G, diag = _newton_system(P, state.u, grid, dt, m, inner, outer)
        ab[0, 1:] = off / diag[:-1]
        ab[1, :] = 1.0
        ab[2, :-1] = off / diag[1:]
        delta = solve_banded((1, 1), ab, -G / diag)
        falling = delta < 0
        theta = min(1.0, 0.9 * float(np.min(P[falling] / -delta[falling]))) if np.any(falling) else 1.0
        P = P + theta * delta
        if not np.all(np.isfinite(P)):
            break
        if np.max(np.abs(theta * delta) / P) < NEWTON_TOL:
            break
    else:
        raise NewtonDivergence(
            f"Newton did not converge in {max_iterations} iterations at t={t_new:.6g} (dt={dt:.3g})",
            suggested_dt=dt / 4)

    u = P ** (1 / m)
    if not np.all(np.isfinite(u)) or np.any(u <= 0):
        raise PositivityLoss(f"non-positive or non-finite values after the step to t={t_new:.6g}")

    flux = 0.0
    if outer is not None:
        flux += grid.t_outer * (outer - P[-1])
    if inner is not None:
        flux += grid.t_inner * (inner - P[0])
    return replace(state, t=t_new, u=u, boundary_flux=sphere_area(grid.n) * dt * flux,
                   newton_iterations=iteration)


def _advance(state, t_target, max_iterations, depth=0):
    """Step to t_target, splitting the step when Newton fails."""
    try:
        return step(state, t_target - state.t, max_iterations)
    except NewtonDivergence as err:
        if depth >= MAX_SUBDIVISIONS:
            raise
        logger.debug(f"splitting step at t={state.t:.6g}: {err}")
    current = state
    flux = 0.0
    iterations = 0
    # split uniformly in s so substeps shrink towards T
    s0, s1 = -math.log(state.T - state.t), -math.log(state.T - t_target)
    for k in range(1, 5):
        t_k = t_target if k == 4 else state.T - math.exp(-(s0 + k * (s1 - s0) / 4))
        current = _advance(current, t_k, max_iterations, depth + 1)
        flux += current.boundary_flux
        iterations += current.newton_iterations
    return replace(current, boundary_flux=flux, newton_iterations=iterations)


def rescale(state: PdeState, y) -> np.ndarray:
    """u~(y, s) = (T-t)^{-alpha} u((T-t)^{-beta} y, t)."""
    tau = state.T - state.t
    if tau <= 0:
        raise PastExtinction(f"t={state.t:.6g} is not before the extinction time T={state.T:.6g}")
    params = state.params
    grid = state.grid
    y = np.asarray(y, dtype=float)
    r = tau ** (-params.beta) * y
    if np.any(r > grid.R * (1 + 1e-12)):
        raise RangeError(f"rescaled radius {y.max():.6g} maps outside the grid at s={state.s:.6g}")

    start = 1 if grid.ball else 0
    spline = PchipInterpolator(np.log(grid.nodes[start:]), np.log(state.u[start:]))
    out = np.empty_like(r)
    inside = r >= grid.nodes[start]
    out[inside] = np.exp(spline(np.log(r[inside])))
    if np.any(~inside):
        if grid.ball:
            c1 = grid.nodes[1]
            out[~inside] = state.u[0] + (state.u[1] - state.u[0]) * r[~inside] / c1
        else:
            out[~inside] = np.exp(spline(np.log(np.maximum(r[~inside], grid.r_min))))
    return tau ** (-params.alpha) * out


def l1_distance(a, b, grid: RadialGrid) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape != grid.weights.shape:
        raise GridMismatch(f"arrays of shape {a.shape} and {b.shape} on a grid of {len(grid)} cells")
    return float(np.sum(grid.weights * np.abs(a - b)))


def _compact_mask(y_grid, compact):
    if compact is None:
        return np.ones(len(y_grid), dtype=bool)
    lo, hi = compact
    mask = (y_grid.nodes >= lo) & (y_grid.nodes <= hi)
    if not np.any(mask):
        raise RangeError(f"compact set [{lo}, {hi}] holds no snapshot nodes")
    return mask


def evolve(state: PdeState, ds, s_span, y_grid: RadialGrid, snapshot_every=1, target: RadialProfile = None,
           compact=None, max_iterations=DEFAULT_MAX_NEWTON) -> RescaledTrajectory:
    """
    Advance by s_span in s = -log(T-t) with steps uniform in s, snapshotting the
    rescaled solution on y_grid every snapshot_every steps.
    """
    if not ds > 0 or not s_span > 0:
        raise RangeError(f"ds and the s-span must be positive, got ds={ds}, span={s_span}")
    params = state.params
    s_start = state.s
    s_final = s_start + s_span
    needed = y_grid.R * math.exp(params.beta * s_final)
    if state.grid.R < needed * (1 - 1e-12):
        raise RangeError(
            f"outer radius {state.grid.R:.6g} is too small: the rescaled window up to y={y_grid.R:.6g} "
            f"reaches r={needed:.6g} by the end of the run")
    if not state.grid.ball and y_grid.r_min * math.exp(params.beta * s_start) < state.grid.r_min:
        raise RangeError("the rescaled window starts inside the puncture of the grid")

    mask = _compact_mask(y_grid, compact)
    reference = ProfileEvaluator(target)(y_grid.nodes) if target is not None else None

    steps = int(math.ceil(s_span / ds - 1e-9))
    records = {key: [] for key in ["s", "t", "snap", "u", "max_u", "mass", "flux", "newton", "sup", "l1"]}

    def record(current, flux, iterations):
        snap = rescale(current, y_grid.nodes)
        records["s"].append(current.s)
        records["t"].append(current.t)
        records["snap"].append(snap)
        records["u"].append(current.u)
        records["max_u"].append(float(np.max(current.u)))
        records["mass"].append(current.mass)
        records["flux"].append(flux)
        records["newton"].append(iterations)
        if reference is not None:
            records["sup"].append(float(np.max(np.abs(snap - reference)[mask])))
            records["l1"].append(l1_distance(snap, reference, y_grid))

    current = state
    record(current, 0.0, 0)
    flux = 0.0
    iterations = 0
    for k in range(1, steps + 1):
        s_k = min(s_start + k * ds, s_final)
        current = _advance(current, current.T - math.exp(-s_k), max_iterations)
        flux += current.boundary_flux
        iterations += current.newton_iterations
        if k % snapshot_every == 0 or k == steps:
            record(current, flux, iterations)
            flux = 0.0
            iterations = 0
        if k % max(1, steps // 10) == 0:
            logger.progress(k, steps)

    return RescaledTrajectory(
        kind=state.kind,
        params=params,
        T=state.T,
        grid=state.grid,
        y_grid=y_grid,
        s_values=np.array(records["s"]),
        times=np.array(records["t"]),
        snapshots=np.array(records["snap"]),
        states=np.array(records["u"]),
        max_u=np.array(records["max_u"]),
        mass=np.array(records["mass"]),
        boundary_flux=np.array(records["flux"]),
        newton_iterations=np.array(records["newton"]),
        sup_history=np.array(records["sup"]) if reference is not None else None,
        l1_history=np.array(records["l1"]) if reference is not None else None,
    )


@dataclass(frozen=True, eq=False)
class ContractionReport:
    physical: np.ndarray
    rescaled: np.ndarray
    snapshot: np.ndarray
    nonincreasing: bool
    rate: Optional[float]
    snapshot_rate: Optional[float]
    predicted_rate: float

    @property
    def relative_error(self):
        if self.rate is None:
            return None
        return abs(self.rate / self.predicted_rate - 1)


def _decay_rate(s, values):
    if np.any(values <= 0):
        return None
    return float(-np.polyfit(s, np.log(values), 1)[0])


def contraction_check(run1: RescaledTrajectory, run2: RescaledTrajectory, constants) -> ContractionReport:
    """
    L1 distance between two runs: nonincrease in physical time, and the decay
    rate of the rescaled distance e^{-(n beta - alpha) s} int |u1 - u2| dx.
    """
    if run1.states.shape != run2.states.shape or not np.allclose(run1.s_values, run2.s_values, rtol=0, atol=1e-12):
        raise GridMismatch("contraction check needs two runs on the same grid and s samples")
    weights = run1.grid.weights
    physical = np.sum(weights * np.abs(run1.states - run2.states), axis=1)
    predicted = constants.n_beta_minus_alpha
    rescaled = np.exp(-predicted * run1.s_values) * physical
    snapshot = np.sum(run1.y_grid.weights * np.abs(run1.snapshots - run2.snapshots), axis=1)
    nonincreasing = bool(np.all(physical[1:] <= physical[:-1] * (1 + 1e-8)))
    return ContractionReport(
        physical=physical,
        rescaled=rescaled,
        snapshot=snapshot,
        nonincreasing=nonincreasing,
        rate=_decay_rate(run1.s_values, rescaled),
        snapshot_rate=_decay_rate(run1.s_values, snapshot),
        predicted_rate=predicted,
    )


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    sup: np.ndarray
    l1: np.ndarray
    floor: float
    decreasing_to_floor: bool


def decreases_to_floor(sup, floor, rel=1e-6) -> bool:
    """
    True when the part of the history above floor is nonincreasing from its peak
    on and has dropped below that peak by the last sample. An early rise is
    allowed since a perturbation is first compressed by the rescaling.
    """
    sup = np.asarray(sup, dtype=float)
    above = sup > floor
    if not np.any(above):
        return True
    peak = int(np.argmax(sup))
    tail = sup[peak:]
    steps_ok = (tail[1:] <= tail[:-1] * (1 + rel)) | (tail[1:] <= floor)
    if not np.all(steps_ok):
        return False
    return bool(sup[-1] <= floor or sup[-1] < sup[peak] * (1 - rel))


def convergence_diagnostics(traj: RescaledTrajectory, target: RadialProfile, compact=None,
                            floor=0.0) -> ConvergenceReport:
    """
    Sup and L1 distances of the snapshots to the target profile. floor is the
    accuracy the grid allows, taken from an independent run such as the
    unperturbed one.
    """
    expected = KIND_REGULAR if traj.grid.ball else KIND_SINGULAR
    if target.kind != expected:
        raise KindMismatch(f"a {'ball' if traj.grid.ball else 'punctured'} run converges to a {expected} "
                           f"profile, got {target.kind}")
    mask = _compact_mask(traj.y_grid, compact)
    reference = ProfileEvaluator(target)(traj.y_grid.nodes)
    diff = np.abs(traj.snapshots - reference)
    sup = np.max(diff[:, mask], axis=1)
    l1 = np.sum(traj.y_grid.weights * diff, axis=1)
    floor = float(floor)
    if floor < 0:
        raise RangeError(f"floor must be nonnegative, got {floor}")
    return ConvergenceReport(sup, l1, floor, decreases_to_floor(sup, floor))


def extinction_time_estimate(times, max_u, alpha) -> float:
    """T from a straight-line fit of max_u^{1/alpha} against t."""
    times = np.asarray(times, dtype=float)
    max_u = np.asarray(max_u, dtype=float)
    if len(times) < 3:
        raise NotExtincting("need at least 3 samples to estimate the extinction time")
    if np.max(max_u) - np.min(max_u) <= 1e-12 * np.max(max_u):
        raise NotExtincting("the maximum of u does not change")
    slope, intercept = np.polyfit(times, max_u ** (1 / alpha), 1)
    if slope >= 0:
        raise NotExtincting("the maximum of u is not decreasing")
    return float(-intercept / slope)
