"""
Radial self-similar profiles: the exact cylinder, the regular profile v_lambda
(v(0) = lambda) and the singular profile g_lambda blowing up like
lambda^{-rho1/((1-m)beta)} r^{-alpha/beta} at the origin.

All solves run in s = log r on x = log(r^{2/(1-m)} v), y = dx/ds:

    x' = y
    y' = -m y^2 - a y - (e^{(1-m)x}/m)(beta y + rho1/(1-m)) + 2k/(1-m)^2

with a = (n-2-(n+2)m)/(1-m). The cylinder is the fixed point y = 0,
e^{(1-m)x} = C*.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import solve_ivp, cumulative_simpson, quad
from scipy.interpolate import make_interp_spline, CubicHermiteSpline

from fastdiff.analysis_functions.params import ParamSet, validate, tail_roots, REL_TOL
from fastdiff.utils.custom_logger import logger
from fastdiff.utils.errors import (RangeError, WrongRegime, WrongExponent, WrongKind,
                                   GridMismatch, IntegrationFailure, NonPositive,
                                   InvariantViolation)

KIND_CYLINDER = "cylinder"
KIND_REGULAR = "regular"
KIND_SINGULAR = "singular"

HEAD_SERIES_ORDER = 8
DEFAULT_NODES = 1000
DEFAULT_TOL = 1e-8
DEFAULT_R_MAX = 1e3
XI0_FRACTION = 1e-6
STIFF_HEAD = 2000.0
COLLAPSE_DEPTH = 40.0
INVERSION_M_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    A profile sampled on a strictly increasing grid of log-radii.

    alpha and beta are the exponents of the ODE the profile solves. They equal
    params.alpha and params.beta except for inverted profiles.
    """

    kind: str
    params: ParamSet
    s_grid: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    alpha: float
    beta: float
    meta: dict = field(default_factory=dict)
    inverted: bool = False

    @property
    def r(self):
        return np.exp(self.s_grid)

    @property
    def xi0(self):
        return self.meta.get("xi0")

    def __len__(self):
        return len(self.s_grid)


def _b(m):
    return 2 / (1 - m)


def cylinder_constant(params: ParamSet) -> float:
    return 2 * params.m * params.k / ((1 - params.m) * params.rho1)


def singular_prefactor(params: ParamSet) -> float:
    """lambda^{-rho1/((1-m)beta)}, the blow-up coefficient of g_lambda."""
    return params.lam ** (-params.rho1 / ((1 - params.m) * params.beta))


def characteristic_radius(params: ParamSet) -> float:
    """Radius where the leading blow-up power law crosses the cylinder."""
    return cylinder_constant(params) ** (-params.beta / params.rho1) / params.lam


def taylor_coefficient(params: ParamSet) -> float:
    """K in v(r) = lambda (1 - K r^2 + L r^4) + O(r^6)."""
    return params.alpha * params.lam ** (1 - params.m) / (2 * params.n * params.m)


def taylor_coefficients(params: ParamSet):
    """(K, L) in v(r) = lambda (1 - K r^2 + L r^4) + O(r^6)."""
    n, m = params.n, params.m
    K = taylor_coefficient(params)
    L = params.lam ** (1 - m) * (params.alpha + 2 * params.beta) * K / (4 * m * (n + 2)) + 0.5 * (1 - m) * K * K
    return K, L


def _taylor_head(params: ParamSet, r):
    """v and dv/dr from the regular series at the origin."""
    K, L = taylor_coefficients(params)
    r2 = r * r
    v = params.lam * (1 - K * r2 + L * r2 * r2)
    dv = params.lam * r * (-2 * K + 4 * L * r2)
    return v, dv


def taylor_seed_radius(params: ParamSet, tol: float) -> float:
    return 0.1 * tol ** 0.25 / math.sqrt(taylor_coefficient(params))


def _resolve_grid(s_grid, s_min, s_max, n_nodes):
    if s_grid is not None:
        s_grid = np.asarray(s_grid, dtype=float)
        if s_grid.ndim != 1 or len(s_grid) < 3 or np.any(np.diff(s_grid) <= 0):
            raise RangeError("s_grid must be a strictly increasing array of at least 3 nodes")
        return s_grid
    if not s_max > s_min:
        raise RangeError(f"empty radial range: log r from {s_min:.6g} to {s_max:.6g}")
    return np.linspace(s_min, s_max, int(n_nodes))


class LogSystem:
    """Right-hand side and Jacobian of the first order system in (x, y)."""

    def __init__(self, params: ParamSet):
        n, m, rho1 = params.n, params.m, params.rho1
        self.m = m
        self.beta = params.beta
        self.rho1 = rho1
        self.a = (n - 2 - (n + 2) * m) / (1 - m)
        self.c0 = 2 * params.k / (1 - m) ** 2
        self.shift = rho1 / (1 - m)
        self.x_star = math.log(cylinder_constant(params)) / (1 - m)

    def __call__(self, s, z):
        x, y = z
        E = np.exp((1 - self.m) * x)
        return np.array([
            y,
            -self.m * y * y - self.a * y - (E / self.m) * (self.beta * y + self.shift) + self.c0,
        ])

    def jacobian(self, s, z):
        x, y = z
        m = self.m
        E = np.exp((1 - m) * x)
        return np.array([
            [0.0, 1.0],
            [-((1 - m) * E / m) * (self.beta * y + self.shift),
             -2 * m * y - self.a - (self.beta / m) * E],
        ])

    def stiffness(self, x):
        return (self.beta / self.m) * math.exp((1 - self.m) * x)


class SlowManifoldSeries:
    """
    Expansion of the singular branch in eps = e^{-(1-m)x} as x -> infinity:

        y = -delta + sum_j c_j eps^j
        x = log L - delta s + sum_j H_j eps^j

    with delta = rho1/((1-m)beta) and L the blow-up coefficient.
    """

    def __init__(self, params: ParamSet, order=HEAD_SERIES_ORDER):
        system = LogSystem(params)
        m, beta, rho1 = params.m, params.beta, params.rho1
        self.m = m
        self.order = order
        self.delta = rho1 / ((1 - m) * beta)
        self.log_L = math.log(singular_prefactor(params))

        d = self.delta
        F00 = -m * d * d + system.a * d + system.c0
        F01 = 2 * m * d - system.a
        F02 = -m
        p = rho1 / beta

        c = np.zeros(order + 1)
        c[1] = m * F00 / beta
        for j in range(1, order):
            conv = sum(c[i] * c[j - i] for i in range(1, j))
            weighted = sum(i * c[i] * c[j - i] for i in range(1, j))
            c[j + 1] = (m / beta) * (F01 * c[j] + F02 * conv - p * j * c[j] + (1 - m) * weighted)
        self.c = c

        # dx/ds = -delta (1 - u), u = c/delta; 1/(1-u) - 1 integrates term by term
        u = c / d
        g = np.zeros(order + 1)
        term = np.zeros(order + 1)
        term[0] = 1.0
        for _ in range(order):
            term = np.convolve(term, u)[:order + 1]
            g += term
        H = np.zeros(order + 1)
        H[1:] = g[1:] / (np.arange(1, order + 1) * (1 - m))
        self.H = H

    def leading_ratio(self, x):
        """c_1 eps / delta, the size of the first correction."""
        return self.c[1] * math.exp(-(1 - self.m) * x) / self.delta

    def x(self, s, iterations=200):
        s = np.asarray(s, dtype=float)
        base = self.log_L - self.delta * s
        x = base.copy()
        for _ in range(iterations):
            x_new = base + P.polyval(np.exp(-(1 - self.m) * x), self.H)
            if np.all(np.abs(x_new - x) <= 1e-15 * np.maximum(1.0, np.abs(x_new))):
                return x_new
            x = x_new
        return x

    def y(self, x):
        return -self.delta + P.polyval(np.exp(-(1 - self.m) * np.asarray(x, dtype=float)), self.c)

    def correction(self, x):
        """x + delta s - log L, the part of the head beyond the leading power law."""
        return P.polyval(np.exp(-(1 - self.m) * np.asarray(x, dtype=float)), self.H)


def _from_log(s, x, y, m):
    b = _b(m)
    v = np.exp(x - b * s)
    dv = v * (y - b) * np.exp(-s)
    return v, dv


def _integrate(system, s0, z0, s_end, tol, method, x_floor):
    rtol = max(1e-3 * tol, 1e-13)
    if method == "auto":
        method = "Radau" if system.stiffness(z0[0]) > STIFF_HEAD else "DOP853"
    kwargs = {}
    if method in ("Radau", "BDF", "LSODA"):
        kwargs["jac"] = system.jacobian

    def collapse(s, z):
        return z[0] - x_floor
    collapse.terminal = True
    collapse.direction = -1

    logger.debug(f"integrating log system with {method} from s={s0:.6g} to s={s_end:.6g} (rtol={rtol:.3g})")
    sol = solve_ivp(system, (s0, s_end), z0, method=method, rtol=rtol, atol=rtol,
                    dense_output=True, events=collapse, **kwargs)
    if sol.status == -1:
        raise IntegrationFailure(f"integration stopped at s={sol.t[-1]:.6g}: {sol.message}")
    if sol.status == 1:
        raise NonPositive(
            f"profile collapsed towards zero at s={sol.t_events[0][0]:.6g}; "
            "check the parameters or tighten the tolerance")
    logger.debug(f"{method}: {sol.nfev} right-hand side evaluations, {len(sol.t)} steps")
    return sol, method


def cylinder(params: ParamSet, s_grid=None, r_min=1e-3, r_max=DEFAULT_R_MAX, n_nodes=DEFAULT_NODES):
    validate(params)
    s_grid = _resolve_grid(s_grid, math.log(r_min), math.log(r_max), n_nodes)
    m = params.m
    b = _b(m)
    c = cylinder_constant(params) ** (1 / (1 - m))
    v = c * np.exp(-b * s_grid)
    dv = -b * v * np.exp(-s_grid)
    return RadialProfile(KIND_CYLINDER, params, s_grid, v, dv, params.alpha, params.beta,
                         meta={"Cstar": cylinder_constant(params)})


def solve_regular(params: ParamSet, r_max=DEFAULT_R_MAX, tol=DEFAULT_TOL, s_grid=None, s_min=None,
                  n_nodes=DEFAULT_NODES, method="auto"):
    validate(params)
    if not r_max > 0:
        raise RangeError(f"r_max must be positive, got {r_max}")
    m = params.m
    b = _b(m)
    r0 = taylor_seed_radius(params, tol)
    s0 = math.log(r0)
    if s_min is None:
        s_min = s0 - 1
    s_grid = _resolve_grid(s_grid, s_min, math.log(r_max), n_nodes)

    system = LogSystem(params)
    v0, dv0 = _taylor_head(params, r0)
    x0 = math.log(v0) + b * s0
    y0 = b + r0 * dv0 / v0

    v = np.empty_like(s_grid)
    dv = np.empty_like(s_grid)
    head = s_grid < s0
    r_head = np.exp(s_grid[head])
    v[head], dv[head] = _taylor_head(params, r_head)

    used = "taylor"
    nfev = 0
    if np.any(~head):
        sol, used = _integrate(system, s0, [x0, y0], s_grid[-1], tol, method,
                               min(x0, system.x_star) - COLLAPSE_DEPTH)
        nfev = int(sol.nfev)
        x, y = sol.sol(s_grid[~head])
        v[~head], dv[~head] = _from_log(s_grid[~head], x, y, m)

    return RadialProfile(KIND_REGULAR, params, s_grid, v, dv, params.alpha, params.beta,
                         meta={"tol": tol, "method": used, "r_seed": r0, "nfev": nfev})


def default_xi0(params: ParamSet) -> float:
    return XI0_FRACTION * characteristic_radius(params)


def _singular_start(series, s0, start):
    if start == "literal":
        x0 = series.log_L - series.delta * s0
        return x0, -series.delta
    if start != "series":
        raise RangeError(f"start must be `series` or `literal`, got `{start}`")
    x0 = float(series.x(np.array([s0]))[0])
    return x0, float(series.y(x0))


def solve_singular(params: ParamSet, xi0=None, r_max=DEFAULT_R_MAX, tol=DEFAULT_TOL, s_grid=None,
                   s_min=None, n_nodes=DEFAULT_NODES, method="auto", start="series"):
    validate(params)
    if xi0 is None:
        xi0 = default_xi0(params)
    if not 0 < xi0 < r_max:
        raise RangeError(f"xi0 must satisfy 0 < xi0 < r_max, got xi0={xi0:.6g}, r_max={r_max:.6g}")

    m = params.m
    s0 = math.log(xi0)
    s_grid = _resolve_grid(s_grid, s0 if s_min is None else s_min, math.log(r_max), n_nodes)

    series = SlowManifoldSeries(params)
    system = LogSystem(params)
    x0, y0 = _singular_start(series, s0, start)
    if series.leading_ratio(x0) > 0.5:
        raise RangeError(
            f"xi0={xi0:.6g} lies outside the blow-up region of the profile; "
            f"choose xi0 well below {characteristic_radius(params):.6g}")

    x = np.empty_like(s_grid)
    y = np.empty_like(s_grid)
    head = s_grid < s0
    if np.any(head):
        x[head] = series.x(s_grid[head])
        y[head] = series.y(x[head])

    used = "series"
    nfev = 0
    if np.any(~head):
        sol, used = _integrate(system, s0, [x0, y0], s_grid[-1], tol, method,
                               min(x0, system.x_star) - COLLAPSE_DEPTH)
        nfev = int(sol.nfev)
        x[~head], y[~head] = sol.sol(s_grid[~head])

    slack = 10 * tol
    b = _b(m)
    if np.any(y - b > slack):
        raise InvariantViolation("singular profile is increasing somewhere; g' <= 0 is violated")
    if np.any(y + series.delta < -slack):
        raise InvariantViolation("r^{alpha/beta} g decreases somewhere on the singular profile")
    if np.any(x + series.delta * s_grid < series.log_L - slack):
        raise InvariantViolation("singular profile dropped below its blow-up lower bound")

    v, dv = _from_log(s_grid, x, y, m)
    return RadialProfile(KIND_SINGULAR, params, s_grid, v, dv, params.alpha, params.beta,
                         meta={"tol": tol, "method": used, "xi0": xi0, "start": start, "nfev": nfev})


def solve_profile(kind, params: ParamSet, **kwargs):
    if kind == KIND_CYLINDER:
        kwargs = {k: v for k, v in kwargs.items() if k in ("s_grid", "r_max", "n_nodes")}
        return cylinder(params, **kwargs)
    if kind == KIND_REGULAR:
        kwargs.pop("xi0", None)
        kwargs.pop("start", None)
        return solve_regular(params, **kwargs)
    if kind == KIND_SINGULAR:
        return solve_singular(params, **kwargs)
    raise WrongKind(f"unknown profile kind `{kind}`")


def _flux(profile: RadialProfile):
    """Q = r^{n-1} (v^m)'."""
    n, m = profile.params.n, profile.params.m
    r = profile.r
    return r ** (n - 1) * m * profile.v ** (m - 1) * profile.dv


def ode_residual(profile: RadialProfile) -> np.ndarray:
    if len(profile) < 3:
        raise RangeError("ode_residual needs at least 3 nodes")
    n = profile.params.n
    s, r = profile.s_grid, profile.r
    Q = _flux(profile)
    k = min(7, len(s) - 1)
    if k % 2 == 0:
        k -= 1

    if np.all(Q < 0) or np.all(Q > 0):
        logQ = make_interp_spline(s, np.log(np.abs(Q)), k=k)
        dQ_ds = Q * logQ.derivative()(s)
    else:
        dQ_ds = make_interp_spline(s, Q, k=k).derivative()(s)

    terms = [np.exp(-s) * dQ_ds,
             profile.alpha * r ** (n - 1) * profile.v,
             profile.beta * r ** n * profile.dv]
    scale = np.abs(terms[0]) + np.abs(terms[1]) + np.abs(terms[2])
    return (terms[0] + terms[1] + terms[2]) / scale


def _singular_head_mass(params: ParamSet, s0: float) -> float:
    """Integral of g(r) r^{n-1} dr over (0, e^{s0}) along the slow-manifold head."""
    series = SlowManifoldSeries(params)
    L = math.exp(series.log_L)
    mu = params.n - params.alpha / params.beta

    def excess(s):
        x = series.x(np.array([s]))[0]
        return L * math.exp(mu * s) * math.expm1(series.correction(x))

    tail, _ = quad(excess, -np.inf, s0, limit=200)
    return L * math.exp(mu * s0) / mu + tail


def integral_identity_residual(profile: RadialProfile) -> np.ndarray:
    """
    Residual of r^{n-1}(v^m)' + beta r^n v = (n beta - alpha) int_0^r v rho^{n-1} d rho,
    or of r^{n-1}(v^m)' + beta r^n v = beta L at the boundary case beta = rho1/k
    of the singular profile.
    """
    if profile.inverted:
        raise WrongKind("integral identities are defined for profiles in the original variables")
    params = profile.params
    n, m, beta = params.n, params.m, params.beta
    s, r, v = profile.s_grid, profile.r, profile.v
    beta1 = params.rho1 / params.k

    Q = _flux(profile)
    lhs = Q + beta * r ** n * v

    if profile.kind == KIND_SINGULAR:
        if beta < beta1 and not abs(beta - beta1) <= REL_TOL * beta1:
            raise WrongRegime(
                f"the integral identity of the singular profile needs beta >= {beta1:.6g}, got {beta}")
        if abs(beta - beta1) <= REL_TOL * beta1:
            rhs = np.full_like(lhs, beta * singular_prefactor(params))
            scale = np.abs(Q) + np.abs(beta * r ** n * v) + np.abs(rhs)
            return (lhs - rhs) / scale

    r0 = r[0]
    if profile.kind == KIND_CYLINDER:
        b = _b(m)
        c = cylinder_constant(params) ** (1 / (1 - m))
        head = c * r0 ** (n - b) / (n - b)
    elif profile.kind == KIND_REGULAR:
        K, L = taylor_coefficients(params)
        head = params.lam * (r0 ** n / n - K * r0 ** (n + 2) / (n + 2) + L * r0 ** (n + 4) / (n + 4))
    else:
        head = _singular_head_mass(params, s[0])

    mass = head + cumulative_simpson(v * np.exp(n * s), x=s, initial=0)
    rhs = (n * beta - params.alpha) * mass
    scale = np.abs(Q) + np.abs(beta * r ** n * v) + np.abs(rhs)
    return (lhs - rhs) / scale


def invert(profile: RadialProfile) -> RadialProfile:
    """
    v~(rho) = rho^{-(n-2)/m} v(1/rho) for m = (n-2)/(n+2), which solves the
    same equation with alpha' = alpha - ((n-2)/m) beta and beta' = -beta.
    """
    n, m = profile.params.n, profile.params.m
    if abs(m - (n - 2) / (n + 2)) > INVERSION_M_TOL:
        raise WrongExponent(f"inversion needs m = (n-2)/(n+2) = {(n - 2) / (n + 2):.15g}, got m={m}")
    kappa = (n - 2) / m
    s_new = -profile.s_grid[::-1]
    rho = np.exp(s_new)
    v_rev = profile.v[::-1]
    dv_rev = profile.dv[::-1]
    v_new = np.exp(-kappa * s_new) * v_rev
    dv_new = -kappa * v_new / rho - rho ** (-kappa - 2) * dv_rev

    return replace(profile, s_grid=s_new, v=v_new, dv=dv_new,
                   alpha=profile.alpha - kappa * profile.beta, beta=-profile.beta,
                   inverted=not profile.inverted, meta=dict(profile.meta))


def rescale_lambda(profile: RadialProfile, lambda2: float) -> RadialProfile:
    """Exact change of lambda by the scaling symmetries of the regular and singular families."""
    if profile.kind == KIND_CYLINDER or profile.inverted:
        raise WrongKind("rescale_lambda needs a regular or singular profile")
    params = profile.params
    if not lambda2 > 0:
        raise RangeError(f"lambda must be positive, got {lambda2}")
    beta1 = params.rho1 / params.k
    if params.beta < beta1 and not abs(params.beta - beta1) <= REL_TOL * beta1:
        raise WrongRegime(f"lambda rescaling is stated for beta >= {beta1:.6g}, got {params.beta}")

    m = params.m
    ratio = lambda2 / params.lam
    meta = dict(profile.meta)
    if profile.kind == KIND_REGULAR:
        shift = 0.5 * (1 - m) * math.log(ratio)
        v = ratio * profile.v
        dv = ratio ** (1 + 0.5 * (1 - m)) * profile.dv
        if "r_seed" in meta:
            meta["r_seed"] = meta["r_seed"] / math.exp(shift)
    else:
        b = _b(m)
        shift = math.log(ratio)
        v = ratio ** b * profile.v
        dv = ratio ** (b + 1) * profile.dv
        meta["xi0"] = meta["xi0"] / ratio
    meta["rescaled_from"] = params.lam

    return replace(profile, params=replace(params, lam=lambda2), s_grid=profile.s_grid - shift,
                   v=v, dv=dv, meta=meta)


def xi0_halving_error(params: ParamSet, xi0=None, r_max=DEFAULT_R_MAX, tol=DEFAULT_TOL,
                      n_nodes=DEFAULT_NODES, method="auto", start="series") -> float:
    """Largest relative change on [2 xi0, r_max] when the singular start radius is halved."""
    if xi0 is None:
        xi0 = default_xi0(params)
    s_grid = np.linspace(math.log(2 * xi0), math.log(r_max), n_nodes)
    coarse = solve_singular(params, xi0=xi0, r_max=r_max, tol=tol, s_grid=s_grid, method=method, start=start)
    fine = solve_singular(params, xi0=xi0 / 2, r_max=r_max, tol=tol, s_grid=s_grid, method=method, start=start)
    return float(np.max(np.abs(coarse.v - fine.v) / fine.v))


def envelope_constant(profile: RadialProfile) -> float:
    """
    Smallest C0 with r^{alpha/beta} g <= L exp((beta C0/rho1)(lambda r)^{rho1/beta})
    over the computed range.
    """
    if profile.kind != KIND_SINGULAR or profile.inverted:
        raise WrongKind("envelope_constant needs a singular profile")
    params = profile.params
    ratio = params.rho1 / params.beta
    s = profile.s_grid
    log_excess = np.log(profile.v) + (params.alpha / params.beta) * s - math.log(singular_prefactor(params))
    return float(np.max(ratio * log_excess / (params.lam * np.exp(s)) ** ratio))


@dataclass(frozen=True)
class SandwichReport:
    lower_margin: float
    upper_margin: float
    holds: bool


def check_sandwich(regular: RadialProfile, cyl: RadialProfile, singular: RadialProfile) -> SandwichReport:
    """Relative margins of v_regular < cylinder < g_singular on a common grid."""
    for profile in (cyl, singular):
        if len(profile) != len(regular) or not np.allclose(profile.s_grid, regular.s_grid, rtol=0, atol=1e-12):
            raise GridMismatch("sandwich check needs the three profiles on one grid")
    lower = float(np.min((cyl.v - regular.v) / cyl.v))
    upper = float(np.min((singular.v - cyl.v) / cyl.v))
    return SandwichReport(lower, upper, lower > 0 and upper > 0)


class ProfileEvaluator:
    """
    Evaluates a stored profile at arbitrary radii.

    Inside the grid x = log(r^b v) is a cubic Hermite spline in s; below the
    grid the Taylor series (regular) or the head expansion (singular) is used,
    and beyond it x relaxes to the cylinder at the slow tail rate.
    """

    def __init__(self, profile: RadialProfile):
        if profile.inverted:
            raise WrongKind("evaluate inverted profiles through their original")
        params = profile.params
        self.profile = profile
        self.params = params
        self.m = params.m
        self.b = _b(params.m)
        s = profile.s_grid
        x = np.log(profile.v) + self.b * s
        y = self.b + profile.dv * np.exp(s) / profile.v
        self.s_lo, self.s_hi = s[0], s[-1]
        self.x_hi = x[-1]
        self.spline = CubicHermiteSpline(s, x, y)
        self.x_star = math.log(cylinder_constant(params)) / (1 - params.m)

        A, _, gamma1, _ = tail_roots(params, params.beta)
        self.tail_rate = gamma1 if gamma1 is not None else A / (2 * (1 - params.m))
        self.series = SlowManifoldSeries(params) if profile.kind == KIND_SINGULAR else None

    def _x(self, s):
        x = np.empty_like(s)
        mid = (s >= self.s_lo) & (s <= self.s_hi)
        x[mid] = self.spline(s[mid])
        high = s > self.s_hi
        x[high] = self.x_star + (self.x_hi - self.x_star) * np.exp(-self.tail_rate * (s[high] - self.s_hi))
        low = s < self.s_lo
        if np.any(low):
            if self.profile.kind == KIND_SINGULAR:
                x[low] = self.series.x(s[low])
            elif self.profile.kind == KIND_REGULAR:
                x[low] = np.log(_taylor_head(self.params, np.exp(s[low]))[0]) + self.b * s[low]
            else:
                x[low] = self.x_star
        return x

    def __call__(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        if self.profile.kind == KIND_CYLINDER:
            out = (cylinder_constant(self.params) / r ** 2) ** (1 / (1 - self.m))
            return out
        zero = r <= 0
        if np.any(zero):
            if self.profile.kind != KIND_REGULAR:
                raise RangeError("singular profiles are not defined at r = 0")
            out[zero] = self.params.lam
        s = np.log(r[~zero])
        out[~zero] = np.exp(self._x(s) - self.b * s)
        return out
