"""
Tail analysis of computed profiles in the log variables

    q = (r^{2/(1-m)} v)^m / C*^{m/(1-m)},   w = q - 1,   F = (r^2/C*)^{1/(1-m)} v - 1,

and fits of the second order normal form v = C(r)(1 -/+ B r^{-gamma1} + ...).
"""

from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial import Polynomial

from fastdiff.analysis_functions.params import ParamSet, DerivedConstants, tail_roots
from fastdiff.analysis_functions.profiles import (RadialProfile, SlowManifoldSeries, cylinder_constant,
                                                  singular_prefactor, KIND_REGULAR, KIND_SINGULAR)
from fastdiff.utils.custom_logger import logger
from fastdiff.utils.errors import (WindowTooShort, NoDecay, WrongRegime, WrongKind, KindMismatch,
                                   RangeError)

KIND_SYNTHETIC = "synthetic"

MIN_WINDOW_NODES = 10
DEFAULT_WINDOW_FRACTION = 0.4
CSTAR_FIT_DEGREE = 3


@dataclass(frozen=True, eq=False)
class LogProfile:
    kind: str
    params: ParamSet
    s_grid: np.ndarray
    x: np.ndarray
    dxds: np.ndarray
    q: np.ndarray
    w: np.ndarray
    F: np.ndarray


@dataclass(frozen=True)
class AsymptoticFit:
    """
    Second order tail fit.

    B_hat uses the exact gamma1; gamma_hat is the free slope of log|F| and is
    only compared against gamma1. B_w is the same amplitude read off w and is
    kept as a diagnostic.
    """

    kind: str
    lam: float
    Cstar_hat: float
    gamma_hat: float
    gamma1: float
    B_hat: float
    sign: int
    window: tuple
    residual: float
    B_halves: tuple
    gamma_halves: tuple
    B_w: float

    @property
    def halves_agreement(self):
        return abs(self.B_halves[1] / self.B_halves[0] - 1)

    def as_dict(self):
        return {
            "kind": self.kind, "lambda": self.lam, "Cstar_hat": self.Cstar_hat,
            "gamma_hat": self.gamma_hat, "gamma1": self.gamma1, "B_hat": self.B_hat,
            "sign": self.sign, "window": list(self.window), "residual": self.residual,
            "B_halves": list(self.B_halves), "gamma_halves": list(self.gamma_halves),
            "B_halves_agreement": self.halves_agreement, "B_w": self.B_w,
        }


@dataclass(frozen=True, eq=False)
class BlowupReport:
    limit: float
    raw: np.ndarray
    corrected: np.ndarray
    raw_deviation: float
    corrected_deviation: float


def synthetic_profile(params: ParamSet, B: float, s_grid, sign=-1) -> RadialProfile:
    """The exact normal form (C*/r^2)^{1/(1-m)} (1 + sign B r^{-gamma1})."""
    _, _, gamma1, _ = tail_roots(params, params.beta)
    if gamma1 is None:
        raise WrongRegime("tail exponents are complex for this beta")
    s_grid = np.asarray(s_grid, dtype=float)
    m = params.m
    b = 2 / (1 - m)
    r = np.exp(s_grid)
    base = cylinder_constant(params) ** (1 / (1 - m)) * r ** (-b)
    corr = 1 + sign * B * r ** (-gamma1)
    v = base * corr
    dv = base * (-b * corr / r - sign * B * gamma1 * r ** (-gamma1 - 1))
    return RadialProfile(KIND_SYNTHETIC, params, s_grid, v, dv, params.alpha, params.beta,
                         meta={"synthetic_B": B, "sign": sign})


def to_log_profile(profile: RadialProfile) -> LogProfile:
    if profile.inverted:
        raise WrongKind("log variables are defined for profiles in the original variables")
    if np.any(profile.v <= 0):
        raise RangeError("log variables need a positive profile")
    params = profile.params
    m = params.m
    b = 2 / (1 - m)
    s = profile.s_grid
    x = np.log(profile.v) + b * s
    dxds = b + profile.dv * np.exp(s) / profile.v
    z = x - math.log(cylinder_constant(params)) / (1 - m)
    q = np.exp(m * z)
    return LogProfile(profile.kind, params, s, x, dxds, q, np.expm1(m * z), np.expm1(z))


def w_equation_residual(logp: LogProfile, params: ParamSet = None) -> np.ndarray:
    """
    Residual of

        w'' + (a + (beta C*/m)(1+w)^{1/m-1}) w' + (2mk/(1-m)^2)((1+w)^{1/m} - 1 - w) = 0

    with second order differences in s.
    """
    params = logp.params if params is None else params
    if len(logp.s_grid) < 5:
        raise RangeError("w_equation_residual needs at least 5 nodes")
    n, m, beta = params.n, params.m, params.beta
    s, w = logp.s_grid, logp.w
    a = (n - 2 - (n + 2) * m) / (1 - m)
    Cstar = cylinder_constant(params)

    ws = np.gradient(w, s, edge_order=2)
    wss = np.gradient(ws, s, edge_order=2)
    one_w = 1 + w
    return (wss + (a + (beta * Cstar / m) * one_w ** (1 / m - 1)) * ws
            + (2 * m * params.k / (1 - m) ** 2) * (one_w ** (1 / m) - one_w))


def _window_mask(s, window):
    if window is None:
        lo = s[0] + (1 - DEFAULT_WINDOW_FRACTION) * (s[-1] - s[0])
        window = (lo, s[-1])
    lo, hi = window
    mask = (s >= lo) & (s <= hi)
    if mask.sum() < MIN_WINDOW_NODES:
        raise WindowTooShort(
            f"fit window [{lo:.6g}, {hi:.6g}] holds {mask.sum()} nodes, at least {MIN_WINDOW_NODES} are needed")
    return mask, (float(lo), float(hi))


def _slope(s, values):
    return float(np.polyfit(s, values, 1)[0])


def fit_tail(logp: LogProfile, constants: DerivedConstants, window=None) -> AsymptoticFit:
    gamma1 = constants.gamma1
    if gamma1 is None:
        raise WrongRegime("tail exponents are complex for this beta, the normal form does not apply")
    m = logp.params.m
    mask, window = _window_mask(logp.s_grid, window)
    s = logp.s_grid[mask]
    F = logp.F[mask]
    absF = np.abs(F)

    if np.max(absF) < 1e-12:
        raise NoDecay("profile coincides with the cylinder over the fit window")
    if np.any(np.sign(F) != np.sign(F[0])):
        raise NoDecay("deviation from the cylinder changes sign inside the fit window")
    slope = _slope(s, np.log(absF))
    if slope >= 0 or np.any(np.diff(absF) > 0):
        raise NoDecay("|F| is not decreasing over the fit window")

    sign = int(np.sign(F[0]))
    scaled = absF * np.exp(gamma1 * s)
    B_hat = float(np.mean(scaled))
    residual = float(np.max(np.abs(F - sign * B_hat * np.exp(-gamma1 * s)) / absF))

    half = len(s) // 2
    B_halves = (float(np.mean(scaled[:half])), float(np.mean(scaled[half:])))
    gamma_halves = (-_slope(s[:half], np.log(absF[:half])), -_slope(s[half:], np.log(absF[half:])))
    B_w = float(np.mean(np.abs(logp.w[mask]) * np.exp(gamma1 * s)))

    t = np.exp(-gamma1 * s)
    Z = np.exp((1 - m) * logp.x[mask])
    Cstar_hat = float(Polynomial.fit(t, Z, CSTAR_FIT_DEGREE)(0.0))

    logger.debug(f"tail fit on [{window[0]:.4g}, {window[1]:.4g}]: gamma_hat={-slope:.6g}, "
                 f"B_hat={B_hat:.6g}, Cstar_hat={Cstar_hat:.8g}")

    return AsymptoticFit(
        kind=logp.kind,
        lam=logp.params.lam,
        Cstar_hat=Cstar_hat,
        gamma_hat=-slope,
        gamma1=gamma1,
        B_hat=B_hat,
        sign=sign,
        window=window,
        residual=residual,
        B_halves=B_halves,
        gamma_halves=gamma_halves,
        B_w=B_w,
    )


def B_scaling_exponent(kind, m, gamma1):
    if kind == KIND_SINGULAR:
        return gamma1
    return 0.5 * (1 - m) * gamma1


def check_B_scaling(fit1: AsymptoticFit, fit2: AsymptoticFit, lambda1, lambda2,
                    constants: DerivedConstants) -> float:
    """|B2 / (B1 (lambda1/lambda2)^e) - 1| for the exponent e of the fits' family."""
    if fit1.kind != fit2.kind:
        raise KindMismatch(f"cannot compare a {fit1.kind} fit with a {fit2.kind} fit")
    exponent = B_scaling_exponent(fit1.kind, constants.params.m, constants.gamma1)
    predicted = fit1.B_hat * (lambda1 / lambda2) ** exponent
    return abs(fit2.B_hat / predicted - 1)


def blowup_limit_check(logp: LogProfile, params: ParamSet = None, nodes=5) -> BlowupReport:
    """
    r^{alpha/beta} g at the smallest nodes against its limit at the origin,
    raw and with the head correction divided out.
    """
    if logp.kind != KIND_SINGULAR:
        raise WrongKind("blow-up limits are defined for singular profiles")
    params = logp.params if params is None else params
    series = SlowManifoldSeries(params)
    limit = singular_prefactor(params)
    s = logp.s_grid[:nodes]
    x = logp.x[:nodes]
    raw = np.exp(x + series.delta * s)
    corrected = np.exp(x + series.delta * s - series.correction(x))
    return BlowupReport(
        limit=limit,
        raw=raw,
        corrected=corrected,
        raw_deviation=float(np.max(np.abs(raw - limit)) / limit),
        corrected_deviation=float(np.max(np.abs(corrected - limit)) / limit),
    )


def head_exponent(logp: LogProfile, fraction=0.1) -> float:
    """Slope of log w over the deepest nodes of a singular profile."""
    if logp.kind != KIND_SINGULAR:
        raise WrongKind("head exponents are defined for singular profiles")
    count = max(5, int(fraction * len(logp.s_grid)))
    return _slope(logp.s_grid[:count], np.log(logp.w[:count]))


def expected_head_exponent(params: ParamSet) -> float:
    return -params.m * params.rho1 / ((1 - params.m) * params.beta)


def tail_table(logp: LogProfile, gamma1):
    """Columns s, q, w, F, F e^{gamma1 s} for export."""
    scaled = logp.F * np.exp(gamma1 * logp.s_grid) if gamma1 is not None else np.full_like(logp.F, np.nan)
    return {"s": logp.s_grid, "q": logp.q, "w": logp.w, "F": logp.F, "F_scaled": scaled}
