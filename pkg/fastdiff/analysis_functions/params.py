"""
Parameter ranges and closed-form constants of the radial self-similar problem

    (r^{n-1}(v^m)')' + alpha r^{n-1} v + beta r^n v' = 0,   alpha = (2 beta + rho1)/(1 - m).

Everything here is a pure function of an immutable ParamSet, so it is safe to
call from any number of workers.
"""

from dataclasses import dataclass
from typing import Optional
import math

import numpy as np

from fastdiff.utils.errors import RangeError
from fastdiff.utils.custom_logger import logger

# relative slack for comparisons against thresholds that are themselves computed
REL_TOL = 1e-12

A0_SAMPLES = 64
A0_BETA_CEILING = 1e3


def _below(x, threshold):
    return x < threshold - REL_TOL * abs(threshold)


def _close(x, y):
    return abs(x - y) <= REL_TOL * max(abs(x), abs(y))


@dataclass(frozen=True)
class ParamSet:
    """
    Problem parameters.

    Attributes:
        n: space dimension, n >= 3.
        m: diffusion exponent, 0 < m < (n-2)/n.
        rho1: scaling constant, > 0.
        beta: self-similar exponent, beta >= m rho1/(n-2-nm).
        lam: profile amplitude lambda, > 0.
    """

    n: int
    m: float
    rho1: float
    beta: float
    lam: float = 1.0

    @property
    def k(self) -> float:
        return self.n - 2 - self.n * self.m

    @property
    def alpha(self) -> float:
        return (2 * self.beta + self.rho1) / (1 - self.m)

    @property
    def beta_min(self) -> float:
        return self.m * self.rho1 / self.k

    @property
    def critical_m(self) -> float:
        return (self.n - 2) / (self.n + 2)


@dataclass(frozen=True)
class BetaRegime:
    name: str
    n_beta_minus_alpha: float
    sign: int
    real_roots: bool
    at_uniqueness_boundary: bool


@dataclass(frozen=True)
class DerivedConstants:
    params: ParamSet
    k: float
    alpha: float
    beta1: float
    beta0: float
    beta2: float
    A_of_beta: float
    discriminant: float
    complex_roots: bool
    gamma1: Optional[float]
    gamma2: Optional[float]
    Cstar: float
    M0: Optional[float]
    A1_beta: Optional[float]
    A2_beta: Optional[float]
    n_beta_minus_alpha: float
    regime: BetaRegime

    def as_dict(self):
        out = {
            "n": self.params.n, "m": self.params.m, "rho1": self.params.rho1,
            "beta": self.params.beta, "lambda": self.params.lam,
        }
        for key in ["k", "alpha", "beta1", "beta0", "beta2", "A_of_beta", "discriminant",
                    "complex_roots", "gamma1", "gamma2", "Cstar", "M0", "A1_beta", "A2_beta",
                    "n_beta_minus_alpha"]:
            out[key] = getattr(self, key)
        out["regime"] = self.regime.name
        out["n_beta_minus_alpha_sign"] = self.regime.sign
        out["at_uniqueness_boundary"] = self.regime.at_uniqueness_boundary
        out["real_roots"] = self.regime.real_roots
        return out


def validate(params: ParamSet) -> ParamSet:
    n, m, rho1, beta, lam = params.n, params.m, params.rho1, params.beta, params.lam

    if int(n) != n or n < 3:
        raise RangeError(f"n must be an integer >= 3, got n={n}")
    for name, value in [("m", m), ("rho1", rho1), ("beta", beta), ("lambda", lam)]:
        if not math.isfinite(value):
            raise RangeError(f"{name} must be finite, got {value}")
    if not 0 < m:
        raise RangeError(f"m must be positive, got m={m}")
    if not m < (n - 2) / n:
        raise RangeError(f"m must satisfy m < (n-2)/n = {(n - 2) / n:.6g}, got m={m}")
    if not rho1 > 0:
        raise RangeError(f"rho1 must be positive, got rho1={rho1}")
    if not lam > 0:
        raise RangeError(f"lambda must be positive, got lambda={lam}")
    if _below(beta, params.beta_min):
        raise RangeError(
            f"beta must satisfy beta >= m*rho1/(n-2-n*m) = {params.beta_min:.6g}, got beta={beta}")
    return params


def beta0_threshold(params: ParamSet) -> float:
    """Smallest beta from which the tail exponents gamma1, gamma2 are real."""
    n, m, rho1, k = params.n, params.m, params.rho1, params.k
    if not _below(params.critical_m, m):
        return rho1 * math.sqrt(2 * (1 - m) / k)
    return rho1 * max(2 * math.sqrt(2 * (1 - m) / k), ((n + 2) * m - (n - 2)) / k)


def A_of(params: ParamSet, beta: float) -> float:
    n, m = params.n, params.m
    return n - 2 - (n + 2) * m + 2 * beta * params.k / params.rho1


def tail_roots(params: ParamSet, beta: float):
    """
    Roots gamma1 <= gamma2 of (1-m) g^2 - A(beta) g + 2k = 0, or None when complex.

    The smaller root is taken from the product 2k/(1-m) so it keeps its digits
    when A(beta)^2 >> 8k(1-m).
    """
    m, k = params.m, params.k
    A = A_of(params, beta)
    disc = A * A - 8 * k * (1 - m)
    if disc < 0:
        if disc >= -REL_TOL * A * A:
            disc = 0.0
        else:
            return A, disc, None, None
    root = math.sqrt(disc)
    product = 2 * k / (1 - m)
    if A >= 0:
        gamma2 = (A + root) / (2 * (1 - m))
        gamma1 = product / gamma2
    else:
        gamma1 = (A - root) / (2 * (1 - m))
        gamma2 = product / gamma1
    return A, disc, gamma1, gamma2


def _A1_positive_above(params: ParamSet, a: float, beta0: float, beta1: float) -> bool:
    rho1, m = params.rho1, params.m
    lo = max(a * rho1, beta0, beta1)
    hi = A0_BETA_CEILING * rho1
    if lo >= hi:
        return True
    for beta in np.geomspace(lo, hi, A0_SAMPLES + 1)[1:]:
        _, _, gamma1, _ = tail_roots(params, beta)
        if gamma1 is None or not 1 / (1 - m) - beta * gamma1 / rho1 > 0:
            return False
    return True


def beta2_lower_bound(params: ParamSet) -> float:
    """
    Threshold above which the second order tail expansion is guaranteed.

    b0 is closed form; for m above (n-2)/(n+2) the extra constant a0 > b0 is the
    smallest value found by bisection for which A1(beta) > 0 on a log-uniform
    sample of beta above max(a0 rho1, beta0, beta1).
    """
    m, rho1, k = params.m, params.rho1, params.k
    c2 = (1 - m / 2) ** 2
    b0 = max(2 * math.sqrt(2 * (1 - m) / (k * (1 - c2 * c2))), math.sqrt(2) / math.sqrt(k))
    beta0 = beta0_threshold(params)
    beta1 = rho1 / k

    if not _below(params.critical_m, m):
        a0 = b0
    elif _A1_positive_above(params, b0, beta0, beta1):
        a0 = float(np.nextafter(b0, np.inf))
    else:
        lo, hi = b0, 2 * b0
        while not _A1_positive_above(params, hi, beta0, beta1):
            lo, hi = hi, 2 * hi
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _A1_positive_above(params, mid, beta0, beta1):
                hi = mid
            else:
                lo = mid
        a0 = hi
        logger.debug(f"a0 bisected to {a0:.12g} (b0={b0:.12g})")

    return max(a0 * rho1, beta0, beta1)


def classify_beta(params: ParamSet, beta1=None, beta0=None, beta2=None) -> BetaRegime:
    beta = params.beta
    beta1 = params.rho1 / params.k if beta1 is None else beta1
    beta0 = beta0_threshold(params) if beta0 is None else beta0
    beta2 = beta2_lower_bound(params) if beta2 is None else beta2

    gap = params.n * beta - params.alpha
    if abs(gap) <= REL_TOL * max(params.n * beta, params.alpha):
        sign = 0
    else:
        sign = 1 if gap > 0 else -1

    _, _, gamma1, _ = tail_roots(params, beta)

    if beta > beta2 and not _close(beta, beta2):
        name = "second-order"
    elif _below(beta, beta1):
        name = "existence-only"
    elif _below(beta, beta0):
        name = "uniqueness"
    else:
        name = "real-roots"

    return BetaRegime(
        name=name,
        n_beta_minus_alpha=gap,
        sign=sign,
        real_roots=gamma1 is not None,
        at_uniqueness_boundary=_close(beta, beta1),
    )


def derive(params: ParamSet) -> DerivedConstants:
    n, m, rho1, beta = params.n, params.m, params.rho1, params.beta
    k = params.k
    alpha = params.alpha
    beta1 = rho1 / k
    beta0 = beta0_threshold(params)
    beta2 = beta2_lower_bound(params)

    A, disc, gamma1, gamma2 = tail_roots(params, beta)
    complex_roots = gamma1 is None

    if complex_roots:
        M0 = A1 = A2 = None
    else:
        A1 = 1 / (1 - m) - beta * gamma1 / rho1
        A2 = 1 / (1 - m) - beta * gamma2 / rho1
        M0 = None if gamma2 == gamma1 else 2 * m * k / ((1 - m) * (gamma2 - gamma1))

    regime = classify_beta(params, beta1=beta1, beta0=beta0, beta2=beta2)

    return DerivedConstants(
        params=params,
        k=k,
        alpha=alpha,
        beta1=beta1,
        beta0=beta0,
        beta2=beta2,
        A_of_beta=A,
        discriminant=disc,
        complex_roots=complex_roots,
        gamma1=gamma1,
        gamma2=gamma2,
        Cstar=2 * m * k / ((1 - m) * rho1),
        M0=M0,
        A1_beta=A1,
        A2_beta=A2,
        n_beta_minus_alpha=n * beta - alpha,
        regime=regime,
    )
