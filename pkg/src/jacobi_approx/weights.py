"""Jacobi weights, the hatted (shifted) weight, step domains, and the
change of variable y(x) defined by y + (delta/2)*sqrt(1-y^2) = x.

All evaluators accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DomainError, ParameterError, PreconditionError

__all__ = [
    "WeightParams",
    "HattedWeightParams",
    "DomInterval",
    "phi",
    "eval_weight",
    "eval_hatted_weight",
    "mu",
    "dom_interval",
    "solve_y",
    "y_shifted",
]

# Base factors of the hatted weight in [-1e-14, 0) are rounding debris at
# the domain endpoints and are clamped to zero.
_BASE_CLAMP = -1e-14


def phi(x):
    """sqrt(1 - x^2), with tiny negative radicands clipped to 0."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(1.0 - x * x, 0.0, None))


@dataclass(frozen=True)
class WeightParams:
    """Exponents (alpha, beta) of the weight (1-x)^alpha (1+x)^beta and the
    integrability index p.  Membership in J_p is enforced at construction:
    alpha, beta > -1/p for finite p, and alpha, beta >= 0 for p = inf.
    """

    alpha: float
    beta: float
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterError(f"p must be positive, got {self.p}")
        if math.isinf(self.p):
            if self.alpha < 0 or self.beta < 0:
                raise ParameterError(
                    f"J_p violation: p=inf requires alpha,beta >= 0, "
                    f"got alpha={self.alpha}, beta={self.beta}"
                )
        else:
            bound = -1.0 / self.p
            if self.alpha <= bound or self.beta <= bound:
                raise ParameterError(
                    f"J_p violation: p={self.p} requires alpha,beta > {bound}, "
                    f"got alpha={self.alpha}, beta={self.beta}"
                )

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.p)

    def shifted(self, r: float) -> "WeightParams":
        """Params with alpha,beta increased by r/2; absorbs a phi^r factor,
        since w_{a,b}(x) * phi(x)^r = w_{a+r/2, b+r/2}(x)."""
        return WeightParams(self.alpha + r / 2.0, self.beta + r / 2.0, self.p)


@dataclass(frozen=True)
class HattedWeightParams:
    """Exponents (xi, zeta) and step delta of the shifted weight
    (1 - x - delta*phi(x)/2)^xi * (1 + x - delta*phi(x)/2)^zeta."""

    xi: float
    zeta: float
    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta <= 2.0:
            raise ParameterError(f"delta must lie in [0, 2], got {self.delta}")


@dataclass(frozen=True)
class DomInterval:
    """The interval [-1+mu(delta), 1-mu(delta)] on which the step-delta
    stencil stays inside [-1, 1]; empty when delta > 2."""

    lo: float
    hi: float
    empty: bool = False

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.hi - self.lo

    def contains(self, x, slack: float = 0.0) -> bool:
        if self.empty:
            return False
        return bool(np.all((x >= self.lo - slack) & (x <= self.hi + slack)))


def _powered_factor(base, exponent):
    """base**exponent with the 0**0 == 1 convention and a domain error on a
    zero base with negative exponent."""
    base = np.asarray(base, dtype=float)
    if exponent == 0:
        return np.ones_like(base)
    if exponent < 0 and np.any(base == 0.0):
        raise DomainError("zero base factor raised to a negative exponent")
    return np.power(base, exponent)


def eval_weight(params: WeightParams, x):
    """The Jacobi weight (1-x)^alpha (1+x)^beta.

    Endpoints are admitted only when the corresponding exponent is >= 0.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -1.0) or np.any(x > 1.0):
        raise DomainError("weight evaluation outside [-1, 1]")
    out = _powered_factor(1.0 - x, params.alpha) * _powered_factor(1.0 + x, params.beta)
    return out if out.ndim else float(out)


def eval_hatted_weight(params: HattedWeightParams, x):
    """The hatted weight (1-x-d*phi(x)/2)^xi (1+x-d*phi(x)/2)^zeta.

    Defined where both base factors are nonnegative (all of Dom_delta);
    base factors in [-1e-14, 0) are clamped to 0.
    """
    xa = np.asarray(x, dtype=float)
    x1 = np.atleast_1d(xa)
    shift = 0.5 * params.delta * phi(x1)
    b1 = 1.0 - x1 - shift
    b2 = 1.0 + x1 - shift
    for b in (b1, b2):
        if np.any(b < 0.0):
            if np.min(b) < _BASE_CLAMP:
                raise DomainError(
                    "hatted weight base factor negative: x outside Dom_delta"
                )
            b[b < 0.0] = 0.0
    out = _powered_factor(b1, params.xi) * _powered_factor(b2, params.zeta)
    return out if xa.ndim else float(out[0])


def mu(delta):
    """mu(delta) = 2*delta^2 / (4 + delta^2); the Dom_delta endpoint offset."""
    delta = np.asarray(delta, dtype=float)
    if np.any(delta < 0):
        raise PreconditionError("mu requires delta >= 0")
    out = 2.0 * delta * delta / (4.0 + delta * delta)
    return out if out.ndim else float(out)


def dom_interval(delta: float) -> DomInterval:
    """Dom_delta = [-1+mu(delta), 1-mu(delta)], empty when delta > 2."""
    if delta <= 0:
        raise PreconditionError("dom_interval requires delta > 0")
    if delta > 2.0:
        return DomInterval(lo=1.0, hi=-1.0, empty=True)
    m = mu(delta)
    return DomInterval(lo=-1.0 + m, hi=1.0 - m, empty=False)


_RESIDUAL_TOL = 1e-12


def solve_y(x, delta: float):
    """The unique y with y + (delta/2)*phi(y) = x and x - y >= 0.

    Closed form: with c = delta/2, y = (x - c*sqrt(1 + c^2 - x^2)) / (1 + c^2)
    (the quadratic root on the x - y >= 0 branch).  1-y and 1+y are carried
    in cancellation-free form so the defining-equation residual stays at
    roundoff level near the endpoints, where phi amplifies error in y.
    """
    if not 0.0 < delta <= 2.0:
        raise PreconditionError(f"solve_y requires 0 < delta <= 2, got {delta}")
    xin = np.asarray(x, dtype=float)
    if np.any(np.abs(xin) > 1.0 + 1e-15):
        raise PreconditionError("solve_y requires x in [-1, 1]")
    xa = np.atleast_1d(np.clip(xin, -1.0, 1.0))
    c = 0.5 * delta
    c2 = 1.0 + c * c
    s = np.sqrt(c2 - xa * xa)
    one_minus = (c2 - xa + c * s) / c2  # every term positive
    # s + c*x cancels for x < 0; use (s^2 - c^2 x^2)/(s + c|x|) there
    s_plus_cx = np.where(
        xa >= 0.0, s + c * xa,
        (1.0 - xa * xa) * c2 / (s + c * np.abs(xa)),
    )
    one_plus = (1.0 + xa) * s_plus_cx / ((c + s) * c2)
    y = np.where(xa >= 0.0, 1.0 - one_minus, one_plus - 1.0)
    resid = np.abs(y + c * np.sqrt(one_minus * one_plus) - xa)
    if np.max(resid) > _RESIDUAL_TOL:
        raise ConvergenceError(
            f"solve_y residual {float(np.max(resid)):.3e} exceeds {_RESIDUAL_TOL:.0e}"
        )
    return y if xin.ndim else float(y[0])


def y_shifted(x, delta: float, lam: float):
    """y_lambda(x) = y(x) + lambda*phi(y(x)) for |lambda| <= delta/2 and
    x in [-1+2*mu(delta), 1]."""
    if abs(lam) > 0.5 * delta + 1e-15:
        raise PreconditionError(
            f"y_shifted requires |lambda| <= delta/2, got lambda={lam}, delta={delta}"
        )
    lo = -1.0 + 2.0 * mu(delta)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < lo - 1e-12) or np.any(xa > 1.0 + 1e-15):
        raise PreconditionError(
            f"y_shifted requires x in [{lo}, 1] for delta={delta}"
        )
    y = np.asarray(solve_y(xa, delta))
    out = y + lam * phi(y)
    return out if out.ndim else float(out)
