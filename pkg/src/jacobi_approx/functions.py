"""Test-function corpus: exact evaluators, analytic derivatives, and
smoothness metadata.

Derivatives are closed-form (no automatic differentiation) so that behavior
near endpoint singularities is exact.  `eval` enforces the public contract
(order range, singular points); the raw vectorized evaluators used by the
numerical machinery compute the a.e. formula everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .exceptions import DomainError, PreconditionError
from .weights import WeightParams

__all__ = ["FunctionSpec", "eval", "corpus_catalog", "corpus_by_name",
           "derivative_spec", "scaled_spec", "sum_spec", "certify_class"]


@dataclass(frozen=True)
class FunctionSpec:
    """A corpus member: name, derivative evaluators up to max_derivative_order,
    singular points, and an optional anticipated decay rate (report metadata
    only; never gates an assertion)."""

    name: str
    max_derivative_order: int
    derivs: object  # callable (r, ndarray) -> ndarray, the a.e. formula
    singularities: tuple = ()
    expected_decay: float | None = None

    def __call__(self, x, r: int = 0):
        return self.derivs(r, np.asarray(x, dtype=float))


def eval(spec: FunctionSpec, r: int, x):
    """f^(r)(x) with the public preconditions enforced."""
    if r < 0 or r > spec.max_derivative_order:
        raise PreconditionError(
            f"{spec.name}: derivative order {r} exceeds "
            f"max_derivative_order={spec.max_derivative_order}"
        )
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise DomainError(f"{spec.name}: evaluation outside [-1, 1]")
    if r >= 1 and spec.singularities:
        for s in spec.singularities:
            if np.any(xa == s):
                raise DomainError(
                    f"{spec.name}: derivative of order {r} at singular point {s}"
                )
    out = spec.derivs(r, xa)
    return out if np.ndim(x) else float(out)


def _falling(gamma: float, r: int) -> float:
    out = 1.0
    for i in range(r):
        out *= gamma - i
    return out


def _monomial(m: int) -> FunctionSpec:
    def d(r, x):
        if r > m:
            return np.zeros_like(x)
        return _falling(m, r) * x ** (m - r)

    return FunctionSpec(name=f"mono{m}", max_derivative_order=8, derivs=d)


def _abs() -> FunctionSpec:
    def d(r, x):
        if r == 0:
            return np.abs(x)
        raise PreconditionError("abs has max_derivative_order 0")

    return FunctionSpec(name="abs", max_derivative_order=0, derivs=d,
                        singularities=(0.0,), expected_decay=1.0)


def _abs_pow_3_2() -> FunctionSpec:
    # |x|^{3/2}: f' = 1.5*sign(x)*|x|^{1/2} is continuous; f'' blows up at 0.
    def d(r, x):
        a = np.abs(x)
        if r == 0:
            return a ** 1.5
        if r == 1:
            return 1.5 * np.sign(x) * np.sqrt(a)
        raise PreconditionError("abs_3_2 has max_derivative_order 1")

    return FunctionSpec(name="abs_3_2", max_derivative_order=1, derivs=d,
                        singularities=(0.0,), expected_decay=1.5)


def _x_abs_x() -> FunctionSpec:
    def d(r, x):
        if r == 0:
            return x * np.abs(x)
        if r == 1:
            return 2.0 * np.abs(x)
        raise PreconditionError("x_abs_x has max_derivative_order 1")

    return FunctionSpec(name="x_abs_x", max_derivative_order=1, derivs=d,
                        singularities=(0.0,), expected_decay=2.0)


def _trunc_pow(a: float, m: int, name: str) -> FunctionSpec:
    # (x-a)_+^m; the m-th derivative is the jump m! * 1_{x>a}.
    def d(r, x):
        if r > m:
            return np.zeros_like(x)
        pos = np.clip(x - a, 0.0, None)
        if r == m:
            return _falling(m, m) * (x > a).astype(float)
        return _falling(m, r) * pos ** (m - r)

    return FunctionSpec(name=name, max_derivative_order=m, derivs=d,
                        singularities=(a,), expected_decay=float(m))


def _endpoint_pow(gamma: float, name: str, decay: float) -> FunctionSpec:
    # (1-x)^gamma; all derivatives of order >= 1 are singular at x = 1.
    def d(r, x):
        return _falling(gamma, r) * (-1.0) ** r * (1.0 - x) ** (gamma - r)

    return FunctionSpec(name=name, max_derivative_order=4, derivs=d,
                        singularities=(1.0,), expected_decay=decay)


def _runge() -> FunctionSpec:
    # 1/(1+25x^2); derivatives via the exact rational recurrence
    # f^(r) = P_r / u^{r+1},  P_{r+1} = P_r' u - (r+1) P_r u',  u = 1+25x^2.
    u = np.array([1.0, 0.0, 25.0])
    du = npoly.polyder(u)
    ps = [np.array([1.0])]
    for r in range(8):
        pr = ps[-1]
        ps.append(npoly.polysub(npoly.polymul(npoly.polyder(pr), u),
                                (r + 1) * npoly.polymul(pr, du)))

    def d(r, x):
        return npoly.polyval(x, ps[r]) / npoly.polyval(x, u) ** (r + 1)

    return FunctionSpec(name="runge", max_derivative_order=6, derivs=d,
                        expected_decay=None)


def _sin5x() -> FunctionSpec:
    def d(r, x):
        return 5.0 ** r * np.sin(5.0 * x + r * np.pi / 2.0)

    return FunctionSpec(name="sin5x", max_derivative_order=8, derivs=d)


def _exp() -> FunctionSpec:
    def d(r, x):
        return np.exp(x)

    return FunctionSpec(name="exp", max_derivative_order=8, derivs=d)


def corpus_catalog() -> list[FunctionSpec]:
    """All corpus members, addressable by name."""
    cat = [_monomial(m) for m in range(7)]
    cat += [
        _abs(),
        _abs_pow_3_2(),
        _x_abs_x(),
        _trunc_pow(0.0, 2, "trunc_pow_0"),
        _trunc_pow(0.5, 2, "trunc_pow_half"),
        _endpoint_pow(0.25, "endpoint_1_4", 0.5),
        _endpoint_pow(0.75, "endpoint_3_4", 1.5),
        _runge(),
        _sin5x(),
        _exp(),
    ]
    return cat


def corpus_by_name(name: str) -> FunctionSpec:
    for spec in corpus_catalog():
        if spec.name == name:
            return spec
    raise KeyError(f"no corpus member named {name!r}")


def derivative_spec(spec: FunctionSpec, r: int) -> FunctionSpec:
    """The spec describing f^(r) as a function in its own right."""
    if r == 0:
        return spec
    if r > spec.max_derivative_order:
        raise PreconditionError(
            f"{spec.name}: cannot take derivative spec of order {r}"
        )

    def d(s, x):
        return spec.derivs(r + s, x)

    return FunctionSpec(name=f"{spec.name}_d{r}",
                        max_derivative_order=spec.max_derivative_order - r,
                        derivs=d, singularities=spec.singularities)


def scaled_spec(spec: FunctionSpec, lam: float) -> FunctionSpec:
    def d(r, x):
        return lam * spec.derivs(r, x)

    return FunctionSpec(name=f"{lam}*{spec.name}",
                        max_derivative_order=spec.max_derivative_order,
                        derivs=d, singularities=spec.singularities)


def sum_spec(f: FunctionSpec, g: FunctionSpec) -> FunctionSpec:
    def d(r, x):
        return f.derivs(r, x) + g.derivs(r, x)

    return FunctionSpec(
        name=f"{f.name}+{g.name}",
        max_derivative_order=min(f.max_derivative_order, g.max_derivative_order),
        derivs=d,
        singularities=tuple(sorted(set(f.singularities) | set(g.singularities))),
    )


_CERTIFY_CACHE: dict = {}


def certify_class(spec: FunctionSpec, r: int, params: WeightParams,
                  tol: float = 1e-6) -> bool:
    """True iff ||w_{alpha,beta} phi^r f^(r)||_p is finite under the
    quadrature budget, i.e. the pair (spec, r) is usable for the weighted
    moduli of order r under these params."""
    from . import quadrature  # deferred: quadrature imports WeightParams

    if r > spec.max_derivative_order:
        return False
    key = (id(spec), r, params, tol)
    hit = _CERTIFY_CACHE.get(key)
    if hit is not None and hit[0] is spec:
        return hit[1]
    out = _certify_uncached(spec, r, params, tol)
    _CERTIFY_CACHE[key] = (spec, out)
    return out


def _certify_uncached(spec, r, params, tol):
    from . import quadrature
    shifted = params.shifted(r)  # phi^r folds into the Jacobi exponents
    g = lambda x: spec.derivs(r, x)
    if params.is_sup:
        return _bounded_sup(spec, r, g, shifted)
    res = quadrature.weighted_lp_norm(
        g, (-1.0, 1.0), shifted, tol=tol,
        breakpoints=spec.singularities,
    )
    return bool(res.converged and math.isfinite(res.value))


def _bounded_sup(spec, r, g, shifted) -> bool:
    """Detect unboundedness of w*|f^(r)| by probing toward each singular
    point and endpoint at geometrically shrinking distances: a bounded
    weighted function settles, an algebraic blow-up keeps growing."""
    interior = np.linspace(-1.0, 1.0, 513)[1:-1]
    with np.errstate(all="ignore"):
        base_vals = _shifted_weight(shifted, interior) * np.abs(g(interior))
    if not np.all(np.isfinite(base_vals)):
        return False
    targets = set(spec.singularities) | {-1.0, 1.0}
    for s in targets:
        dists = 10.0 ** -np.arange(3.0, 13.0)
        for sgn in (-1.0, 1.0):
            pts = s + sgn * dists
            pts = pts[(np.abs(pts) < 1.0) & (pts != s)]
            if pts.size == 0:
                continue
            with np.errstate(all="ignore"):
                vals = _shifted_weight(shifted, pts) * np.abs(g(pts))
            if not np.all(np.isfinite(vals)):
                return False
            # orders-of-magnitude growth as the probe closes in => unbounded
            if vals[-1] > 50.0 * max(vals[0], 1e-300):
                return False
    return True


def _shifted_weight(params: WeightParams, x):
    from .weights import eval_weight

    return np.asarray(eval_weight(params, x))
