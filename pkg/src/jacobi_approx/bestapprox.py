"""Best weighted polynomial approximation E_n(f, I) in all four p-regimes,
plus the Bernstein-inequality ratio.

Degree convention follows Pi_n = polynomials of degree <= n-1 throughout, so
`n` always counts coefficients.  Every solver optimizes over a discretized
measure (quadrature mesh, Chebyshev grid) and reports as `error` the weighted
norm of the residual of the returned polynomial computed by independent
adaptive quadrature, so the result is always an achievable value; for
0 < p < 1 it is exactly an upper bound on the (possibly unattained) infimum
and is labeled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.optimize import linprog

from . import quadrature
from .exceptions import PreconditionError, SolverStallError
from .functions import FunctionSpec
from .weights import WeightParams, eval_weight

__all__ = [
    "Polynomial",
    "ApproxResult",
    "best_approx_l2",
    "best_approx_minimax",
    "best_approx_lp",
    "best_approx_quasi",
    "best_approx",
    "local_best_approx",
    "bernstein_ratio",
    "chebyshev_t",
    "l2_error_sequence",
]

FULL = (-1.0, 1.0)

MINIMAX_GRID0 = 513
MINIMAX_GRID_MAX = 66000
MINIMAX_REL = 1e-6
IRLS_MAX_ITER = 200
IRLS_REL = 1e-9
IRLS_FLOOR = 1e-12


@dataclass(frozen=True)
class Polynomial:
    """Chebyshev-basis polynomial on a reference interval [u, v]."""

    coeffs: np.ndarray
    interval: tuple = FULL

    def _map(self, x):
        u, v = self.interval
        return (2.0 * np.asarray(x, dtype=float) - (u + v)) / (v - u)

    def __call__(self, x):
        out = cheb.chebval(self._map(x), self.coeffs)
        return out if np.ndim(x) else float(out)

    def derivative(self, r: int = 1) -> "Polynomial":
        u, v = self.interval
        dc = cheb.chebder(self.coeffs, m=r, scl=2.0 / (v - u))
        if len(dc) == 0:
            dc = np.zeros(1)
        return Polynomial(coeffs=np.asarray(dc, dtype=float), interval=self.interval)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def chebyshev_t(m: int, interval=FULL) -> Polynomial:
    c = np.zeros(m + 1)
    c[m] = 1.0
    return Polynomial(coeffs=c, interval=interval)


@dataclass(frozen=True)
class ApproxResult:
    error: float
    minimizer: Polynomial
    certificate: str  # orthogonal-projection | irls-converged | exchange-converged | heuristic-upper-bound
    iterations: int
    converged: bool = True
    alt_error: float | None = None  # Parseval-tail cross check (p = 2 only)


# ---------------------------------------------------------------------------
# discretization helpers


def _basis_values(x, n, interval, a_exp, b_exp):
    """Values of a well-conditioned degree-(n-1) basis at the mesh points:
    Jacobi-orthonormal for the (a_exp, b_exp) measure on the full interval,
    mapped Chebyshev elsewhere."""
    if interval == FULL:
        alphas, betas = quadrature.jacobi_recurrence(n, a_exp, b_exp)
        B = np.empty((len(x), n))
        B[:, 0] = 1.0 / math.sqrt(betas[0])
        if n > 1:
            B[:, 1] = (x - alphas[0]) * B[:, 0] / math.sqrt(betas[1])
        for j in range(1, n - 1):
            B[:, j + 1] = ((x - alphas[j]) * B[:, j]
                           - math.sqrt(betas[j]) * B[:, j - 1]) / math.sqrt(betas[j + 1])
        return B
    u, v = interval
    s = (2.0 * x - (u + v)) / (v - u)
    return cheb.chebvander(s, n - 1)


def _to_polynomial(coeffs, n, interval, a_exp, b_exp) -> Polynomial:
    """Convert basis coefficients to the Chebyshev representation by exact
    interpolation at n Chebyshev points of the interval."""
    u, v = interval
    if n == 1:
        s = np.zeros(1)
    else:
        s = np.cos(np.pi * np.arange(n) / (n - 1))
    x = 0.5 * (u + v) + 0.5 * (v - u) * s
    vals = _basis_values(x, n, interval, a_exp, b_exp) @ coeffs
    c = cheb.chebfit(s, vals, n - 1) if n > 1 else np.array([vals[0]])
    return Polynomial(coeffs=np.asarray(c, dtype=float), interval=interval)


def _mesh(fn, interval, a_exp, b_exp, breakpoints, n, tol=1e-10):
    """Quadrature mesh for the measure (1-x)^a (1+x)^b dx refined on fn^2,
    with at least enough panels to resolve degree-(n-1) oscillation."""
    u, v = interval
    min_panels = max(24, n)
    _, _, _, panels = quadrature._adaptive(
        fn, u, v, a_exp, b_exp, tol, breakpoints=breakpoints,
        transform_pow=2, min_panels=min_panels,
    )
    return quadrature._mesh_from_panels(panels)


def _as_fn(spec):
    if isinstance(spec, FunctionSpec):
        return (lambda x: spec.derivs(0, x)), spec.singularities
    return spec, ()


# ---------------------------------------------------------------------------
# p = 2: orthogonal projection


def best_approx_l2(spec, n: int, interval=FULL, params: WeightParams = None) -> ApproxResult:
    """Projection onto Pi_n in the inner product with weight
    (1-x)^{2 alpha} (1+x)^{2 beta}; the error is the adaptive residual norm,
    cross-checked against the Parseval tail on the projection mesh."""
    if params is None:
        params = WeightParams(0.0, 0.0, 2.0)
    if params.p != 2:
        raise PreconditionError("best_approx_l2 requires p = 2")
    errs, polys, _ = _l2_solve(spec, [n], interval, params)
    poly = polys[n]
    fn, brk = _as_fn(spec)
    res = quadrature.weighted_lp_norm(
        lambda x: fn(x) - poly(x), interval, params, tol=1e-10, breakpoints=brk)
    return ApproxResult(error=res.value, minimizer=poly,
                        certificate="orthogonal-projection", iterations=1,
                        converged=res.converged, alt_error=errs[n])


def _l2_solve(spec, ns, interval, params):
    """Shared projection: returns ({n: disc tail error}, {n: Polynomial},
    mesh) for every requested n from a single QR factorization."""
    fn, brk = _as_fn(spec)
    a2, b2 = 2.0 * params.alpha, 2.0 * params.beta
    nmax = max(ns)
    x, w = _mesh(fn, interval, a2, b2, brk, nmax)
    sw = np.sqrt(w)
    B = _basis_values(x, nmax, interval, a2, b2)
    A = sw[:, None] * B
    y = sw * fn(x)
    Q, R = np.linalg.qr(A)
    psi = Q.T @ y
    resid = y - Q @ psi
    rest = float(resid @ resid)
    tail_sq = np.concatenate([np.cumsum((psi ** 2)[::-1])[::-1], [0.0]])
    errs, polys = {}, {}
    for n in ns:
        errs[n] = math.sqrt(max(tail_sq[n] + rest, 0.0))
        cn = np.linalg.solve(R[:n, :n], psi[:n]) if n > 0 else np.zeros(0)
        polys[n] = _to_polynomial(cn, n, interval, a2, b2)
    return errs, polys, (x, w)


def l2_error_sequence(spec, ns, interval, params):
    """Discrete Parseval-tail errors for all n in ns from one projection."""
    errs, polys, _ = _l2_solve(spec, list(ns), interval, params)
    return errs, polys


# ---------------------------------------------------------------------------
# p = inf: discrete minimax via the epigraph LP, grid-doubled


def _minimax_grid(u, v, m, special):
    x = quadrature._chebyshev_grid(u, v, m)
    extras = []
    for s in special:
        for j in range(4, 44):
            d = (v - u) * 2.0 ** (-j)
            for cand in (s - d, s + d):
                if u < cand < v:
                    extras.append(cand)
        if u <= s <= v:
            extras.append(s)
    if extras:
        x = np.unique(np.concatenate([x, np.asarray(extras)]))
    return x


MINIMAX_EXCHANGE_MAX = 500


def _lp_on_subset(V, w, f, idx, n):
    """Epigraph LP min e s.t. |w_i (f_i - (Vc)_i)| <= e on the index subset."""
    wk = w[idx]
    wV = wk[:, None] * V[idx]
    ones = np.ones((len(idx), 1))
    A_ub = np.block([[-wV, -ones], [wV, -ones]])
    b_ub = np.concatenate([-wk * f[idx], wk * f[idx]])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        raise SolverStallError(f"minimax LP failed: {res.message}")
    return res.x[:n], float(res.x[-1]), int(res.nit)


def _discrete_minimax(V, w, f, n, work0=None):
    """Dual-exchange solve of the discrete weighted minimax problem on the
    whole grid: small LPs on a growing working set, pulling in the worst
    violators until no grid point exceeds the working optimum.  The working
    set only grows, so the subset optimum is nondecreasing and the loop
    terminates on a finite grid."""
    m = len(f)
    if work0 is None:
        # cos-distributed seed: close to the equioscillation geometry
        theta = np.pi * np.arange(2 * (n + 1) + 9) / (2 * (n + 1) + 8)
        work = np.unique(np.round((m - 1) * 0.5 * (1.0 + np.cos(theta))).astype(int))
    else:
        work = np.unique(np.clip(work0, 0, m - 1))
    nit = 0
    for _ in range(MINIMAX_EXCHANGE_MAX):
        c, e, it = _lp_on_subset(V, w, f, work, n)
        nit += it
        r = np.abs(w * (f - V @ c))
        worst = float(np.max(r))
        active = work[r[work] >= e * (1.0 - 1e-6) - 1e-15]
        # acceptance slack must dominate the LP solver's own tolerance
        if worst <= e * (1.0 + 1e-7) + 1e-11:
            return c, worst, nit, active
        # pull in every violating local maximum of the residual at once
        is_max = np.ones(m, dtype=bool)
        is_max[1:] &= r[1:] >= r[:-1]
        is_max[:-1] &= r[:-1] >= r[1:]
        viol_idx = np.nonzero(is_max & (r > e * (1.0 + 1e-9)))[0]
        if len(viol_idx) > 4 * (n + 1):
            viol_idx = viol_idx[np.argsort(r[viol_idx])[-4 * (n + 1):]]
        grown = np.unique(np.concatenate([work, viol_idx]))
        if len(grown) == len(work):
            return c, worst, nit, active  # every violator already enforced
        work = grown
    raise SolverStallError(
        f"minimax exchange cycling: no convergence in {MINIMAX_EXCHANGE_MAX} rounds")


def _refined_maxima(fn_abs, u, v, base_pts, top):
    """Locations and values of the largest local maxima of fn_abs: pick the
    top brackets on the base grid, then shrink each by vectorized 9-point
    refinement (all brackets advanced in one call per round)."""
    with np.errstate(all="ignore"):
        vals = np.abs(np.asarray(fn_abs(base_pts), dtype=float))
    vals = np.where(np.isfinite(vals), vals, 0.0)
    m = len(base_pts)
    is_max = np.ones(m, dtype=bool)
    is_max[1:] &= vals[1:] >= vals[:-1]
    is_max[:-1] &= vals[:-1] >= vals[1:]
    idx = np.nonzero(is_max)[0]
    if len(idx) > top:
        idx = idx[np.argsort(vals[idx])[-top:]]
    los = base_pts[np.maximum(idx - 1, 0)]
    his = base_pts[np.minimum(idx + 1, m - 1)]
    xs = base_pts[idx].astype(float)
    vs = vals[idx].astype(float)
    for _ in range(10):
        if np.max(his - los) <= 1e-9 * (v - u):
            break
        grid = np.linspace(los, his, 9, axis=0)  # 9 x len(idx)
        with np.errstate(all="ignore"):
            gv = np.abs(np.asarray(fn_abs(grid.ravel()), dtype=float))
        gv = np.where(np.isfinite(gv), gv, 0.0).reshape(grid.shape)
        jbest = np.argmax(gv, axis=0)
        cols = np.arange(grid.shape[1])
        better = gv[jbest, cols] > vs
        vs = np.where(better, gv[jbest, cols], vs)
        xs = np.where(better, grid[jbest, cols], xs)
        los = grid[np.maximum(jbest - 1, 0), cols]
        his = grid[np.minimum(jbest + 1, 8), cols]
    return xs, vs


def best_approx_minimax(spec, n: int, interval=FULL, params: WeightParams = None,
                        start_grid=MINIMAX_GRID0) -> ApproxResult:
    """Weighted discrete minimax: the epigraph linear program is solved by a
    dual-exchange loop on a Chebyshev-distributed grid, and the grid is
    enriched with the refined extremum locations of the weighted residual
    until the optimum is stable to 1e-6 relative."""
    if params is None:
        params = WeightParams(0.0, 0.0, math.inf)
    if not params.is_sup:
        raise PreconditionError("best_approx_minimax requires p = inf")
    u, v = interval
    fn, brk = _as_fn(spec)
    scale_probe = np.abs(fn(np.linspace(u, v, 257)))
    scale = float(np.max(scale_probe)) or 1.0

    xgrid = _minimax_grid(u, v, start_grid, brk)
    base = _minimax_grid(u, v, 2049, brk)
    nit = 0
    coeffs = np.zeros(n)
    stable = False
    prev = None
    work = None
    for _ in range(24):
        wts = np.asarray(eval_weight(params, xgrid))
        keep = wts > 0
        xk, wk = xgrid[keep], wts[keep]
        fk = fn(xk) / scale
        V = _basis_values(xk, n, interval, 0.0, 0.0)
        coeffs, e, it, work_idx = _discrete_minimax(V, wk, fk, n, work0=work)
        nit += it
        poly_now = _to_polynomial(coeffs, n, interval, 0.0, 0.0)

        def resid(z):
            return np.asarray(eval_weight(params, z)) * (fn(z) / scale - poly_now(z))

        xs, vs = _refined_maxima(resid, u, v, base, top=n + 6)
        e_cont = float(np.max(vs)) if len(vs) else e
        if e_cont <= e * (1.0 + 1e-7) + 1e-11:
            stable = True
            break
        if prev is not None and abs(e_cont - prev) <= max(MINIMAX_REL * e_cont, 1e-11):
            stable = True
            break
        prev = e_cont
        xgrid = np.unique(np.concatenate([xgrid, xs]))
        work = None
    if not stable:
        raise SolverStallError(
            "minimax extremum refinement did not stabilize to 1e-6 relative")
    poly = _to_polynomial(coeffs * scale, n, interval, 0.0, 0.0)
    sup = quadrature.weighted_sup_norm(lambda z: fn(z) - poly(z), interval, params,
                                       extra_points=brk)
    return ApproxResult(error=sup.value, minimizer=poly,
                        certificate="exchange-converged", iterations=nit)


# ---------------------------------------------------------------------------
# 1 <= p < inf: iteratively reweighted least squares


def _irls(B, y, base_w, p, floor, max_iter, warm=None):
    """IRLS for min sum base_w |y - B c|^p; returns (c, disc_error,
    iterations, converged).  Backtracks if the discrete error increases."""
    sw = np.sqrt(base_w)
    c = warm
    if c is None:
        c = np.linalg.lstsq(sw[:, None] * B, sw * y, rcond=None)[0]
    r = y - B @ c
    e_prev = float(np.sum(base_w * np.abs(r) ** p)) ** (1.0 / p)
    it = 0
    converged = False
    while it < max_iter:
        it += 1
        om = base_w * np.maximum(np.abs(r), floor) ** (p - 2.0)
        so = np.sqrt(om)
        c_new = np.linalg.lstsq(so[:, None] * B, so * y, rcond=None)[0]
        step = 1.0
        for _ in range(12):
            cand = c + step * (c_new - c)
            r_cand = y - B @ cand
            e_cand = float(np.sum(base_w * np.abs(r_cand) ** p)) ** (1.0 / p)
            if e_cand <= e_prev or step < 1e-3:
                break
            step *= 0.5
        if e_cand > e_prev:
            converged = True  # stalled at a (discrete) minimum
            break
        c, r = cand, r_cand
        if abs(e_cand - e_prev) <= IRLS_REL * max(e_cand, 1e-300):
            e_prev = e_cand
            converged = True
            break
        e_prev = e_cand
    return c, e_prev, it, converged


def minimax_error_sequence(spec, ns, interval=FULL, params: WeightParams = None):
    """E_n for every n in ns at p = inf, sharing one accumulating extremum
    grid across the sequence so consecutive solves warm-start each other.
    Returns ({n: error}, {n: Polynomial})."""
    if params is None:
        params = WeightParams(0.0, 0.0, math.inf)
    if not params.is_sup:
        raise PreconditionError("p = inf required")
    u, v = interval
    fn, brk = _as_fn(spec)
    scale_probe = np.abs(fn(np.linspace(u, v, 257)))
    scale = float(np.max(scale_probe)) or 1.0
    xgrid = _minimax_grid(u, v, MINIMAX_GRID0, brk)
    base = _minimax_grid(u, v, 2049, brk)
    errs, polys = {}, {}
    active_x = None
    for n in sorted(ns):
        stable = False
        prev = None
        for _ in range(24):
            wts = np.asarray(eval_weight(params, xgrid))
            keep = wts > 0
            xk, wk = xgrid[keep], wts[keep]
            fk = fn(xk) / scale
            V = _basis_values(xk, n, interval, 0.0, 0.0)
            work0 = None
            if active_x is not None:
                w0 = np.unique(np.searchsorted(xk, active_x).clip(0, len(xk) - 1))
                if n + 2 <= len(w0) <= 4 * (n + 2):
                    # pad with a coarse spread so the first LP is bounded
                    spread = np.linspace(0, len(xk) - 1, n + 8).astype(int)
                    work0 = np.unique(np.concatenate([w0, spread]))
            c, e, _, active_idx = _discrete_minimax(V, wk, fk, n, work0=work0)
            poly_now = _to_polynomial(c, n, interval, 0.0, 0.0)

            def resid(z):
                return (np.asarray(eval_weight(params, z))
                        * (fn(z) / scale - poly_now(z)))

            xs, vs = _refined_maxima(resid, u, v, base, top=n + 6)
            e_cont = float(np.max(vs)) if len(vs) else e
            active_x = xk[active_idx]
            if e_cont <= e * (1.0 + 1e-7) + 1e-11:
                stable = True
                break
            if prev is not None and abs(e_cont - prev) <= max(
                    MINIMAX_REL * e_cont, 1e-11):
                stable = True
                break
            prev = e_cont
            xgrid = np.unique(np.concatenate([xgrid, xs]))
        if not stable:
            raise SolverStallError(f"minimax sequence stalled at n={n}")
        poly = _to_polynomial(c * scale, n, interval, 0.0, 0.0)
        sup = quadrature.weighted_sup_norm(lambda z: fn(z) - poly(z), interval,
                                           params, extra_points=brk)
        errs[n] = sup.value
        polys[n] = poly
    return errs, polys


def best_approx_lp(spec, n: int, interval=FULL, params: WeightParams = None,
                   warm=None) -> ApproxResult:
    """Weighted L_p best approximation for 1 <= p < inf by IRLS on a
    quadrature mesh; convexity makes the discrete optimum global."""
    if params is None:
        params = WeightParams(0.0, 0.0, 1.0)
    p = params.p
    if not 1.0 <= p < math.inf:
        raise PreconditionError("best_approx_lp requires 1 <= p < inf")
    fn, brk = _as_fn(spec)
    ap, bp = params.alpha * p, params.beta * p
    x, w = _mesh(fn, interval, ap, bp, brk, n)
    B = _basis_values(x, n, interval, ap, bp)
    fv = fn(x)
    scale = float(np.max(np.abs(fv))) or 1.0
    warm_c = None if warm is None else np.asarray(warm, dtype=float) / scale
    c, _, it, conv = _irls(B, fv / scale, w, p, IRLS_FLOOR, IRLS_MAX_ITER,
                           warm=warm_c)
    poly = _to_polynomial(c * scale, n, interval, ap, bp)
    res = quadrature.weighted_lp_norm(lambda z: fn(z) - poly(z), interval,
                                      params, breakpoints=brk)
    return ApproxResult(error=res.value, minimizer=poly,
                        certificate="irls-converged", iterations=it,
                        converged=conv and res.converged)


# ---------------------------------------------------------------------------
# 0 < p < 1: certified upper bound by multi-start descent


def _start_params(params, p_start):
    try:
        return WeightParams(params.alpha, params.beta, p_start)
    except Exception:
        return WeightParams(0.0, 0.0, p_start)


def best_approx_quasi(spec, n: int, interval=FULL, params: WeightParams = None,
                      warm_starts=()) -> ApproxResult:
    """Upper bound on E_n in the L_p quasinorm, 0 < p < 1: damped IRLS with
    exponent p from the p=1 and p=2 minimizers (plus any warm starts); the
    reported error is the adaptive quasinorm of the best candidate."""
    if params is None:
        params = WeightParams(0.0, 0.0, 0.5)
    p = params.p
    if not 0.0 < p < 1.0:
        raise PreconditionError("best_approx_quasi requires 0 < p < 1")
    fn, brk = _as_fn(spec)
    ap, bp = params.alpha * p, params.beta * p
    x, w = _mesh(fn, interval, ap, bp, brk, n)
    B = _basis_values(x, n, interval, ap, bp)
    fv = fn(x)
    scale = float(np.max(np.abs(fv))) or 1.0
    y = fv / scale

    sw = np.sqrt(w)
    starts = [np.linalg.lstsq(sw[:, None] * B, sw * y, rcond=None)[0]]
    l1 = best_approx_lp(spec, n, interval, _start_params(params, 1.0))
    starts.append(_from_polynomial(l1.minimizer, B, x, scale))
    for ws in warm_starts:
        c = np.zeros(B.shape[1])
        ws = np.asarray(ws, dtype=float)
        c[: len(ws)] = ws / scale
        starts.append(c)

    candidates = []
    it_total = 0
    for c0 in starts:
        candidates.append(c0)
        c = c0
        for floor in (1e-3, 1e-5, 1e-7, 1e-9, IRLS_FLOOR):
            c, _, it, _ = _irls(B, y, w, p, floor, 8, warm=c)
            it_total += it
        candidates.append(c)

    best_err, best_poly = math.inf, None
    for c in candidates:
        poly = _to_polynomial(c * scale, n, interval, ap, bp)
        res = quadrature.weighted_lp_norm(lambda z: fn(z) - poly(z), interval,
                                          params, breakpoints=brk)
        if res.value < best_err:
            best_err, best_poly = res.value, poly
    return ApproxResult(error=best_err, minimizer=best_poly,
                        certificate="heuristic-upper-bound",
                        iterations=it_total)


def _from_polynomial(poly, B, x, scale):
    """Least-squares representation of an existing polynomial in the working
    basis (exact up to conditioning: same span)."""
    vals = poly(x) / scale
    return np.linalg.lstsq(B, vals, rcond=None)[0]


# ---------------------------------------------------------------------------
# dispatch, local intervals, Bernstein ratio


def best_approx(spec, n: int, interval=FULL, params: WeightParams = None,
                **kw) -> ApproxResult:
    """Dispatch to the p-appropriate solver."""
    if params is None:
        params = WeightParams(0.0, 0.0, 2.0)
    if params.is_sup:
        return best_approx_minimax(spec, n, interval, params, **kw)
    if params.p == 2.0:
        return best_approx_l2(spec, n, interval, params)
    if params.p >= 1.0:
        return best_approx_lp(spec, n, interval, params, **kw)
    return best_approx_quasi(spec, n, interval, params, **kw)


def local_best_approx(spec, k: int, x0: float, h: float,
                      params: WeightParams) -> ApproxResult:
    """E_k on [x0 - h*phi(x0)/2, x0 + h*phi(x0)/2] with the global weight
    w_{alpha,beta} restricted to the subinterval."""
    px = math.sqrt(max(1.0 - x0 * x0, 0.0))
    half = 0.5 * h * px
    u, v = x0 - half, x0 + half
    if u < -1.0 - 1e-12 or v > 1.0 + 1e-12:
        raise PreconditionError(
            f"local interval [{u}, {v}] leaves [-1, 1]; x0 must lie in Dom_h")
    u, v = max(u, -1.0), min(v, 1.0)
    if v - u < 1e-12:
        raise PreconditionError("degenerate local interval")
    return best_approx(spec, k, (u, v), params)


def bernstein_ratio(poly: Polynomial, r: int, params: WeightParams) -> float:
    """|| w phi^r p^(r) ||_p / (n^r || w p ||_p) with n = len(coeffs)
    (the Pi_n convention); phi^r folds into the Jacobi exponents."""
    if r < 1:
        raise PreconditionError("bernstein_ratio requires r >= 1")
    if not np.any(poly.coeffs):
        raise PreconditionError("zero polynomial")
    n = len(poly.coeffs)
    dp = poly.derivative(r)
    shifted = params.shifted(r)
    if params.is_sup:
        num = quadrature.weighted_sup_norm(dp, poly.interval, shifted).value
        den = quadrature.weighted_sup_norm(poly, poly.interval, params).value
    else:
        num = quadrature.weighted_lp_norm(dp, poly.interval, shifted).value
        den = quadrature.weighted_lp_norm(poly, poly.interval, params).value
    return num / (n ** r * den)
