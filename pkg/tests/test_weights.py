import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_approx.exceptions import DomainError, ParameterError, PreconditionError
from jacobi_approx.weights import (DomInterval, HattedWeightParams, WeightParams,
                                   dom_interval, eval_hatted_weight, eval_weight,
                                   mu, phi, solve_y, y_shifted)

DELTAS = (0.1, 0.5, 1.0, 2.0)


class TestWeightParams:
    def test_finite_p_admits_negative_exponents(self):
        WeightParams(-0.4, -0.4, 2.0)  # > -1/2

    @pytest.mark.parametrize("alpha,beta,p", [
        (-0.5, 0.0, 2.0),       # alpha = -1/p exactly
        (-3.0, 0.0, 0.5),       # alpha <= -1/p
        (-0.1, 0.0, math.inf),  # p=inf needs alpha >= 0
        (0.0, -2.1, 0.5),
    ])
    def test_outside_jp_rejected(self, alpha, beta, p):
        with pytest.raises(ParameterError):
            WeightParams(alpha, beta, p)

    def test_p_must_be_positive(self):
        with pytest.raises(ParameterError):
            WeightParams(0.0, 0.0, 0.0)


class TestEvalWeight:
    def test_zero_exponents(self):
        assert eval_weight(WeightParams(0.0, 0.0, 2.0), 0.37) == 1.0

    def test_simple_product(self):
        assert eval_weight(WeightParams(1.0, 1.0, 2.0), 0.5) == pytest.approx(0.75, abs=1e-15)

    def test_unit_at_zero(self):
        assert eval_weight(WeightParams(1.0, 0.5, 2.0), 0.0) == 1.0

    def test_endpoint_with_negative_exponent_rejected(self):
        with pytest.raises(DomainError):
            eval_weight(WeightParams(-0.4, 0.0, 2.0), 1.0)

    def test_endpoint_with_positive_exponent_ok(self):
        assert eval_weight(WeightParams(0.5, 0.0, 2.0), 1.0) == 0.0


class TestHattedWeight:
    def test_delta_zero_reduces_to_plain_weight(self):
        par = HattedWeightParams(1.0, 0.0, 0.0)
        x = np.linspace(-1, 1, 7)
        np.testing.assert_allclose(eval_hatted_weight(par, x), 1.0 - x, atol=1e-15)

    def test_center_value(self):
        # phi(0)=1, both bases (1 - 1/2)
        assert eval_hatted_weight(HattedWeightParams(1.0, 1.0, 1.0), 0.0) == pytest.approx(0.25)

    def test_zero_exponents(self):
        assert eval_hatted_weight(HattedWeightParams(0.0, 0.0, 1.5), 0.1) == 1.0

    def test_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            eval_hatted_weight(HattedWeightParams(1.0, 1.0, 2.0), 0.9)

    def test_delta_range_enforced(self):
        with pytest.raises(ParameterError):
            HattedWeightParams(1.0, 1.0, 2.5)


class TestMuAndDom:
    def test_mu_values(self):
        assert mu(0.0) == 0.0
        assert mu(2.0) == pytest.approx(1.0, abs=1e-15)
        assert mu(math.sqrt(2.0)) == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_dom_unit(self):
        d = dom_interval(1.0)
        assert (d.lo, d.hi, d.empty) == (pytest.approx(-0.6), pytest.approx(0.6), False)

    def test_dom_degenerate(self):
        d = dom_interval(2.0)
        assert d.lo == pytest.approx(0.0, abs=1e-15)
        assert d.hi == pytest.approx(0.0, abs=1e-15)

    def test_dom_empty_above_two(self):
        assert dom_interval(3.0).empty

    @given(st.floats(min_value=1e-3, max_value=2.0),
           st.floats(min_value=1e-3, max_value=2.0))
    def test_dom_nesting(self, d1, d2):
        lo, hi = sorted((d1, d2))
        inner, outer = dom_interval(hi), dom_interval(lo)
        assert outer.lo <= inner.lo and inner.hi <= outer.hi


class TestSolveY:
    def test_right_endpoint_maps_to_dom_edge(self):
        for d in DELTAS:
            assert solve_y(1.0, d) == pytest.approx(1.0 - mu(d), abs=1e-12)

    def test_small_delta_is_identity(self):
        x = np.linspace(-1, 1, 21)
        np.testing.assert_allclose(solve_y(x, 1e-8), x, atol=1e-7)

    def test_analytic_point(self):
        # y = -phi(y) gives y^2 = 1 - y^2
        assert solve_y(0.0, 2.0) == pytest.approx(-math.sqrt(2.0) / 2.0, abs=1e-12)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_defining_equation_residual(self, delta):
        x = np.linspace(-1.0, 1.0, 1000)
        y = solve_y(x, delta)
        resid = np.abs(y + 0.5 * delta * phi(y) - x)
        assert np.max(resid) <= 1e-12

    @given(st.floats(min_value=-1.0, max_value=1.0),
           st.floats(min_value=1e-6, max_value=2.0))
    def test_branch_has_nonnegative_gap(self, x, delta):
        y = solve_y(x, delta)
        assert x - y >= -1e-15

    @pytest.mark.parametrize("delta", DELTAS)
    def test_strictly_increasing_with_slope_at_most_two(self, delta):
        x = np.linspace(-1.0, 1.0, 1000)
        y = solve_y(x, delta)
        assert np.all(np.diff(y) > 0)
        e = 1e-6
        xs = np.linspace(-1.0 + e, 1.0 - e, 1000)
        slope = (solve_y(xs + e, delta) - solve_y(xs - e, delta)) / (2 * e)
        assert np.all(slope > 0.0)
        assert np.all(slope <= 2.0 + 1e-6)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_lower_slope_bound_on_upper_range(self, delta):
        e = 1e-6
        lo = -1.0 + 2.0 * mu(delta)
        if 1.0 - lo <= 4 * e:  # delta = 2: the range degenerates to {1}
            return
        xs = np.linspace(lo + e, 1.0 - e, 500)
        slope = (solve_y(xs + e, delta) - solve_y(xs - e, delta)) / (2 * e)
        assert np.all(slope >= 2.0 / 3.0 - 1e-6)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_maps_upper_range_onto_dom(self, delta):
        m = mu(delta)
        assert solve_y(-1.0 + 2.0 * m, delta) == pytest.approx(-1.0 + m, abs=1e-12)
        assert solve_y(1.0, delta) == pytest.approx(1.0 - m, abs=1e-12)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_distance_bounds(self, delta):
        m = mu(delta)
        x = np.linspace(-1.0 + 2.0 * m, 1.0, 400)
        y = solve_y(x, delta)
        slack = 1e-10
        assert np.all(m + 2.0 * (1.0 - x) / 3.0 <= 1.0 - y + slack)
        assert np.all(1.0 - y <= m + 2.0 * (1.0 - x) + slack)
        assert np.all((1.0 + x) / 2.0 <= 1.0 + y + slack)
        assert np.all(1.0 + y <= 1.0 + x + slack)


class TestYShifted:
    def test_zero_shift(self):
        assert y_shifted(0.3, 1.0, 0.0) == solve_y(0.3, 1.0)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_defining_equation_at_one(self, delta):
        assert y_shifted(1.0, delta, delta / 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_full_negative_shift_at_one(self):
        # y(1) = 0 at delta = 2, so the shift -1 * phi(0) lands at -1
        assert y_shifted(1.0, 2.0, -1.0) == pytest.approx(-1.0, abs=1e-12)

    def test_shift_bound_enforced(self):
        with pytest.raises(PreconditionError):
            y_shifted(0.5, 1.0, 0.6)

    def test_domain_enforced(self):
        with pytest.raises(PreconditionError):
            y_shifted(-0.99, 2.0, 0.5)  # x below -1+2*mu(2) = 1

    @pytest.mark.parametrize("delta", DELTAS)
    @pytest.mark.parametrize("frac", (-1.0, -0.5, 0.5, 1.0))
    def test_shifted_slope_bounds(self, delta, frac):
        lam = frac * delta / 2.0
        e = 1e-6
        lo = -1.0 + 2.0 * mu(delta)
        if 1.0 - lo <= 4 * e:  # delta = 2: the range degenerates to {1}
            return
        xs = np.linspace(lo + e, 1.0 - e, 400)
        slope = (y_shifted(xs + e, delta, lam) - y_shifted(xs - e, delta, lam)) / (2 * e)
        assert np.all(slope >= 1.0 / 3.0 - 1e-6)
        assert np.all(slope <= 3.0 + 1e-6)


def test_dom_interval_contains():
    d = dom_interval(1.0)
    assert d.contains(0.0)
    assert not d.contains(0.9)
    assert not DomInterval(1.0, -1.0, empty=True).contains(0.0)
