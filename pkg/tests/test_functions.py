import math

import numpy as np
import pytest

from jacobi_approx import functions as fns
from jacobi_approx.exceptions import DomainError, PreconditionError
from jacobi_approx.weights import WeightParams

P2 = WeightParams(0.0, 0.0, 2.0)
PINF = WeightParams(0.0, 0.0, math.inf)


def test_catalog_contains_required_members():
    names = {s.name for s in fns.corpus_catalog()}
    required = {"abs", "abs_3_2", "x_abs_x", "trunc_pow_0", "trunc_pow_half",
                "endpoint_1_4", "endpoint_3_4", "runge", "sin5x", "exp"}
    required |= {f"mono{m}" for m in range(7)}
    assert required <= names


def test_abs_metadata():
    spec = fns.corpus_by_name("abs")
    assert spec.max_derivative_order == 0
    assert spec.singularities == (0.0,)


def test_x_abs_x_derivative():
    spec = fns.corpus_by_name("x_abs_x")
    assert spec.max_derivative_order == 1
    x = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(spec.derivs(1, x), 2.0 * np.abs(x), atol=1e-15)


def test_runge_is_smooth():
    spec = fns.corpus_by_name("runge")
    assert spec.max_derivative_order >= 4
    assert spec.singularities == ()


class TestEval:
    def test_values(self):
        x2 = fns.corpus_by_name("mono2")
        assert fns.eval(x2, 0, 0.5) == 0.25
        assert fns.eval(x2, 2, 0.3) == 2.0
        assert fns.eval(fns.corpus_by_name("abs"), 0, -0.3) == pytest.approx(0.3)

    def test_order_out_of_range(self):
        with pytest.raises(PreconditionError):
            fns.eval(fns.corpus_by_name("abs"), 1, 0.5)

    def test_singular_point_rejected_for_derivatives(self):
        with pytest.raises(DomainError):
            fns.eval(fns.corpus_by_name("x_abs_x"), 1, 0.0)

    def test_outside_interval(self):
        with pytest.raises(DomainError):
            fns.eval(fns.corpus_by_name("abs"), 0, 1.5)


@pytest.mark.parametrize("spec", fns.corpus_catalog(), ids=lambda s: s.name)
def test_derivative_consistency_by_finite_differences(spec):
    """Order-r values agree with the central difference of order-(r-1)
    values at random interior points away from singularities, to 1e-5
    relative to the derivative's magnitude on the sample."""
    rng = np.random.default_rng(1234)
    rmax = min(spec.max_derivative_order, 3)
    h = 1e-5
    for r in range(1, rmax + 1):
        pts = []
        while len(pts) < 100:
            x = rng.uniform(-0.93, 0.93)
            if all(abs(x - s) > 0.05 for s in spec.singularities):
                pts.append(x)
        x = np.array(pts)
        exact = spec.derivs(r, x)
        approx = (spec.derivs(r - 1, x + h) - spec.derivs(r - 1, x - h)) / (2 * h)
        scale = max(1.0, float(np.max(np.abs(exact))))
        assert np.max(np.abs(exact - approx)) < 1e-5 * scale, (spec.name, r)


class TestCertifyClass:
    def test_polynomial_is_bounded(self):
        assert fns.certify_class(fns.corpus_by_name("mono2"), 2, PINF)

    def test_endpoint_power_sup_norm_unbounded(self):
        # f' ~ (1-x)^{-3/4}; phi f' ~ (1-x)^{-1/4} blows up
        assert not fns.certify_class(fns.corpus_by_name("endpoint_1_4"), 1, PINF)

    def test_endpoint_power_l2_integrable(self):
        # (phi f')^2 ~ (1-x)^{-1/2}: integrable
        assert fns.certify_class(fns.corpus_by_name("endpoint_1_4"), 1, P2)

    def test_divergent_l2_case(self):
        assert not fns.certify_class(fns.corpus_by_name("endpoint_1_4"), 2, P2)

    def test_order_beyond_max_is_false(self):
        assert not fns.certify_class(fns.corpus_by_name("abs"), 1, P2)


def test_derivative_spec_shifts_orders():
    spec = fns.corpus_by_name("runge")
    d1 = fns.derivative_spec(spec, 1)
    x = np.linspace(-0.9, 0.9, 5)
    np.testing.assert_allclose(d1.derivs(0, x), spec.derivs(1, x))
    np.testing.assert_allclose(d1.derivs(2, x), spec.derivs(3, x))
    assert d1.max_derivative_order == spec.max_derivative_order - 1


def test_scaled_and_sum_specs():
    f = fns.corpus_by_name("abs")
    g = fns.corpus_by_name("mono2")
    two_f = fns.scaled_spec(f, 2.0)
    s = fns.sum_spec(f, g)
    x = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(two_f.derivs(0, x), 2 * np.abs(x))
    np.testing.assert_allclose(s.derivs(0, x), np.abs(x) + x * x)
    assert s.singularities == (0.0,)


def test_certified_members_accepted_by_moduli():
    """Every corpus member certified at order r is accepted without error."""
    from jacobi_approx import moduli

    for spec in fns.corpus_catalog():
        for r in range(min(spec.max_derivative_order, 1) + 1):
            if not fns.certify_class(spec, r, P2):
                continue
            q = moduli.ModulusQuery(spec=spec, k=1, r=r, t=0.25, params=P2)
            res = moduli.weighted_modulus(q)
            assert res.value >= 0.0
