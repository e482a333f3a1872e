import math

import numpy as np
import pytest
from scipy.special import roots_jacobi

from jacobi_approx import quadrature as quad
from jacobi_approx.exceptions import PreconditionError
from jacobi_approx.weights import WeightParams

EXPONENT_SETS = [(0.0, 0.0), (-0.5, -0.5), (1.0, 0.0), (2.5, 0.3)]


class TestGaussJacobiRule:
    def test_one_point_legendre(self):
        rule = quad.gauss_jacobi_rule(1, 0.0, 0.0)
        np.testing.assert_allclose(rule.nodes, [0.0], atol=1e-15)
        np.testing.assert_allclose(rule.weights, [2.0], rtol=1e-15)

    def test_two_point_legendre(self):
        rule = quad.gauss_jacobi_rule(2, 0.0, 0.0)
        np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)],
                                   rtol=1e-14)
        np.testing.assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-14)
        # exact on 1, x, x^2, x^3
        for m, exact in ((0, 2.0), (1, 0.0), (2, 2 / 3), (3, 0.0)):
            got = float(np.sum(rule.weights * rule.nodes ** m))
            assert got == pytest.approx(exact, abs=1e-15)

    def test_total_weight_is_moment(self):
        rule = quad.gauss_jacobi_rule(1, 1.0, 0.0)
        assert float(np.sum(rule.weights)) == pytest.approx(2.0, rel=1e-15)

    @pytest.mark.parametrize("a,b", EXPONENT_SETS)
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
    def test_moment_exactness_against_scipy(self, n, a, b):
        """x^m-moment match with scipy's independently computed rule for
        every m <= 2n-1 (both rules are exact there)."""
        rule = quad.gauss_jacobi_rule(n, a, b)
        ox, ow = roots_jacobi(n, a, b)
        for m in range(2 * n):
            mine = float(np.sum(rule.weights * rule.nodes ** m))
            oracle = float(np.sum(ow * ox ** m))
            assert mine == pytest.approx(oracle, rel=1e-12, abs=1e-13)

    def test_nodes_sorted_and_sized(self):
        rule = quad.gauss_jacobi_rule(17, 0.3, -0.2)
        assert len(rule.nodes) == len(rule.weights) == 17
        assert np.all(np.diff(rule.nodes) > 0)
        assert np.all(rule.weights > 0)
        assert np.all(np.abs(rule.nodes) < 1)

    def test_cache_returns_identical_rule(self):
        assert quad.gauss_jacobi_rule(9, 0.5, 0.25) is quad.gauss_jacobi_rule(9, 0.5, 0.25)


class TestIntegrateWeighted:
    def test_plain_constant(self):
        res = quad.integrate_weighted(lambda x: np.ones_like(x), (-1, 1), 0.0, 0.0)
        assert res.converged and res.value == pytest.approx(2.0, rel=1e-12)

    def test_polynomial(self):
        res = quad.integrate_weighted(lambda x: 1 - x ** 2, (-1, 1), 0.0, 0.0)
        assert res.value == pytest.approx(4.0 / 3.0, rel=1e-12)

    def test_arcsine_moment(self):
        res = quad.integrate_weighted(lambda x: np.ones_like(x), (-1, 1), -0.5, -0.5,
                                      tol=1e-11)
        assert res.converged
        assert res.value == pytest.approx(math.pi, abs=1e-10)

    def test_subinterval(self):
        res = quad.integrate_weighted(lambda x: x, (0.0, 1.0), 0.0, 0.0)
        assert res.value == pytest.approx(0.5, rel=1e-12)

    def test_endpoint_singularity_on_subinterval(self):
        # int_0^1 (1-x)^{-1/2} dx = 2
        res = quad.integrate_weighted(lambda x: np.ones_like(x), (0.0, 1.0), -0.5, 0.0)
        assert res.value == pytest.approx(2.0, rel=1e-9)


class TestWeightedLpNorm:
    def test_constant_l2(self):
        res = quad.weighted_lp_norm(lambda x: np.ones_like(x), (-1, 1),
                                    WeightParams(0, 0, 2.0))
        assert res.value == pytest.approx(math.sqrt(2.0), rel=1e-10)

    def test_identity_l2(self):
        res = quad.weighted_lp_norm(lambda x: x, (-1, 1), WeightParams(0, 0, 2.0))
        assert res.value == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-10)

    def test_weighted_l1(self):
        res = quad.weighted_lp_norm(lambda x: np.ones_like(x), (-1, 1),
                                    WeightParams(1.0, 0.0, 1.0))
        assert res.value == pytest.approx(2.0, rel=1e-10)

    def test_requires_finite_p(self):
        with pytest.raises(PreconditionError):
            quad.weighted_lp_norm(lambda x: x, (-1, 1), WeightParams(0, 0, math.inf))

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
    def test_homogeneity(self, p):
        par = WeightParams(0.25, 0.0, p)
        g = lambda x: np.sin(3 * x) + 0.2
        base = quad.weighted_lp_norm(g, (-1, 1), par).value
        doubled = quad.weighted_lp_norm(lambda x: 2.0 * g(x), (-1, 1), par).value
        assert doubled == pytest.approx(2.0 * base, rel=1e-12)

    def test_sup_homogeneity(self):
        par = WeightParams(0.25, 0.0, math.inf)
        g = lambda x: np.sin(3 * x) + 0.2
        base = quad.weighted_sup_norm(g, (-1, 1), par).value
        doubled = quad.weighted_sup_norm(lambda x: 2.0 * g(x), (-1, 1), par).value
        assert doubled == pytest.approx(2.0 * base, rel=1e-12)

    @pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
    def test_triangle_inequality(self, p):
        rng = np.random.default_rng(7)
        par = WeightParams(0.0, 0.5, p)
        for _ in range(5):
            cf = rng.standard_normal(4)
            cg = rng.standard_normal(4)
            f = lambda x: np.polyval(cf, x)
            g = lambda x: np.polyval(cg, x)
            s = quad.weighted_lp_norm(lambda x: f(x) + g(x), (-1, 1), par).value
            assert s <= (quad.weighted_lp_norm(f, (-1, 1), par).value
                         + quad.weighted_lp_norm(g, (-1, 1), par).value + 1e-10)

    @pytest.mark.parametrize("p", [0.4, 0.7])
    def test_p_power_triangle_inequality(self, p):
        rng = np.random.default_rng(11)
        par = WeightParams(0.0, 0.0, p)
        for _ in range(5):
            cf = rng.standard_normal(3)
            cg = rng.standard_normal(3)
            f = lambda x: np.polyval(cf, x)
            g = lambda x: np.polyval(cg, x)
            s = quad.weighted_lp_norm(lambda x: f(x) + g(x), (-1, 1), par).value
            nf = quad.weighted_lp_norm(f, (-1, 1), par).value
            ng = quad.weighted_lp_norm(g, (-1, 1), par).value
            assert s ** p <= nf ** p + ng ** p + 1e-10

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
    def test_interval_additivity(self, p):
        par = WeightParams(0.5, 0.25, p)
        g = lambda x: np.cos(2 * x) + 1.5
        full = quad.weighted_lp_norm(g, (-1, 1), par).value
        left = quad.weighted_lp_norm(g, (-1, 0.3), par).value
        right = quad.weighted_lp_norm(g, (0.3, 1), par).value
        assert full ** p == pytest.approx(left ** p + right ** p, rel=1e-8)

    def test_converged_implies_estimate_below_tol(self):
        res = quad.weighted_lp_norm(lambda x: np.abs(x) ** 0.3, (-1, 1),
                                    WeightParams(0, 0, 2.0), tol=1e-8,
                                    breakpoints=(0.0,))
        assert res.converged
        assert res.est_rel_error <= 1e-8


class TestWeightedSupNorm:
    def test_identity(self):
        res = quad.weighted_sup_norm(lambda x: x, (-1, 1), WeightParams(0, 0, math.inf))
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_constant(self):
        res = quad.weighted_sup_norm(lambda x: -3.0 * np.ones_like(np.asarray(x)),
                                     (-0.5, 0.25), WeightParams(0, 0, math.inf))
        assert res.value == pytest.approx(3.0, abs=1e-12)

    def test_weight_maximum_interior(self):
        # (1-x)(1+x) = 1 - x^2 is maximized at 0
        res = quad.weighted_sup_norm(lambda x: np.ones_like(np.asarray(x)), (-1, 1),
                                     WeightParams(1.0, 1.0, math.inf))
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_requires_sup_params(self):
        with pytest.raises(PreconditionError):
            quad.weighted_sup_norm(lambda x: x, (-1, 1), WeightParams(0, 0, 2.0))


def test_norm_of_kinked_function_with_sign_splitting():
    # || |x| - 1/2 ||_1 on [-1,1] = 1/2 exactly
    res = quad.weighted_lp_norm(lambda x: np.abs(x) - 0.5, (-1, 1),
                                WeightParams(0, 0, 1.0), breakpoints=(0.0,))
    assert res.value == pytest.approx(0.5, abs=1e-10)
