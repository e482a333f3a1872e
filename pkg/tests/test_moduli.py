import math

import numpy as np
import pytest

from jacobi_approx import functions as fns
from jacobi_approx import moduli
from jacobi_approx.exceptions import ParameterError, PreconditionError
from jacobi_approx.weights import WeightParams

P2 = WeightParams(0.0, 0.0, 2.0)
PINF = WeightParams(0.0, 0.0, math.inf)
PHALF = WeightParams(0.0, 0.0, 0.5)

X1 = fns.corpus_by_name("mono1")
X2 = fns.corpus_by_name("mono2")
ABS = fns.corpus_by_name("abs")
XAX = fns.corpus_by_name("x_abs_x")


class TestSymmetricDifference:
    def test_second_difference_of_quadratic(self):
        for s in (0.05, 0.2):
            for x in (-0.3, 0.0, 0.4):
                got = moduli.symmetric_difference(X2, 0, 2, s, x)
                assert got == pytest.approx(2 * s * s, abs=1e-14)

    def test_annihilates_affine(self):
        assert moduli.symmetric_difference(X1, 0, 2, 0.3, 0.1) == pytest.approx(0.0, abs=1e-15)

    def test_zero_branch_outside_interval(self):
        assert moduli.symmetric_difference(ABS, 0, 1, 3.0, 0.0) == 0.0

    def test_negative_step_rejected(self):
        with pytest.raises(PreconditionError):
            moduli.symmetric_difference(ABS, 0, 1, -0.1, 0.0)

    def test_vectorized(self):
        x = np.linspace(-0.5, 0.5, 5)
        got = moduli.symmetric_difference(X2, 0, 2, 0.1, x)
        np.testing.assert_allclose(got, 0.02 * np.ones(5), atol=1e-14)


class TestWeightedModulus:
    @pytest.mark.parametrize("t", [0.1, 0.25, 0.5])
    def test_quadratic_sup_norm_value(self, t):
        # Delta^2 with step h*phi at x gives 2h^2(1-x^2); sup over Dom is 2h^2
        q = moduli.ModulusQuery(spec=X2, k=2, r=0, t=t, params=PINF)
        res = moduli.weighted_modulus(q)
        assert res.value == pytest.approx(2 * t * t, abs=1e-6)
        assert res.argmax_h <= min(t, 1.0) + 1e-15

    def test_annihilation(self):
        q = moduli.ModulusQuery(spec=X1, k=2, r=0, t=0.7, params=PINF)
        assert moduli.weighted_modulus(q).value <= 1e-10

    def test_saturation_beyond_two_over_k(self):
        v3 = moduli.weighted_modulus(
            moduli.ModulusQuery(spec=ABS, k=1, r=0, t=3.0, params=PINF)).value
        v2 = moduli.weighted_modulus(
            moduli.ModulusQuery(spec=ABS, k=1, r=0, t=2.0, params=PINF)).value
        assert abs(v3 - v2) <= 1e-10

    def test_sup_enforces_nonnegative_shifts(self):
        par = WeightParams(-0.2, 0.0, 2.0)
        with pytest.raises(ParameterError):
            moduli.weighted_modulus(
                moduli.ModulusQuery(spec=ABS, k=1, r=0, t=0.5, params=par))
        # explicit override admits it for p < inf
        res = moduli.weighted_modulus(
            moduli.ModulusQuery(spec=ABS, k=1, r=0, t=0.5, params=par,
                                allow_unchecked=True))
        assert res.value > 0

    def test_order_beyond_max_rejected(self):
        with pytest.raises(PreconditionError):
            moduli.weighted_modulus(
                moduli.ModulusQuery(spec=ABS, k=1, r=1, t=0.5, params=P2))


class TestAveragedModulus:
    def test_sup_case_equals_plain(self):
        q = moduli.ModulusQuery(spec=ABS, k=1, r=0, t=0.5, params=PINF)
        assert (moduli.averaged_modulus(q).value
                == moduli.weighted_modulus(q).value)

    def test_annihilation(self):
        q = moduli.ModulusQuery(spec=X1, k=2, r=0, t=0.5, params=P2)
        assert moduli.averaged_modulus(q).value <= 1e-10

    def test_dominated_by_plain_modulus(self):
        q = moduli.ModulusQuery(spec=ABS, k=1, r=0, t=0.5, params=P2)
        star = moduli.averaged_modulus(q).value
        plain = moduli.weighted_modulus(q).value
        assert star <= plain + 1e-8


LATTICE = [
    (k, r, ab, p)
    for k in (1, 2, 3)
    for r in (0, 1)
    for ab in ((0.0, 0.0), (0.5, 0.0), (1.0, 1.0))
    for p in ((0.5, 1.0, 2.0, math.inf) if r == 0 else (1.0, 2.0, math.inf))
    if not (p == 0.5 and r != 0)
]


def _spec_for(r):
    return ABS if r == 0 else XAX


@pytest.mark.parametrize("k,r,ab,p", LATTICE[::5], ids=str)
def test_monotone_in_t(k, r, ab, p):
    par = WeightParams(ab[0], ab[1], p)
    ev = moduli.evaluator_for(_spec_for(r), k, r, par)
    vals = [ev.modulus(t).value for t in (0.1, 0.3, 0.8, 2.0)]
    for a, b in zip(vals[:-1], vals[1:]):
        assert a <= b + 1e-10


@pytest.mark.parametrize("k,r,ab,p", LATTICE[::7], ids=str)
def test_homogeneity(k, r, ab, p):
    par = WeightParams(ab[0], ab[1], p)
    spec = _spec_for(r)
    base = moduli.weighted_modulus(
        moduli.ModulusQuery(spec=spec, k=k, r=r, t=0.4, params=par)).value
    scaled = moduli.weighted_modulus(
        moduli.ModulusQuery(spec=fns.scaled_spec(spec, 2.0), k=k, r=r, t=0.4,
                            params=par)).value
    assert scaled == pytest.approx(2.0 * base, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_quasi_subadditivity(p):
    """Minkowski at the step-norm level: the moduli of f, g, and f+g are
    compared on the f+g evaluator's own step set."""
    par = WeightParams(0.0, 0.0, p)
    f, g = ABS, fns.corpus_by_name("runge")
    both = fns.sum_spec(f, g)
    ev_sum = moduli.evaluator_for(both, 2, 0, par)
    r_sum = ev_sum.modulus(0.5)
    ev_f = moduli.evaluator_for(f, 2, 0, par)
    ev_g = moduli.evaluator_for(g, 2, 0, par)
    ev_f.ensure_evaluated(ev_sum._memo.keys())
    ev_g.ensure_evaluated(ev_sum._memo.keys())
    assert r_sum.value <= (ev_f.modulus(0.5).value
                           + ev_g.modulus(0.5).value + 1e-8)


def test_anchored_sweep_matches_documented_grid():
    ev = moduli.ModulusEvaluator(ABS, 2, 0, P2)
    for t in (0.6, 0.22, 1.0 / 17):
        a = ev.modulus_at(t).value
        b = moduli.ModulusEvaluator(ABS, 2, 0, P2).modulus(t).value
        assert a == pytest.approx(b, rel=2e-3)


def test_result_metadata():
    q = moduli.ModulusQuery(spec=ABS, k=1, r=0, t=0.5, params=PINF)
    res = moduli.weighted_modulus(q)
    assert res.h_grid_size == moduli.H_GRID_SIZE
    assert 0 < res.argmax_h <= 0.5 + 1e-15
    assert res.converged
