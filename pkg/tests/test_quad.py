import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from properscore.dist import Dirac, Empirical, Laplace, Logistic, Mixture, Normal
from properscore.quad import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    IntegralResult,
    IntegrationError,
    QuadConfig,
    combine,
    expect_under,
    integrate_interval,
    integrate_real_line,
    mc_expect,
)


# -- the Gauss-Kronrod tables ------------------------------------------------


def test_gauss_subrule_matches_legendre():
    x, w = np.polynomial.legendre.leggauss(10)
    used = GAUSS_WEIGHTS != 0
    np.testing.assert_allclose(NODES[used], x, atol=1e-15)
    np.testing.assert_allclose(GAUSS_WEIGHTS[used], w, atol=1e-15)


@pytest.mark.parametrize("deg", range(0, 32))
def test_kronrod_rule_exact_to_degree_31(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert NODES**deg @ KRONROD_WEIGHTS == pytest.approx(exact, abs=1e-14)
    if deg < 20:
        assert NODES**deg @ GAUSS_WEIGHTS == pytest.approx(exact, abs=1e-14)


def test_kronrod_not_exact_beyond_31():
    assert abs(NODES**32 @ KRONROD_WEIGHTS - 2 / 33) > 1e-12


# -- spec examples -----------------------------------------------------------


def test_normal_pdf_normalised():
    r = integrate_real_line(Normal().density)
    assert r.converged and r.value == pytest.approx(1.0, abs=1e-9)


def test_double_exponential():
    r = integrate_real_line(lambda x: np.exp(-np.abs(x) / 2), points=[0.0])
    assert r.value == pytest.approx(4.0, abs=1e-9)


def test_nonintegrable_tail_flagged():
    r = integrate_real_line(lambda x: np.where(x > 1, 1 / np.sqrt(1 + x * x), 0.0), points=[1.0])
    assert r.divergent and r.value == math.inf and not r.finite


def test_slowly_decaying_but_integrable_tail():
    r = integrate_real_line(lambda x: 1 / (1 + x * x))
    assert not r.divergent
    assert r.value == pytest.approx(math.pi, rel=1e-9)


@pytest.mark.parametrize(
    "f,a,b,expected",
    [
        (lambda x: np.ones_like(x), 0.0, 2.0, 2.0),
        (lambda x: x, 0.0, 1.0, 0.5),
        (Logistic().density, 0.0, math.inf, 0.5),
        (Logistic().density, -math.inf, 0.0, 0.5),
        (lambda x: np.exp(x), -math.inf, 1.0, math.e),
    ],
)
def test_integrate_interval_examples(f, a, b, expected):
    assert integrate_interval(f, a, b).value == pytest.approx(expected, abs=1e-9)


def test_scalar_callable_is_accepted():
    r = integrate_interval(lambda t: math.sin(t), 0.0, math.pi)
    assert r.value == pytest.approx(2.0, abs=1e-12)


def test_nonfinite_interior_value_raises_with_location():
    with pytest.raises(IntegrationError) as info:
        integrate_interval(lambda x: np.where(np.abs(x - 0.3) < 0.05, np.nan, 1.0), 0.0, 1.0)
    assert abs(info.value.location - 0.3) < 0.05


def test_nonfinite_can_mean_divergence():
    f = lambda x: np.where(np.abs(x) < 0.2, np.inf, 1.0)
    assert integrate_interval(f, -1.0, 1.0, on_nonfinite="diverge").divergent
    with pytest.raises(IntegrationError):
        integrate_interval(f, -1.0, 1.0)


def test_divergence_threshold():
    r = integrate_interval(lambda x: np.full_like(x, 1e13), 0.0, 1.0)
    assert r.divergent
    r2 = integrate_interval(lambda x: np.full_like(x, 1e13), 0.0, 1.0, QuadConfig(divergence_threshold=math.inf))
    assert r2.value == pytest.approx(1e13)


def test_empty_and_reversed_intervals():
    assert integrate_interval(lambda x: x, 1.0, 1.0).value == 0.0
    with pytest.raises(ValueError):
        integrate_interval(lambda x: x, 2.0, 1.0)


@pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"max_subdivisions": 0},
                                {"tail_cutoff_probability": 0.5}, {"divergence_threshold": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        QuadConfig(**kw)


# -- the tolerance contract --------------------------------------------------

CASES = [
    (lambda x: np.exp(-x * x), math.sqrt(math.pi), ()),
    (lambda x: 1 / (1 + x**4), math.pi / math.sqrt(2), ()),
    (lambda x: np.exp(-np.abs(x - 3)) * np.cos(x), math.cos(3) * 1.0, (3.0,)),
    (lambda x: np.exp(-np.abs(x)) * np.abs(np.sin(x)), None, (0.0,)),
    (lambda x: 1 / np.cosh(x / 2), 2 * math.pi, ()),
]


@pytest.mark.parametrize("rel", [1e-6, 1e-9, 1e-12])
@pytest.mark.parametrize("case", range(len(CASES)))
def test_tolerance_contract(case, rel):
    f, truth, pts = CASES[case]
    if truth is None:
        # integral of e^{-x}|sin x| over (0, inf) is (1 + e^{-pi}) / (2 (1 - e^{-pi})); doubled by symmetry
        truth = (1 + math.exp(-math.pi)) / (1 - math.exp(-math.pi))
    r = integrate_real_line(f, QuadConfig(rel_tol=rel, abs_tol=1e-15), points=pts)
    assert r.converged
    tol = max(rel * abs(truth), 1e-15)
    assert abs(r.value - truth) <= 10 * tol + 1e-14
    assert r.error_estimate <= tol * 1.0000001


def test_unconverged_when_budget_exhausted():
    cfg = QuadConfig(max_subdivisions=3)
    r = integrate_interval(lambda x: np.sqrt(np.abs(np.sin(40 * x))), 0.0, 10.0, cfg)
    assert not r.converged and not r.divergent


# -- combining results ---------------------------------------------------------


def test_combine():
    a = IntegralResult(1.0, 1e-10, True)
    b = IntegralResult(2.0, 2e-10, True)
    c = combine([(0.5, a), (2.0, b)])
    assert c.value == 4.5 and c.error_estimate == pytest.approx(4.5e-10)
    inf = IntegralResult.infinite()
    assert combine([(1.0, a), (0.3, inf)]).divergent
    with pytest.raises(IntegrationError):
        combine([(1.0, inf), (-1.0, inf)])


# -- expectations --------------------------------------------------------------


def test_expect_under_examples():
    assert expect_under(Dirac(2.0), lambda x: x * x).value == 4.0
    r = expect_under(Logistic(), lambda x: x * x)
    assert r.value == pytest.approx(math.pi**2 / 3, abs=1e-8)
    assert expect_under(Empirical([1.0, 3.0]), lambda x: x).value == 2.0


def test_expect_under_mixture_is_linear():
    m = Mixture(((0.25, Dirac(1.0)), (0.75, Normal(2, 1))))
    r = expect_under(m, lambda x: x * x)
    assert r.value == pytest.approx(0.25 * 1 + 0.75 * 5, rel=1e-12)


def test_expect_under_atomic_infinite():
    f = lambda x: np.where(x > 0, np.inf, 1.0)
    assert expect_under(Empirical([-1.0, 1.0]), f, on_nonfinite="diverge").divergent
    with pytest.raises(IntegrationError):
        expect_under(Empirical([-1.0, 1.0]), f)


def test_mc_expect_examples():
    assert mc_expect(Dirac(1.0), lambda x: x, 10, seed=3) == (1.0, 0.0)
    m, se = mc_expect(Normal(), lambda x: x, 1_000_000, seed=11)
    assert abs(m) < 3 * se
    m, se = mc_expect(Logistic(), lambda x: 4 * np.cosh(x / 2), 1_000_000, seed=5)
    assert abs(m - 2 * math.pi) < 3 * se
    assert mc_expect(Laplace(), np.cos, 1000, seed=7) == mc_expect(Laplace(), np.cos, 1000, seed=7)
    with pytest.raises(ValueError):
        mc_expect(Normal(), np.cos, 1, seed=0)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=1, max_size=8),
    st.floats(-5, 5),
    st.floats(0.01, 10),
)
def test_polynomials_on_intervals(coefs, a, width):
    b = a + width
    p = np.polynomial.Polynomial(coefs)
    exact = p.integ()(b) - p.integ()(a)
    r = integrate_interval(p, a, b)
    scale = sum(abs(c) for c in coefs) * max(abs(a), abs(b), 1) ** len(coefs) * width
    assert abs(r.value - exact) <= 1e-12 * scale + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(0.3, 4))
def test_normal_density_integrates_to_one(mu, sigma):
    d = Normal(mu, sigma)
    r = integrate_real_line(d.density, points=d.breakpoints())
    assert r.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("case", range(len(CASES)))
def test_refinement_moves_within_error_estimate(case):
    f, _, pts = CASES[case]
    coarse = integrate_real_line(f, QuadConfig(rel_tol=1e-7), points=pts)
    fine = integrate_real_line(f, QuadConfig(rel_tol=1e-8), points=pts)
    assert coarse.converged
    assert abs(fine.value - coarse.value) < 5 * coarse.error_estimate


def test_integration_is_bit_stable():
    f = lambda x: np.exp(-np.abs(x)) * np.cos(3 * x)
    assert integrate_real_line(f) == integrate_real_line(f)
