import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

import dickman.distribution as dd
from dickman import DickmanParams, ParameterError, make_params

EG = math.exp(-dd.EULER_GAMMA)


def ein_ref(z):
    # Ein(z) = E1(z) + log z + gamma for z > 0
    return special.exp1(z) + math.log(z) + dd.EULER_GAMMA


# --- parameters ------------------------------------------------------------


@pytest.mark.parametrize("theta,a", [(0, 1), (-1, 1), (1, 0), (1, -2), (math.nan, 1), (1, math.inf)])
def test_bad_params(theta, a):
    with pytest.raises(ParameterError):
        DickmanParams(theta, a)


def test_params_moments():
    p = make_params(3.0, 2.0)
    assert p.mean == 6.0
    assert p.variance == pytest.approx(6.0)
    assert p.norm_const == pytest.approx(math.exp(-3 * dd.EULER_GAMMA) / math.gamma(3.0))


# --- Ein and the transform ---------------------------------------------------


@pytest.mark.parametrize("z", [1e-8, 0.01, 0.5, 1.0, 2.0, 5.0, 9.99, 10.0, 10.01, 30.0, 200.0])
def test_ein_matches_exp1(z):
    assert dd.ein(z) == pytest.approx(ein_ref(z), rel=1e-12, abs=1e-15)


def test_ein_anchor_values():
    assert dd.ein(0.0) == 0.0
    assert dd.ein(2.0) == pytest.approx(1.3192633562, abs=1e-9)
    assert math.exp(-dd.ein(1.0)) == pytest.approx(0.4508594, abs=1e-6)


def test_ein_rejects_negative():
    with pytest.raises(ParameterError):
        dd.ein(-1.0)


@pytest.mark.parametrize("theta,a,s", [(1.0, 1.0, 1.0), (0.5, 2.0, 0.3), (3.0, 1.0, 2.0)])
def test_laplace_matches_density_integral(theta, a, s):
    p = DickmanParams(theta, a)
    val = integrate.quad(lambda x: math.exp(-s * x) * float(dd.pdf(p, x)), 0, 30 * a, points=[a, 2 * a], limit=400)[0]
    assert val == pytest.approx(dd.laplace_transform(p, s), abs=2e-6)


def test_laplace_zero_and_negative():
    p = DickmanParams(2.0, 1.0)
    assert dd.laplace_transform(p, 0.0) == 1.0
    with pytest.raises(ParameterError):
        dd.laplace_transform(p, -1.0)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_cumulants_match_density_moments(k):
    p = DickmanParams(2.0, 1.5)
    m = [integrate.quad(lambda x, j=j: x**j * float(dd.pdf(p, x)), 0, 45, points=[1.5, 3.0], limit=400)[0]
         for j in range(5)]
    kappa = [m[1], m[2] - m[1] ** 2, m[3] - 3 * m[2] * m[1] + 2 * m[1] ** 3,
             m[4] - 4 * m[3] * m[1] - 3 * m[2] ** 2 + 12 * m[2] * m[1] ** 2 - 6 * m[1] ** 4]
    assert kappa[k - 1] == pytest.approx(dd.cumulant(p, k), rel=1e-5)


def test_cumulant_order_validated():
    with pytest.raises(ParameterError):
        dd.cumulant(DickmanParams(1, 1), 0)


def test_tail_bound_dominates_tail():
    p = DickmanParams(1.0, 1.0)
    for x in (2.0, 3.0, 5.0, 8.0):
        tail = 1.0 - float(dd.default_table(1.0).integral(x)) * p.norm_const
        assert dd.tail_bound(p, x) >= tail
    assert dd.tail_bound(p, 0.5) == 1.0


# --- delay-equation solution ---------------------------------------------------


def test_rho_dickman_constants():
    # classical values of the Dickman function
    t = dd.default_table(1.0)
    assert t(2.0) == pytest.approx(1 - math.log(2), abs=1e-12)
    assert t(3.0) == pytest.approx(0.04860838829, abs=1e-10)
    assert t(4.0) == pytest.approx(0.004910925648, abs=5e-12)
    assert t(5.0) == pytest.approx(0.0003547247005, abs=5e-12)


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.5])
def test_rho_satisfies_delay_equation(theta):
    t = dd.default_table(theta)
    x = np.linspace(2.3, 6.0, 12)
    h = 1e-4
    deriv = (t(x + h) - t(x - h)) / (2 * h)
    resid = x * deriv + (1 - theta) * t(x) + theta * t(x - 1)
    assert np.max(np.abs(resid)) < 1e-6


def test_rho_on_first_interval_is_power():
    t = dd.default_table(0.7)
    x = np.array([0.01, 0.3, 1.0])
    assert np.allclose(t(x), x ** (-0.3), rtol=1e-14)


def test_step_snapped():
    t = dd.rho_solve(1.0, x_max=5.0, step=0.0013)
    assert t.per_unit % 2 == 0
    assert abs(t.step - 1.0 / t.per_unit) < 1e-15


# --- density --------------------------------------------------------------


def test_theta1_density_flat_then_log():
    p = DickmanParams(1.0, 1.0)
    assert np.allclose(dd.pdf(p, np.linspace(0.01, 1.0, 50)), EG, atol=1e-12)
    x = np.linspace(1.05, 2.0, 7)
    assert np.allclose(dd.pdf(p, x), EG * (1 - np.log(x)), atol=1e-9)


def test_density_branches_near_zero():
    assert np.all(np.diff(dd.pdf(DickmanParams(0.9, 1.0), [1e-6, 1e-4, 1e-2])) < 0)
    assert float(dd.pdf(DickmanParams(3.0, 1.0), 1e-8)) < 1e-15
    assert float(dd.pdf(DickmanParams(2.0, 1.0), -1.0)) == 0.0


@pytest.mark.parametrize("theta,a", [(0.5, 1.0), (1.0, 2.0), (2.0, 1.0), (3.0, 2.0)])
def test_pdf_matches_recurrence(theta, a):
    p = DickmanParams(theta, a)
    x = np.array([0.4, 1.1, 1.7, 2.2, 2.9]) * a
    assert np.max(np.abs(dd.pdf(p, x) - dd.pdf_recurrence(p, x))) < 1e-8


def test_scale_family():
    p1, p2 = DickmanParams(1.7, 1.0), DickmanParams(1.7, 2.5)
    x = np.array([0.3, 1.4, 3.3])
    assert np.allclose(dd.pdf(p2, 2.5 * x), dd.pdf(p1, x) / 2.5, rtol=1e-12)


def test_density_eval_record():
    d = dd.density(DickmanParams(1.0, 1.0), 0.5)
    assert d.x == 0.5 and d.method == "dde" and d.pdf == pytest.approx(EG)
    assert dd.density(DickmanParams(1.0, 1.0), 0.5, method="recurrence").pdf == pytest.approx(EG, abs=1e-10)
    with pytest.raises(ParameterError):
        dd.density(DickmanParams(1.0, 1.0), 0.5, method="nope")


@pytest.mark.parametrize("theta", [0.5, 0.9, 1.2, 3.0])
def test_cdf_total_mass_and_monotone(theta):
    p = DickmanParams(theta, 1.0)
    x = np.linspace(0, 30, 301)
    c = dd.cdf(p, x)
    assert c[0] == 0.0 and np.all(np.diff(c) >= 0)
    assert c[-1] > 1 - 1e-5


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 4.0), st.floats(0.2, 5.0), st.floats(0.01, 4.0))
def test_pdf_nonnegative_and_scaled(theta, a, u):
    p = DickmanParams(theta, a)
    v = float(dd.pdf(p, u * a))
    assert v >= 0 and math.isfinite(v)
    assert v * a == pytest.approx(float(dd.pdf(DickmanParams(theta, 1.0), u)), rel=1e-10)


# --- samplers ---------------------------------------------------------------


@pytest.mark.parametrize("method", ["arrivals", "perpetuity"])
def test_sampler_scale_exact(method):
    x1 = dd.sample(DickmanParams(1.3, 1.0), np.random.default_rng(5), size=100, method=method)
    x2 = dd.sample(DickmanParams(1.3, 4.0), np.random.default_rng(5), size=100, method=method)
    assert np.allclose(x2, 4.0 * x1, rtol=1e-15)


@pytest.mark.parametrize("method", ["arrivals", "perpetuity"])
def test_sampler_moments(method):
    p = DickmanParams(2.0, 0.5)
    x = dd.sample(p, np.random.default_rng(1), size=200_000, method=method)
    assert abs(x.mean() - p.mean) < 4 * x.std() / math.sqrt(x.size)
    assert x.min() > 0


def test_sampler_scalar_and_errors():
    rng = np.random.default_rng(0)
    assert isinstance(dd.sample_arrivals(DickmanParams(1, 1), rng), float)
    assert dd.sample(DickmanParams(1, 1), rng, size=(2, 3)).shape == (2, 3)
    with pytest.raises(ParameterError):
        dd.sample(DickmanParams(1, 1), rng, method="bogus")
    with pytest.raises(ParameterError):
        dd.sample_arrivals(DickmanParams(1, 1), rng, tol=0.0)


def test_samplers_agree_in_law():
    from dickman.stats import ks_two_sample

    p = DickmanParams(0.8, 1.0)
    x = dd.sample_arrivals(p, np.random.default_rng(2), size=50_000)
    y = dd.sample_perpetuity(p, np.random.default_rng(3), size=50_000)
    d, crit = ks_two_sample(x, y)
    assert d < crit
