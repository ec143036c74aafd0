import math

import numpy as np
import pytest
from scipy import integrate

import dickman.distribution as dd
from dickman import DickmanParams, ParameterError
from dickman import dou, stats

P = DickmanParams(3.0, 1.0)


def test_event_path_value_brute_force():
    t = np.array([0.5, 1.2, 3.0])
    m = np.array([1.0, 2.0, 0.5])
    path = dou.EventPath(x0=2.0, lam=0.7, times=t, marks=m, horizon=4.0)
    for s in (0.0, 0.5, 1.0, 2.99, 3.0, 4.0):
        ref = 2.0 * math.exp(-0.7 * s) + sum(mk * math.exp(-0.7 * (s - tk)) for tk, mk in zip(t, m) if tk <= s)
        assert path.value(s) == pytest.approx(ref, rel=1e-14)


def test_event_path_validation():
    with pytest.raises(ParameterError):
        dou.EventPath(0.0, 1.0, np.array([2.0, 1.0]), np.array([1.0, 1.0]), 3.0)
    with pytest.raises(ParameterError):
        dou.EventPath(0.0, 1.0, np.array([1.0]), np.array([1.0, 1.0]), 3.0)


def test_decay_sum_long_horizon_no_overflow():
    path = dou.simulate_exact(P, 5.0, 2000.0, np.random.default_rng(0))
    v = path.value(np.linspace(0, 2000, 50))
    assert np.all(np.isfinite(v)) and np.all(v >= 0)
    # direct evaluation at the end
    s = path.times
    ref = path.x0 * math.exp(-5.0 * 2000) + np.sum(path.marks * np.exp(-5.0 * (2000 - s)))
    assert v[-1] == pytest.approx(ref, rel=1e-12)


def test_event_integral_matches_quadrature():
    path = dou.simulate_exact(P, 1.0, 10.0, np.random.default_rng(1))
    pts = list(path.times)
    ref = integrate.quad(lambda u: float(path.value(u)), 0, 10.0, points=pts, limit=500)[0]
    assert path.integral(10.0) == pytest.approx(ref, rel=1e-9)


def test_exact_stationary_moments():
    grid = np.array([0.0, 5.0])
    vals = np.array([dou.simulate_exact(P, 1.0, 5.0, r).value(grid) for r in
                     [np.random.default_rng(s) for s in range(1500)]])
    m, se = stats.mean_with_se(vals[:, 1])
    assert abs(m - 3.0) < 4 * se
    d, crit = stats.ks_distance(vals[:, 1], lambda v: dd.cdf(P, v))
    assert d < crit


def test_grid_matches_exact_on_fine_grid():
    e = dou.simulate_exact(P, 1.0, 20.0, np.random.default_rng(9))
    g = dou.simulate_grid(P, 1.0, 20.0, 1e-4, np.random.default_rng(9))
    assert g.values[0] == e.x0
    tt = np.array([1.0, 5.0, 19.5])
    assert np.allclose(np.interp(tt, g.times, g.values), e.value(tt), atol=5e-3)


def test_grid_size_and_errors():
    g = dou.simulate_grid(P, 1.0, 1.0, 0.3, np.random.default_rng(0))
    assert g.values.size == 1 + math.ceil(1.0 / 0.3)
    with pytest.raises(ParameterError):
        dou.simulate_grid(P, 1.0, 1.0, 2.0, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        dou.simulate_exact(P, 0.0, 1.0, np.random.default_rng(0))


def test_jump_steps_one_per_step():
    idx = dou.jump_steps(np.array([0.05, 0.07, 0.08, 0.31]), 0.1)
    assert list(idx) == [1, 2, 3, 4]
    idx = dou.jump_steps(np.array([0.1, 0.5]), 0.1)
    assert list(idx) == [1, 5]


def test_transition_zero_jumps_exact():
    y = dou.transition_sample(P, 1.0, 4.0, 0.2, np.random.default_rng(0), size=20_000)
    p0 = np.mean(y == math.exp(-0.2) * 4.0)
    assert abs(p0 - math.exp(-0.6)) < 4 * math.sqrt(p0 * (1 - p0) / y.size)
    assert np.all(y >= math.exp(-0.2) * 4.0)


def test_transition_cf_matches_empirical():
    y = dou.transition_sample(P, 1.0, 2.0, 0.5, np.random.default_rng(1), size=200_000)
    for z in (0.3, 1.0):
        c, se = stats.empirical_cf(y, z)
        assert abs(c - dou.transition_cf(P, 1.0, 2.0, 0.5, z)) < 6 * se


def test_stationary_cf_matches_laplace_continuation():
    # the t = inf CF at z equals E exp(i z D); compare with direct quadrature against the density
    p = DickmanParams(1.5, 1.0)
    z = 0.8
    re = integrate.quad(lambda x: math.cos(z * x) * float(dd.pdf(p, x)), 0, 40, points=[1, 2], limit=400)[0]
    im = integrate.quad(lambda x: math.sin(z * x) * float(dd.pdf(p, x)), 0, 40, points=[1, 2], limit=400)[0]
    assert dou.transition_cf(p, 1.0, 0.0, math.inf, z) == pytest.approx(complex(re, im), abs=1e-6)


def test_transition_vector_start():
    x = np.array([0.0, 1.0, 10.0])
    y = dou.transition_sample(P, 1.0, x, 1.0, np.random.default_rng(0), size=3)
    assert y.shape == (3,) and y[2] >= 10 * math.exp(-1)
    with pytest.raises(ParameterError):
        dou.transition_sample(P, 1.0, -1.0, 1.0, np.random.default_rng(0))


def test_covariance_and_spectrum():
    assert dou.covariance(P, 2.0, 0.0) == 1.5
    assert dou.covariance(P, 2.0, 1.0) == pytest.approx(1.5 * math.exp(-2.0))
    tot = integrate.quad(lambda w: float(dou.spectral_density(P, 2.0, w)), -np.inf, np.inf)[0]
    assert tot == pytest.approx(P.variance, rel=1e-10)
    with pytest.raises(ParameterError):
        dou.covariance(P, 1.0, -1.0)


def test_ar1_chain_and_moments():
    ch = dou.ar1_simulate(P, 0.5, 100, np.random.default_rng(0))
    assert ch.values.size == 101 and np.all(ch.values > 0)
    eps = dou.ar1_innovation(P, 0.5, np.random.default_rng(1), size=200_000)
    m, se = stats.mean_with_se(eps)
    assert abs(m - 1.5) < 4 * se
    # innovation variance makes the marginal variance stationary: (1 - c^2) a^2 theta / 2
    assert eps.var() == pytest.approx((1 - 0.25) * 1.5, rel=0.02)
    with pytest.raises(ParameterError):
        dou.ar1_innovation(P, 1.0, np.random.default_rng(0))


def test_ar1_spectral_density_matches_covariances():
    c = 0.6
    w = np.linspace(-math.pi, math.pi, 7)
    lags = np.arange(-400, 401)
    ref = np.array([np.sum([dou.ar1_covariance(P, c, k) * math.cos(k * x) for k in lags]) for x in w]) / (2 * math.pi)
    assert np.allclose(dou.ar1_spectral_density(P, c, w), ref, rtol=1e-9)
