import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from dickman import ParameterError
from dickman import stats


def test_ks_matches_scipy():
    x = np.random.default_rng(0).normal(size=500)
    d, crit = stats.ks_distance(x, sps.norm.cdf)
    assert d == pytest.approx(sps.kstest(x, "norm").statistic, abs=1e-14)
    assert crit == pytest.approx(1.628 / math.sqrt(500))


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(1)
    x, y = rng.exponential(size=300), rng.exponential(size=450)
    d, crit = stats.ks_two_sample(x, y)
    assert d == pytest.approx(sps.ks_2samp(x, y).statistic, abs=1e-14)
    assert crit == pytest.approx(1.628 * math.sqrt(750 / (300 * 450)))


def test_ks_input_checks():
    with pytest.raises(ParameterError):
        stats.ks_distance([1.0, 2.0], sps.norm.cdf)
    with pytest.raises(ParameterError):
        stats.ks_distance([np.nan] * 20, sps.norm.cdf)


def test_chi2_matches_scipy_and_pools():
    probs = np.array([0.5, 0.3, 0.15, 0.049, 0.001])
    obs = np.array([510, 290, 150, 49, 1])
    stat, crit, df = stats.chi2_gof(obs, probs)
    # last two cells pooled (expected 1 < 5)
    o = np.array([510, 290, 150, 50])
    e = 1000 * np.array([0.5, 0.3, 0.15, 0.05])
    assert stat == pytest.approx(sps.chisquare(o, e).statistic)
    assert df == 3 and crit == pytest.approx(sps.chi2.ppf(0.99, 3))


def test_kstats_match_scipy():
    x = np.random.default_rng(3).gamma(2.0, size=5000)
    s = stats.empirical_cumulants(x, n_boot=50)
    for k in (1, 2, 3, 4):
        assert s.kstats[k - 1] == pytest.approx(sps.kstat(x, k), rel=1e-9)
    assert np.all(s.stderr > 0)


def test_kstat_bootstrap_se_reasonable():
    # se of the mean of n unit-variance draws is 1/sqrt(n)
    x = np.random.default_rng(4).normal(size=100_000)
    s = stats.empirical_cumulants(x, n_boot=300)
    assert s.stderr[0] == pytest.approx(1 / math.sqrt(x.size), rel=0.25)


def test_cumulants_reject_degenerate():
    with pytest.raises(ParameterError):
        stats.empirical_cumulants(np.ones(100))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=12, max_size=60), st.floats(-50, 50))
def test_kstats_shift(xs, c):
    x = np.array(xs)
    if np.ptp(x) < 1e-3:
        return
    a = stats.empirical_cumulants(x, n_boot=2).kstats
    b = stats.empirical_cumulants(x + c, n_boot=2).kstats
    assert b[0] == pytest.approx(a[0] + c, abs=1e-8)
    assert np.allclose(a[1:3], b[1:3], rtol=1e-6, atol=1e-6 * np.max(np.abs(x)) ** 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=10, max_size=80))
def test_ks_distance_bounds(xs):
    d, _ = stats.ks_distance(xs, lambda v: sps.norm.cdf(v, scale=100))
    assert 0 <= d <= 1


def test_acf_of_ar1():
    rng = np.random.default_rng(5)
    e = rng.normal(size=200_000)
    x = np.empty_like(e)
    x[0] = e[0]
    for i in range(1, e.size):
        x[i] = 0.6 * x[i - 1] + e[i]
    r = stats.empirical_acf(x, [0, 1, 2], mean=0.0)
    assert r[0] == 1.0
    assert r[1:] == pytest.approx([0.6, 0.36], abs=0.01)
    with pytest.raises(ParameterError):
        stats.empirical_acf(x, [-1])


def test_ensemble_acf_known_mean():
    rng = np.random.default_rng(6)
    n, m, rho = 400, 200, 0.5
    y = np.empty((n, m))
    y[:, 0] = rng.normal(size=n) / math.sqrt(1 - rho**2)
    for j in range(1, m):
        y[:, j] = rho * y[:, j - 1] + rng.normal(size=n)
    r, se = stats.ensemble_acf(y, [1, 3], 0.0)
    assert abs(r[0] - 0.5) < 4 * se[0] and abs(r[1] - 0.125) < 4 * se[1]
    g, gse = stats.ensemble_autocov(y, [1], 0.0)
    assert abs(g[0] - rho / (1 - rho**2)) < 4 * gse[0]


def test_laplace_and_cf():
    x = np.random.default_rng(7).exponential(size=100_000)
    est, se = stats.empirical_laplace(x, 1.0)
    assert abs(est - 0.5) < 4 * se
    assert stats.empirical_laplace(x, 0.0) == (1.0, 0.0)
    c, cse = stats.empirical_cf(x, 1.0)
    assert abs(c - 1 / (1 - 1j)) < 6 * cse


def test_within():
    assert stats.within(1.0, 1.3, 0.1)
    assert not stats.within(1.0, 1.5, 0.1)
