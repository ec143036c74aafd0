"""Estimators used to check simulated output against closed forms.

Everything here is a pure reduction over arrays.  Standard errors are either
plug-in (means of i.i.d. terms) or bootstrap over blocks of the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats as sps

from .errors import ParameterError

#: Asymptotic 1% critical value of sqrt(n) * KS statistic.
KS_C_1PCT = 1.628


def _clean(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if np.isnan(x).any():
        raise ParameterError("sample contains NaN")
    return x


def ks_distance(sample, cdf: Callable) -> tuple[float, float]:
    """One-sample KS distance and its 1% critical value 1.628/sqrt(n)."""
    x = np.sort(_clean(sample))
    n = x.size
    if n < 10:
        raise ParameterError("ks_distance needs at least 10 observations")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    d = max(np.max(i / n - f), np.max(f - (i - 1) / n))
    return float(d), KS_C_1PCT / math.sqrt(n)


def ks_two_sample(x, y) -> tuple[float, float]:
    """Two-sample KS distance and the 1% critical value 1.628*sqrt((n+m)/(n m))."""
    x = np.sort(_clean(x))
    y = np.sort(_clean(y))
    n, m = x.size, y.size
    if min(n, m) < 10:
        raise ParameterError("ks_two_sample needs at least 10 observations per sample")
    z = np.concatenate([x, y])
    d = np.max(np.abs(np.searchsorted(x, z, side="right") / n - np.searchsorted(y, z, side="right") / m))
    return float(d), KS_C_1PCT * math.sqrt((n + m) / (n * m))


def chi2_gof(observed, expected_probs, alpha: float = 0.01, min_expected: float = 5.0):
    """Pearson chi-square goodness of fit; sparse cells are pooled into the last one.

    Returns (statistic, critical value at level alpha, degrees of freedom).
    """
    obs = np.asarray(observed, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    n = obs.sum()
    exp = n * probs
    # pool the tail from the right until each cell has min_expected
    keep = len(exp)
    while keep > 2 and exp[keep - 1:].sum() < min_expected:
        keep -= 1
    o = np.concatenate([obs[: keep - 1], [obs[keep - 1:].sum() + (n - obs.sum())]])
    e = np.concatenate([exp[: keep - 1], [n - exp[: keep - 1].sum()]])
    stat = float(np.sum((o - e) ** 2 / e))
    df = len(o) - 1
    return stat, float(sps.chi2.ppf(1 - alpha, df)), df


@dataclass(frozen=True)
class SampleSummary:
    n: int
    kstats: np.ndarray  # k1..k4
    stderr: np.ndarray


def _kstats_from_sums(n, s1, s2, s3, s4):
    # unbiased cumulant estimators from power sums (Fisher's k-statistics)
    k1 = s1 / n
    k2 = (n * s2 - s1**2) / (n * (n - 1))
    k3 = (2 * s1**3 - 3 * n * s1 * s2 + n**2 * s3) / (n * (n - 1) * (n - 2))
    k4 = (
        -6 * s1**4 + 12 * n * s1**2 * s2 - 3 * n * (n - 1) * s2**2
        - 4 * n * (n + 1) * s1 * s3 + n**2 * (n + 1) * s4
    ) / (n * (n - 1) * (n - 2) * (n - 3))
    return np.array([k1, k2, k3, k4])


def empirical_cumulants(sample, n_boot: int = 200, rng: np.random.Generator | None = None,
                        blocks: int = 1000) -> SampleSummary:
    """k-statistics k1..k4 with bootstrap standard errors.

    The bootstrap resamples ``blocks`` contiguous blocks of the (i.i.d.) sample
    with replacement, working on per-block power sums, so its cost does not
    grow with n.
    """
    x = _clean(sample)
    n = x.size
    if n < 8:
        raise ParameterError("empirical_cumulants needs at least 8 observations")
    if np.ptp(x) == 0:
        raise ParameterError("degenerate sample: all values equal")
    # centre for numerical stability; cumulants beyond k1 are shift invariant
    c = x.mean()
    y = x - c
    nb = min(blocks, n // 4)
    edges = np.linspace(0, n, nb + 1).astype(int)
    sums = np.stack([np.add.reduceat(y**r, edges[:-1]) for r in (1, 2, 3, 4)], axis=1)
    counts = np.diff(edges).astype(float)
    tot = sums.sum(axis=0)
    k = _kstats_from_sums(float(n), *tot)
    k[0] += c
    rng = np.random.default_rng(0) if rng is None else rng
    idx = rng.integers(0, nb, size=(n_boot, nb))
    bs = sums[idx].sum(axis=1)
    bn = counts[idx].sum(axis=1)
    bk = _kstats_from_sums(bn, bs[:, 0], bs[:, 1], bs[:, 2], bs[:, 3])
    se = bk.std(axis=1, ddof=1)
    return SampleSummary(n=n, kstats=k, stderr=se)


def empirical_acf(path, lags, mean: float | None = None) -> np.ndarray:
    """Autocorrelation of a regularly sampled path at integer lags (in steps).

    ``path`` is a GridPath or a 1-d array.  When the stationary ``mean`` is
    known, centring by it avoids the O(1/n) bias of the sample mean.
    """
    x = _clean(getattr(path, "values", path))
    lags = np.atleast_1d(np.asarray(lags, dtype=int))
    if np.any(lags < 0) or np.any(lags >= x.size):
        raise ParameterError("lags must lie in [0, len(path))")
    mu = x.mean() if mean is None else mean
    y = x - mu
    g0 = np.dot(y, y) / x.size
    if g0 == 0:
        raise ParameterError("degenerate path: zero variance")
    return np.array([1.0 if L == 0 else np.dot(y[:-L], y[L:]) / (x.size - L) / g0 for L in lags])


def ensemble_autocov(paths, lags, mean: float):
    """Autocovariance at integer lags from independent stationary paths.

    ``paths`` is (n_paths, n_steps).  Returns (estimate, stderr) with the
    standard error taken across paths.
    """
    y = np.asarray(paths, dtype=float) - mean
    lags = np.atleast_1d(np.asarray(lags, dtype=int))
    per = np.stack([np.mean(y[:, : y.shape[1] - L] * y[:, L:], axis=1) for L in lags], axis=1)
    return per.mean(axis=0), per.std(axis=0, ddof=1) / math.sqrt(per.shape[0])


def ensemble_acf(paths, lags, mean: float):
    """Autocorrelation from independent stationary paths, known mean.

    Ratio of path-averaged autocovariances to the lag-0 value; the standard
    error is by the delta method across paths.
    """
    y = np.asarray(paths, dtype=float) - mean
    lags = np.atleast_1d(np.asarray(lags, dtype=int))
    g0 = np.mean(y * y, axis=1)
    m = g0.size
    est, se = [], []
    for L in lags:
        gl = np.mean(y[:, : y.shape[1] - L] * y[:, L:], axis=1)
        r = gl.mean() / g0.mean()
        resid = (gl - r * g0) / g0.mean()
        est.append(r)
        se.append(resid.std(ddof=1) / math.sqrt(m))
    return np.array(est), np.array(se)


def empirical_laplace(sample, s: float) -> tuple[float, float]:
    """Sample mean of exp(-s X) and its standard error."""
    x = _clean(sample)
    if s == 0:
        return 1.0, 0.0
    v = np.exp(-s * x)
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(x.size))


def empirical_cf(sample, z: float) -> tuple[complex, float]:
    """Sample mean of exp(i z X); the error is the larger of the real/imag standard errors."""
    x = _clean(sample)
    c, s = np.cos(z * x), np.sin(z * x)
    se = max(c.std(ddof=1), s.std(ddof=1)) / math.sqrt(x.size)
    return complex(c.mean(), s.mean()), float(se)


def mean_with_se(x) -> tuple[float, float]:
    x = _clean(x)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def within(estimate: float, target: float, se: float, k: float = 4.0) -> bool:
    return abs(estimate - target) <= k * se
