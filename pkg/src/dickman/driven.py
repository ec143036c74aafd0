"""OU processes driven by the Poisson process of order k and by the Bell-Touchard process.

Both drivers are compound Poisson, so each process is simulated two ways:
``direct`` runs the compound-Poisson OU engine with the driver's marks, and
``superposition`` sums independent DOU processes with jump sizes j.  The two
must agree in law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .distribution import DickmanParams
from .dou import EventPath, shot_stationary, simulate_compound_ou, simulate_exact
from .errors import ParameterError

MODES = ("direct", "superposition")


@dataclass(frozen=True)
class OrderKParams:
    theta: float
    k: int
    lam: float = 1.0

    def __post_init__(self):
        if not self.theta > 0 or not self.lam > 0:
            raise ParameterError("theta and lambda must be positive")
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k!r}")


@dataclass(frozen=True)
class BellTouchardParams:
    alpha: float
    nu: float
    lam: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.nu > 0 and self.lam > 0):
            raise ParameterError("alpha, nu and lambda must be positive")

    @property
    def jump_rate(self) -> float:
        """Driver jump rate alpha (e^nu - 1) per unit driver time."""
        return self.alpha * math.expm1(self.nu)


def _merge(paths, horizon, lam) -> EventPath:
    times = np.concatenate([q.times for q in paths])
    marks = np.concatenate([q.marks for q in paths])
    order = np.argsort(times, kind="stable")
    return EventPath(x0=sum(q.x0 for q in paths), lam=lam, times=times[order], marks=marks[order], horizon=horizon)


def _check_mode(mode):
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")


# ---------------------------------------------------------------------------
# Poisson process of order k


def ppk_moments(p: OrderKParams, tau: float = 0.0) -> tuple[float, float]:
    """Stationary mean theta k(k+1)/2 and lag-tau covariance (theta/2) k(k+1)(2k+1)/6 e^{-lam tau}."""
    if tau < 0:
        raise ParameterError("tau must be nonnegative")
    k = p.k
    return p.theta * k * (k + 1) / 2.0, p.theta / 2.0 * k * (k + 1) * (2 * k + 1) / 6.0 * math.exp(-p.lam * tau)


def simulate_ppk_ou(p: OrderKParams, T: float, rng: np.random.Generator, mode: str = "direct") -> EventPath:
    """Stationary OU path driven by the Poisson process of order k.

    direct: jumps at rate k*theta*lam with marks uniform on {1..k}, X(0) drawn
    from the stationary shot-noise series.  superposition: sum of k independent
    DOU(theta, a=j, lam) paths.
    """
    _check_mode(mode)
    if mode == "superposition":
        parts = [simulate_exact(DickmanParams(p.theta, j), p.lam, T, rng) for j in range(1, p.k + 1)]
        return _merge(parts, float(T), p.lam)

    def marks(r, n):
        return r.integers(1, p.k + 1, n).astype(float)

    rate = p.k * p.theta
    x0 = shot_stationary(rate, (p.k + 1) / 2.0, marks, rng)
    return simulate_compound_ou(p.lam, T, rate * p.lam, marks, rng, x0)


# ---------------------------------------------------------------------------
# Bell-Touchard


def zero_truncated_poisson_pmf(nu: float, n):
    """P(Y = n) = nu^n / (n! (e^nu - 1)), n >= 1."""
    n = np.asarray(n)
    logp = n * math.log(nu) - special.gammaln(n + 1.0) - math.log(math.expm1(nu))
    return np.where(n >= 1, np.exp(logp), 0.0)


def _ztp_table(nu):
    # support up to where the remaining mass is below 1e-16
    n_max = int(nu + 12 * math.sqrt(nu) + 40)
    pmf = zero_truncated_poisson_pmf(nu, np.arange(1, n_max + 1))
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return cdf


def sample_zero_truncated_poisson(nu: float, rng: np.random.Generator, size=None):
    """Zero-truncated Poisson(nu) by inversion of the cumulative pmf."""
    if not nu > 0:
        raise ParameterError("nu must be positive")
    cdf = _ztp_table(nu)
    n = 1 if size is None else int(np.prod(size))
    out = np.searchsorted(cdf, rng.random(n), side="right") + 1
    return int(out[0]) if size is None else out.reshape(size)


def bt_moments(p: BellTouchardParams, tau: float = 0.0) -> tuple[float, float]:
    """Stationary mean alpha nu e^nu and covariance (alpha e^nu/2) nu (nu+1) e^{-lam tau}."""
    if tau < 0:
        raise ParameterError("tau must be nonnegative")
    e = math.exp(p.nu)
    return p.alpha * p.nu * e, p.alpha * e / 2.0 * p.nu * (p.nu + 1.0) * math.exp(-p.lam * tau)


def bt_component_thetas(p: BellTouchardParams, mean_tol: float = 1e-6) -> np.ndarray:
    """theta_j = alpha nu^j / j! for j = 1..J, with J the first index whose omitted
    mean sum_{j>J} j theta_j is below ``mean_tol``."""
    total = bt_moments(p)[0]
    thetas, acc, j = [], 0.0, 0
    while True:
        j += 1
        th = math.exp(math.log(p.alpha) + j * math.log(p.nu) - special.gammaln(j + 1.0))
        thetas.append(th)
        acc += j * th
        if total - acc < mean_tol and j > p.nu:
            return np.array(thetas)


def simulate_bt_ou(p: BellTouchardParams, T: float, rng: np.random.Generator, mode: str = "direct",
                   mean_tol: float = 1e-6) -> EventPath:
    """Stationary OU path driven by the Bell-Touchard process.

    direct: jumps at rate alpha (e^nu - 1) lam with zero-truncated Poisson(nu)
    marks.  superposition: independent DOU(theta_j, a=j, lam), j <= J.
    """
    _check_mode(mode)
    if mode == "superposition":
        thetas = bt_component_thetas(p, mean_tol)
        parts = [simulate_exact(DickmanParams(th, j), p.lam, T, rng) for j, th in enumerate(thetas, start=1)]
        return _merge(parts, float(T), p.lam)

    def marks(r, n):
        return sample_zero_truncated_poisson(p.nu, r, size=n).astype(float)

    mark_mean = p.nu * math.exp(p.nu) / math.expm1(p.nu)
    x0 = shot_stationary(p.jump_rate, mark_mean, marks, rng)
    return simulate_compound_ou(p.lam, T, p.jump_rate * p.lam, marks, rng, x0)
