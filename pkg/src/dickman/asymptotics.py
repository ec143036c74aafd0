"""Integrated processes and their large-time behaviour.

Y*(t) = int_0^t (Y(u) - a theta) du.  Under short memory Y*(T)/sqrt(T) has
variance sigma^2 = eta a^2 theta int xi^{-2} pi(d xi); for gamma-type pi with
alpha in (0, 1) the normaliser is T^{1/(1+alpha)} instead.  The moment
scaling function tau(q) = lim log E|Y*(t)|^q / log t is estimated by the
least-squares slope over geometrically spaced horizons.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distribution import DickmanParams
from .dou import EventPath, GridPath
from .errors import ParameterError
from .supou import Memory, PiMeasure, SupOUEventSet, memory_classification


@dataclass(frozen=True, eq=False)
class IntegratedPath:
    times: np.ndarray
    ystar: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        y = np.asarray(self.ystar, dtype=float)
        if t.shape != y.shape or t.size == 0:
            raise ParameterError("times and ystar must be nonempty and of equal length")
        if t[0] != 0.0 or y[0] != 0.0:
            raise ParameterError("an integrated path starts at Y*(0) = 0")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "ystar", y)

    def at(self, t):
        return np.interp(t, self.times, self.ystar)


@dataclass(frozen=True)
class ScalingEstimate:
    q: float
    slope: float
    stderr: float


class Regime(enum.Enum):
    SHORT_REGVAR = "short"
    LONG_REGVAR = "long"


def integrate_path(path, p: DickmanParams, times=None) -> IntegratedPath:
    """Y*(t) at ``times`` (default: a 1001-point grid on [0, horizon]).

    Event paths and supOU shot sets are integrated exactly; grid paths use the
    trapezoid rule on their own grid (``times`` is then ignored).
    """
    c = p.a * p.theta
    if isinstance(path, GridPath):
        v = path.values
        if v.size < 2:
            raise ParameterError("grid path needs at least two points to integrate")
        cum = np.concatenate(([0.0], np.cumsum((v[1:] + v[:-1]) * 0.5 * path.dt)))
        t = path.dt * np.arange(v.size)
        return IntegratedPath(times=t, ystar=cum - c * t)
    if not isinstance(path, (EventPath, SupOUEventSet)):
        raise ParameterError(f"cannot integrate {type(path).__name__}")
    if times is None:
        times = np.linspace(0.0, path.horizon, 1001)
    t = np.concatenate(([0.0], np.asarray(times, dtype=float)[np.asarray(times) > 0]))
    y = np.asarray(path.integral(t), dtype=float) - c * t
    y[0] = 0.0
    return IntegratedPath(times=t, ystar=y)


def fclt_sigma2(pi: PiMeasure, p: DickmanParams) -> float:
    """sigma^2 = eta a^2 theta int xi^{-2} pi(d xi); defined only under short memory."""
    if memory_classification(pi) is Memory.LONG:
        raise ParameterError("sigma undefined: pi gives long memory")
    return pi.eta * p.a**2 * p.theta * pi.inv_moment(2)


def fclt_sigma(pi: PiMeasure, p: DickmanParams) -> float:
    return math.sqrt(fclt_sigma2(pi, p))


def s_c_squared(p: DickmanParams, lam: float) -> float:
    """Long-run variance a^2 theta / lam of the integrated DOU process."""
    return p.a**2 * p.theta / lam


def s_d_squared(p: DickmanParams, lam: float) -> float:
    """Long-run variance of integer-time DOU partial sums: (a^2 theta/2)(1+e^-lam)/(1-e^-lam)."""
    if not lam > 0:
        raise ParameterError("lambda must be positive")
    e = math.exp(-lam)
    return p.a**2 * p.theta / 2.0 * (1 + e) / (1 - e)


def tau_theoretical(q: float, alpha: float, regime: Regime | str) -> float:
    """Piecewise-linear scaling function of Y* under regularly varying pi."""
    regime = Regime(regime) if not isinstance(regime, Regime) else regime
    if not q > 0:
        raise ParameterError("q must be positive")
    if regime is Regime.SHORT_REGVAR:
        if not alpha > 1:
            raise ParameterError("short-memory regime needs alpha > 1")
        return q / 2.0 if q <= 2 * alpha else q - alpha
    if not 0 < alpha < 1:
        raise ParameterError("long-memory regime needs alpha in (0, 1)")
    return q / (1 + alpha) if q <= 1 + alpha else q - alpha


def _slope(logT, logm):
    x = logT - logT.mean()
    return float(np.dot(x, logm - logm.mean()) / np.dot(x, x))


def scaling_slope(ystar, horizons, q: float, n_boot: int = 200, rng: np.random.Generator | None = None) -> ScalingEstimate:
    """OLS slope of log mean |Y*(T)|^q on log T.

    ``ystar`` is (n_paths, n_horizons); the standard error comes from
    resampling paths.
    """
    ystar = np.abs(np.asarray(ystar, dtype=float))
    horizons = np.asarray(horizons, dtype=float)
    if horizons.size < 3:
        raise ParameterError("need at least 3 horizons")
    if ystar.shape[1] != horizons.size:
        raise ParameterError("ystar columns must match horizons")
    logT = np.log(horizons)
    mq = ystar**q
    slope = _slope(logT, np.log(mq.mean(axis=0)))
    rng = np.random.default_rng(0) if rng is None else rng
    idx = rng.integers(0, mq.shape[0], size=(n_boot, mq.shape[0]))
    boot = np.array([_slope(logT, np.log(mq[i].mean(axis=0))) for i in idx])
    return ScalingEstimate(q=q, slope=slope, stderr=float(boot.std(ddof=1)))


def stable_scaling_estimate(paths, q: float, horizons, n_boot: int = 200,
                            rng: np.random.Generator | None = None) -> ScalingEstimate:
    """Scaling slope from a collection of IntegratedPath objects."""
    horizons = np.asarray(horizons, dtype=float)
    if horizons.size < 3:
        raise ParameterError("need at least 3 horizons")
    ystar = np.array([path.at(horizons) for path in paths])
    return scaling_slope(ystar, horizons, q, n_boot=n_boot, rng=rng)


def geometric_horizons(t0: float, n: int = 8, ratio: float = 2.0) -> np.ndarray:
    return t0 * ratio ** np.arange(n)
