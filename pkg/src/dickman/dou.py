"""Dickman OU process dX = -lambda X dt + dN(lambda t), N Poisson with rate theta, jumps a.

In real time the jumps arrive at rate theta*lambda.  The stationary law is
GD(theta, a) and the autocovariance is a^2 theta/2 * exp(-lambda tau).

Conditionally on X(0) = x, X(t) = e^{-lambda t} x + sum_{k<=N} xi_k with N
Poisson(theta*lambda*t) and xi_k of density 1/(lambda t u) on (a e^{-lambda t}, a).
The count parameter carries the factor lambda: it is the expected number of
driver jumps in (0, t], and it is the only choice whose conditional mean tends
to the stationary mean a*theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, signal

from .distribution import DickmanParams, sample_arrivals
from .errors import ParameterError, QuadratureError


def _positive(name, v):
    if not (math.isfinite(v) and v > 0):
        raise ParameterError(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True, eq=False)
class EventPath:
    """Exact path of an OU process driven by a compound Poisson process.

    X(t) = x0 e^{-lam t} + sum_{s_k <= t} mark_k e^{-lam (t - s_k)}.
    """

    x0: float
    lam: float
    times: np.ndarray
    marks: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        m = np.asarray(self.marks, dtype=float)
        if t.shape != m.shape:
            raise ParameterError("times and marks must have the same length")
        if t.size and (np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] > self.horizon):
            raise ParameterError("event times must be strictly increasing in (0, horizon]")
        t.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "marks", m)

    @property
    def n_events(self) -> int:
        return self.times.size

    def value(self, t):
        """Exact value at the times ``t`` (any order, within [0, horizon])."""
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        order = np.argsort(flat, kind="stable")
        out = np.empty_like(flat)
        out[order] = decay_sum(self.x0, self.lam, self.times, self.marks, flat[order])
        return out.reshape(t.shape)[()] if t.ndim == 0 else out.reshape(t.shape)

    def driver_total(self, t):
        """Sum of marks with s_k <= t."""
        c = np.concatenate(([0.0], np.cumsum(self.marks)))
        return c[np.searchsorted(self.times, t, side="right")]

    def integral(self, t):
        """int_0^t X(u) du, exact: (x0 + Z(t) - X(t)) / lam from the SDE itself."""
        return (self.x0 + self.driver_total(t) - self.value(t)) / self.lam

    def on_grid(self, dt: float) -> GridPath:
        n = 1 + int(math.ceil(self.horizon / dt - 1e-9))
        return GridPath(dt=dt, values=self.value(dt * np.arange(n)), t0=0.0)


def decay_sum(x0, lam, times, marks, eval_times):
    """x0 e^{-lam t} + sum_{s_k <= t} m_k e^{-lam (t - s_k)} at sorted ``eval_times``.

    Works in blocks of lam-duration ~300 so the rescaled exponentials never overflow.
    """
    ev = np.asarray(eval_times, dtype=float)
    out = np.empty_like(ev)
    if ev.size == 0:
        return out
    block = 300.0 / lam
    carry_t, carry = 0.0, float(x0)  # value just at carry_t (events <= carry_t included)
    lo_ev = 0
    lo_s = 0
    t_end = ev[-1]
    while lo_ev < ev.size:
        b_end = min(carry_t + block, t_end)
        hi_ev = np.searchsorted(ev, b_end, side="right")
        hi_s = np.searchsorted(times, b_end, side="right")
        s = times[lo_s:hi_s]
        w = marks[lo_s:hi_s] * np.exp(lam * (s - carry_t))
        cw = np.concatenate(([0.0], np.cumsum(w)))
        e = ev[lo_ev:hi_ev]
        k = np.searchsorted(s, e, side="right")
        out[lo_ev:hi_ev] = np.exp(-lam * (e - carry_t)) * (carry + cw[k])
        carry = math.exp(-lam * (b_end - carry_t)) * (carry + cw[-1])
        carry_t = b_end
        lo_ev, lo_s = hi_ev, hi_s
        if b_end >= t_end:
            break
    return out


@dataclass(frozen=True, eq=False)
class GridPath:
    dt: float
    values: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size < 1:
            raise ParameterError("grid path needs at least one value")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)


def _poisson_times(rate, T, rng):
    """Arrival times of a rate-``rate`` Poisson process on (0, T] by exponential gaps."""
    if rate <= 0 or T <= 0:
        return np.empty(0)
    # draw gaps in batches until past T
    chunks, total = [], 0.0
    batch = max(16, int(rate * T * 1.1 + 5 * math.sqrt(rate * T) + 10))
    while True:
        g = rng.exponential(1.0 / rate, batch)
        c = total + np.cumsum(g)
        chunks.append(c)
        total = c[-1]
        if total > T:
            break
        batch = max(16, batch // 4)
    t = np.concatenate(chunks)
    return t[t <= T]


def shot_stationary(rate, mark_mean, mark_sampler, rng, tol=1e-10):
    """sum_n Y_n e^{-U_n}: the stationary value of a compound-Poisson OU.

    U_n are Poisson arrivals of ``rate`` in driver time (the whole past,
    reversed) and Y_n i.i.d. marks; stops once the expected remaining tail
    rate * E[Y] * e^{-U_n} is below ``tol``.
    """
    total, u = 0.0, 0.0
    while True:
        u += rng.exponential(1.0 / rate)
        total += float(mark_sampler(rng, 1)[0]) * math.exp(-u)
        if rate * mark_mean * math.exp(-u) < tol:
            return total


def simulate_compound_ou(lam, T, rate, mark_sampler, rng, x0):
    """Event path of an OU process whose driver jumps at ``rate`` per unit real time.

    The shared engine for all Poisson-type drivers; ``mark_sampler(rng, n)``
    returns n marks.
    """
    _positive("lambda", lam)
    _positive("T", T)
    times = _poisson_times(rate, T, rng)
    marks = np.asarray(mark_sampler(rng, times.size), dtype=float)
    return EventPath(x0=float(x0), lam=lam, times=times, marks=marks, horizon=float(T))


def simulate_exact(p: DickmanParams, lam: float, T: float, rng: np.random.Generator, x0: float | None = None) -> EventPath:
    """Stationary DOU path on [0, T]: x0 ~ GD(theta, a), jumps +a at rate theta*lam."""
    _positive("lambda", lam)
    _positive("T", T)
    if x0 is None:
        x0 = sample_arrivals(p, rng)
    return simulate_compound_ou(lam, T, p.theta * lam, lambda r, n: np.full(n, p.a), rng, x0)


def simulate_grid(p: DickmanParams, lam: float, T: float, dt: float, rng: np.random.Generator,
                  x0: float | None = None) -> GridPath:
    """Grid DOU simulation in the form of the classic event-stepping algorithm.

    n = 1 + ceil(T/dt) grid values; each step decays by e^{-lam dt} and adds a
    when the running time has reached the next arrival.  At most one jump is
    added per step, so a second arrival inside the same step is applied at the
    following step.  Randomness is consumed like ``simulate_exact`` (initial
    value, then inter-arrival gaps), so both see the same arrivals for a seed.
    """
    _positive("lambda", lam)
    _positive("T", T)
    if not 0 < dt < T:
        raise ParameterError(f"need 0 < dt < T, got dt={dt}, T={T}")
    if x0 is None:
        x0 = sample_arrivals(p, rng)
    n = 1 + int(math.ceil(T / dt - 1e-9))
    arrivals = _poisson_times(p.theta * lam, T, rng)
    idx = jump_steps(arrivals, dt)
    impulses = np.zeros(n)
    idx = idx[idx < n]
    np.add.at(impulses, idx, p.a)
    impulses[0] = x0
    values = signal.lfilter([1.0], [1.0, -math.exp(-lam * dt)], impulses)
    return GridPath(dt=dt, values=values, t0=0.0)


def jump_steps(arrivals, dt):
    """Grid index at which each arrival is applied: the first i with i*dt >= tau,
    pushed forward so that no two arrivals share a step."""
    idx = np.ceil(np.asarray(arrivals) / dt - 1e-12).astype(np.int64)
    idx = np.maximum(idx, 1)
    # enforce idx_k >= idx_{k-1} + 1 : running max of idx_k - k, then add k back
    k = np.arange(idx.size)
    return np.maximum.accumulate(idx - k) + k


def transition_sample(p: DickmanParams, lam: float, x, t: float, rng: np.random.Generator, size=None):
    """Draw X(t) given X(0) = x: e^{-lam t} x + sum of Poisson(theta lam t) marks a e^{-lam t U}.

    ``x`` may be an array broadcastable to ``size`` (one start value per draw).
    """
    _positive("t", t)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("x must be nonnegative")
    n = 1 if size is None else int(np.prod(size))
    counts = rng.poisson(p.theta * lam * t, n)
    u = rng.random(counts.sum())
    xi = p.a * np.exp(-lam * t * u)
    owner = np.repeat(np.arange(n), counts)
    out = np.broadcast_to(math.exp(-lam * t) * x, (n,) if x.ndim == 0 else x.shape).reshape(-1).copy()
    if out.size != n:
        raise ParameterError("x does not match size")
    np.add.at(out, owner, xi)
    return float(out[0]) if size is None else out.reshape(size)


def transition_cf(p: DickmanParams, lam: float, x: float, t: float, z: float) -> complex:
    """E[exp(i z X(t)) | X(0) = x] = exp{i z e^{-lam t} x + theta int_{a e^{-lam t}}^a (e^{iuz} - 1) du/u}.

    ``t = inf`` gives the stationary characteristic function.
    """
    if not t > 0:
        raise ParameterError("t must be positive")
    lo = 0.0 if math.isinf(t) else p.a * math.exp(-lam * t)
    if z == 0:
        return 1.0 + 0j

    def q(f):
        val, err, *_ = integrate.quad(f, lo, p.a, epsabs=1e-13, epsrel=1e-12, limit=200, full_output=1)
        if err > 1e-9:
            raise QuadratureError("transition_cf integral", err)
        return val

    re = q(lambda u: (math.cos(u * z) - 1.0) / u if u > 0 else 0.0)
    im = q(lambda u: math.sin(u * z) / u if u > 0 else z)
    drift = 0.0 if math.isinf(t) else z * math.exp(-lam * t) * x
    return complex(np.exp(p.theta * re + 1j * (drift + p.theta * im)))


def covariance(p: DickmanParams, lam: float, tau: float) -> float:
    if tau < 0:
        raise ParameterError("tau must be nonnegative")
    return p.a**2 * p.theta / 2.0 * math.exp(-lam * tau)


def correlation(lam: float, tau):
    return np.exp(-lam * np.asarray(tau, dtype=float))


def spectral_density(p: DickmanParams, lam: float, omega):
    """a^2 theta lam / (2 pi (lam^2 + omega^2)); integrates to the variance over R."""
    omega = np.asarray(omega, dtype=float)
    return p.a**2 * p.theta * lam / (2 * math.pi * (lam**2 + omega**2))


# ---------------------------------------------------------------------------
# AR(1) with Dickman marginals


@dataclass(frozen=True, eq=False)
class Ar1Chain:
    c: float
    values: np.ndarray


def _check_c(c):
    if not 0 < c < 1:
        raise ParameterError(f"c must lie in (0, 1), got {c}")


def ar1_innovation(p: DickmanParams, c: float, rng: np.random.Generator, size=None):
    """Innovation: sum of Poisson(theta log(1/c)) terms a c^U, U uniform.

    The count parameter theta*log(1/c) is the driver mass over the time window
    of length log(1/c) that one AR step spans.
    """
    _check_c(c)
    L = -math.log(c)
    n = 1 if size is None else int(np.prod(size))
    counts = rng.poisson(p.theta * L, n)
    xi = p.a * np.exp(-L * rng.random(counts.sum()))
    out = np.zeros(n)
    np.add.at(out, np.repeat(np.arange(n), counts), xi)
    return float(out[0]) if size is None else out.reshape(size)


def ar1_simulate(p: DickmanParams, c: float, n: int, rng: np.random.Generator) -> Ar1Chain:
    """X_0 ~ GD(theta, a), X_k = c X_{k-1} + eps_k for k = 1..n (n+1 values)."""
    _check_c(c)
    if n < 1:
        raise ParameterError("n must be >= 1")
    x0 = sample_arrivals(p, rng)
    eps = ar1_innovation(p, c, rng, size=n)
    drive = np.concatenate(([x0], eps))
    return Ar1Chain(c=c, values=signal.lfilter([1.0], [1.0, -c], drive))


def ar1_covariance(p: DickmanParams, c: float, lag: int) -> float:
    return p.a**2 * p.theta / 2.0 * c ** abs(lag)


def ar1_spectral_density(p: DickmanParams, c: float, omega, k_max: int | None = None):
    """(a^2 theta / 2pi) sum_k L / (L^2 + (omega + 2 pi k)^2), L = log(1/c).

    Partial sum over |k| <= K plus the integral of the omitted terms (midpoint
    rule tail); the leftover is O(K^-3), below 1e-10 for the default K.
    """
    _check_c(c)
    L = -math.log(c)
    omega = np.asarray(omega, dtype=float)
    if k_max is None:
        k_max = 2000
    k = np.arange(-k_max, k_max + 1)
    w = omega[..., None] + 2 * math.pi * k
    s = np.sum(L / (L**2 + w**2), axis=-1)
    # tail: sum_{k > K} f(k) ~ int_{K+1/2}^inf f, both sides
    hi = omega + 2 * math.pi * (k_max + 0.5)
    lo = 2 * math.pi * (k_max + 0.5) - omega
    tail = (np.pi / 2 - np.arctan(hi / L) + np.pi / 2 - np.arctan(lo / L)) / (2 * math.pi)
    return p.a**2 * p.theta / (2 * math.pi) * (s + tail)
