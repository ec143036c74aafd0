"""Dickman supOU processes: superpositions of DOU processes with random rates.

With mixing measure pi on (0, inf) and eta^{-1} = int xi^{-1} pi(d xi) finite,

    Y(t) = sum_k a exp(-R_k (t - S_k)) 1{S_k <= t},

where S_k is a Poisson process of rate theta*eta on the real line and R_k are
i.i.d. from pi.  The rate carries the factor eta because the Levy basis is
evaluated on (d xi, eta ds); integrating the shot-noise cumulant shows that
rate theta*eta is what gives the GD(theta, a) marginal for every pi.  (For the
gamma(1+alpha, rate alpha) measure eta = 1 and the two rates coincide.)

The correlation is r(tau) = eta int xi^{-1} e^{-tau xi} pi(d xi); the process
has long memory iff int xi^{-2} pi(d xi) is infinite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .distribution import DickmanParams
from .dou import GridPath, _poisson_times
from .errors import ParameterError

#: Past shots whose remaining amplitude factor is below exp(-PAST_U_MAX) are dropped.
PAST_U_MAX = 40.0

#: Refuse explicit past windows holding more shots than this on average.
MAX_EXPECTED_SHOTS = 5e7


class EtaUndefinedError(ParameterError):
    """int xi^{-1} pi(d xi) is infinite, so no supOU process exists."""


class Memory(enum.Enum):
    SHORT = "short"
    LONG = "long"


def poisson_triplet(p: DickmanParams):
    """Levy-Khintchine triplet (b, sigma^2, mu) of the Poisson driver, truncation on [-1, 1].

    mu is returned as {jump size: mass}.
    """
    b = p.a * p.theta if p.a <= 1 else 0.0
    return b, 0.0, {p.a: p.theta}


class PiMeasure:
    """Mixing measure for the mean-reversion rate."""

    def inv_moment(self, k: int) -> float:
        """int xi^{-k} pi(d xi) (may be inf)."""
        raise NotImplementedError

    def laplace_inv1(self, tau) -> np.ndarray:
        """int xi^{-1} e^{-tau xi} pi(d xi)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def sample_size_biased(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draws from eta * xi^{-1} pi(d xi)."""
        raise NotImplementedError

    @property
    def eta(self) -> float:
        m = self.inv_moment(1)
        if not math.isfinite(m):
            raise EtaUndefinedError(f"eta undefined for {self!r}: int xi^-1 pi(d xi) = inf")
        return 1.0 / m


@dataclass(frozen=True)
class Degenerate(PiMeasure):
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("rate must be positive")

    def inv_moment(self, k):
        return self.lam ** (-k)

    def laplace_inv1(self, tau):
        return np.exp(-self.lam * np.asarray(tau, dtype=float)) / self.lam

    def sample(self, rng, n):
        return np.full(n, self.lam)

    def sample_size_biased(self, rng, n):
        return np.full(n, self.lam)


@dataclass(frozen=True)
class Discrete(PiMeasure):
    rates: tuple
    weights: tuple

    def __post_init__(self):
        r = np.asarray(self.rates, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if r.shape != w.shape or r.ndim != 1 or r.size == 0:
            raise ParameterError("rates and weights must be 1-d sequences of equal length")
        if np.any(r <= 0) or np.any(w <= 0):
            raise ParameterError("rates and weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ParameterError(f"weights must sum to 1, got {w.sum()!r}")
        object.__setattr__(self, "rates", tuple(float(v) for v in r))
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @classmethod
    def from_pairs(cls, pairs):
        rates, weights = zip(*pairs)
        return cls(rates, weights)

    def inv_moment(self, k):
        r, w = np.array(self.rates), np.array(self.weights)
        return float(np.sum(w * r ** (-k)))

    def laplace_inv1(self, tau):
        r, w = np.array(self.rates), np.array(self.weights)
        tau = np.asarray(tau, dtype=float)
        return np.sum(w / r * np.exp(-np.multiply.outer(tau, r)), axis=-1)

    def sample(self, rng, n):
        return rng.choice(np.array(self.rates), size=n, p=np.array(self.weights))

    def sample_size_biased(self, rng, n):
        r, w = np.array(self.rates), np.array(self.weights)
        q = w / r
        return rng.choice(r, size=n, p=q / q.sum())


@dataclass(frozen=True)
class GammaShapeRate(PiMeasure):
    """Gamma(shape, rate) with density rate^shape xi^(shape-1) e^{-rate xi} / Gamma(shape).

    In the (1+alpha, beta) parametrisation, shape = 1 + alpha and rate = beta.
    """

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ParameterError("gamma shape and rate must be positive")

    @classmethod
    def from_alpha_beta(cls, alpha: float, beta: float):
        return cls(1.0 + alpha, beta)

    @property
    def alpha(self) -> float:
        return self.shape - 1.0

    def inv_moment(self, k):
        if self.shape <= k:
            return math.inf
        return self.rate**k * math.exp(special.gammaln(self.shape - k) - special.gammaln(self.shape))

    def laplace_inv1(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.inv_moment(1) * (1.0 + tau / self.rate) ** (-(self.shape - 1.0))

    def sample(self, rng, n):
        return rng.gamma(self.shape, 1.0 / self.rate, n)

    def sample_size_biased(self, rng, n):
        if self.shape <= 1:
            raise EtaUndefinedError("size-biased law needs shape > 1")
        return rng.gamma(self.shape - 1.0, 1.0 / self.rate, n)


def eta(pi: PiMeasure) -> float:
    """eta = (int xi^{-1} pi(d xi))^{-1}."""
    return pi.eta


def supou_correlation(pi: PiMeasure, tau):
    """r(tau) = eta int xi^{-1} e^{-tau xi} pi(d xi)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ParameterError("tau must be nonnegative")
    out = pi.eta * pi.laplace_inv1(tau)
    return float(out) if out.ndim == 0 else out


def memory_classification(pi: PiMeasure) -> Memory:
    pi.eta  # raises when eta is undefined
    return Memory.LONG if math.isinf(pi.inv_moment(2)) else Memory.SHORT


def truncation_bias(p: DickmanParams, pi: PiMeasure, t_min: float) -> float:
    """Expected contribution at time 0 of the shots before t_min: a theta r(|t_min|)."""
    if t_min > 0:
        raise ParameterError("t_min must be <= 0")
    return p.a * p.theta * supou_correlation(pi, abs(t_min))


def auto_t_min(pi: PiMeasure, rel_bias: float = 1e-4) -> float:
    """Most recent t_min < 0 whose truncation bias is at most rel_bias * a * theta."""
    if not 0 < rel_bias < 1:
        raise ParameterError("rel_bias must lie in (0, 1)")
    if isinstance(pi, GammaShapeRate):
        return -pi.rate * (rel_bias ** (-1.0 / pi.alpha) - 1.0)
    if isinstance(pi, Degenerate):
        return -math.log(1.0 / rel_bias) / pi.lam

    def f(t):
        return math.log(supou_correlation(pi, t)) - math.log(rel_bias)

    hi = 1.0
    while f(hi) > 0:
        hi *= 2.0
    return -optimize.brentq(f, 0.0, hi, xtol=1e-10)


@dataclass(frozen=True, eq=False)
class SupOUEventSet:
    """Shots (S_k, R_k) of a supDOU path, sorted by S; every shot has amplitude ``a``."""

    S: np.ndarray
    R: np.ndarray
    t_min: float
    horizon: float
    a: float = 1.0
    n_past: int = 0  # shots drawn before t_min from the stationary past

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        R = np.asarray(self.R, dtype=float)
        if S.shape != R.shape:
            raise ParameterError("S and R must have the same length")
        if S.size and np.any(np.diff(S) < 0):
            raise ParameterError("S must be sorted")
        if np.any(R <= 0):
            raise ParameterError("R must be positive")
        S.flags.writeable = False
        R.flags.writeable = False
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "R", R)

    @property
    def arrivals(self):
        return list(zip(self.S.tolist(), self.R.tolist()))

    def value(self, t, chunk: int = 4_000_000):
        """Y(t) = sum_{S_k <= t} a exp(-R_k (t - S_k))."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.size)
        if self.S.size == 0:
            return out
        rows = max(1, chunk // max(1, t.size))
        for lo in range(0, self.S.size, rows):
            S = self.S[lo:lo + rows, None]
            R = self.R[lo:lo + rows, None]
            lag = t[None, :] - S
            contrib = np.exp(-R * np.maximum(lag, 0.0))
            contrib[lag < 0] = 0.0
            out += contrib.sum(axis=0)
        return self.a * out

    def integral(self, t, chunk: int = 4_000_000):
        """int_0^t Y(u) du for t >= 0, shot by shot in closed form."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.size)
        rows = max(1, chunk // max(1, t.size))
        for lo in range(0, self.S.size, rows):
            S = self.S[lo:lo + rows, None]
            R = self.R[lo:lo + rows, None]
            start = np.maximum(S, 0.0)  # shot is integrated from max(S, 0)
            length = np.maximum(t[None, :] - start, 0.0)
            # a/R * e^{-R(start-S)} * (1 - e^{-R length}), stable for small R
            contrib = np.exp(-R * (start - S)) * (-np.expm1(-R * length)) / R
            out += contrib.sum(axis=0)
        return self.a * out


def _past_shots(p: DickmanParams, pi: PiMeasure, t_min: float, rng):
    """Stationary shots with S < t_min.

    In coordinates (R, u = R (t_min - S)) the past shots form a Poisson process
    of intensity theta * eta * pi(dR)/R du, whose restriction to u < U has
    finite total mass theta * U, with R size-biased and u uniform.
    """
    n = rng.poisson(p.theta * PAST_U_MAX)
    R = pi.sample_size_biased(rng, n)
    u = PAST_U_MAX * rng.random(n)
    return t_min - u / R, R


def sample_shots(p: DickmanParams, pi: PiMeasure, T: float, rng: np.random.Generator,
                 t_min: float | None = None, past: str = "auto") -> SupOUEventSet:
    """Shots of a supDOU path on [t_min, T].

    past="truncate": only shots in [t_min, T] (t_min defaults to the bias
    1e-4 * a * theta cut).  past="exact": t_min defaults to 0 and the shots
    before t_min are drawn from the stationary past, so the path is stationary
    from t = 0 on whatever t_min is.  past="auto" truncates when t_min is
    given as negative or the default window is affordable, else goes exact.
    """
    if past not in ("auto", "truncate", "exact"):
        raise ParameterError(f"past must be 'auto', 'truncate' or 'exact', got {past!r}")
    if not T > 0:
        raise ParameterError("T must be positive")
    et = pi.eta
    if past == "auto":
        if t_min is not None:
            past = "truncate" if t_min < 0 else "exact"
        else:
            t_auto = auto_t_min(pi)
            past = "truncate" if p.theta * et * (T - t_auto) <= MAX_EXPECTED_SHOTS else "exact"
            t_min = t_auto if past == "truncate" else None
    if t_min is None:
        t_min = auto_t_min(pi) if past == "truncate" else 0.0
    if t_min > 0 or (past == "truncate" and t_min >= 0):
        raise ParameterError(f"t_min must be negative (<= 0 with past='exact'), got {t_min}")
    rate = p.theta * et
    if rate * (T - t_min) > MAX_EXPECTED_SHOTS:
        raise ParameterError(
            f"window [{t_min:.3g}, {T}] holds ~{rate * (T - t_min):.3g} shots; use past='exact' or a later t_min"
        )
    S = t_min + _poisson_times(rate, T - t_min, rng)
    R = pi.sample(rng, S.size)
    n_past = 0
    if past == "exact":
        Sp, Rp = _past_shots(p, pi, t_min, rng)
        n_past = Sp.size
        S = np.concatenate([Sp, S])
        R = np.concatenate([Rp, R])
        order = np.argsort(S, kind="stable")
        S, R = S[order], R[order]
    return SupOUEventSet(S=S, R=R, t_min=float(t_min), horizon=float(T), a=p.a, n_past=n_past)


def simulate_supdou(p: DickmanParams, pi: PiMeasure, T: float, dt: float, rng: np.random.Generator,
                    t_min: float | None = None, past: str = "auto"):
    """supDOU path on the grid 0, dt, ..., (n-1) dt with n = 1 + ceil(T/dt).

    Returns the shot set and the grid path.  Shots arrive at rate theta*eta
    with i.i.d. rates from ``pi``; see ``sample_shots`` for ``t_min``/``past``.
    """
    if not 0 < dt <= T:
        raise ParameterError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    shots = sample_shots(p, pi, T, rng, t_min=t_min, past=past)
    n = 1 + int(math.ceil(T / dt - 1e-9))
    grid = GridPath(dt=dt, values=shots.value(dt * np.arange(n)), t0=0.0)
    return shots, grid


def discrete_component_thetas(p: DickmanParams, pi: Discrete) -> np.ndarray:
    """theta_j = eta p_j theta / lambda_j of the equivalent independent DOU components."""
    r, w = np.array(pi.rates), np.array(pi.weights)
    return pi.eta * w / r * p.theta


def simulate_discrete_superposition(p: DickmanParams, pi: Discrete, T: float, dt: float,
                                    rng: np.random.Generator) -> GridPath:
    """Same law as a discrete-pi supDOU: sum of independent DOU(theta_j, a, lambda_j)."""
    from .dou import simulate_exact

    n = 1 + int(math.ceil(T / dt - 1e-9))
    grid = dt * np.arange(n)
    total = np.zeros(n)
    for th, lam in zip(discrete_component_thetas(p, pi), pi.rates):
        total += simulate_exact(DickmanParams(th, p.a), lam, T, rng).value(grid)
    return GridPath(dt=dt, values=total, t0=0.0)
