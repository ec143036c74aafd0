"""The generalized Dickman law GD(theta, a).

GD(theta, a) is the law of D solving D = U**(1/theta) * (a + D) in
distribution, U uniform on (0, 1].  Its density is

    f(x) = exp(-gamma*theta) / (a*Gamma(theta)) * rho_theta(x/a),   x > 0,

where rho_theta solves the delay equation

    rho(x) = x**(theta-1)                              on (0, 1],
    x*rho'(x) + (1-theta)*rho(x) + theta*rho(x-1) = 0  for x > 1.

The module provides the density by two independent routes (a
method-of-steps table and an integral recurrence), the CDF, the Laplace
transform through the modified exponential integral Ein, cumulants, and two
samplers (Poisson-arrival series and Vervaat perpetuity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize, special

from .errors import ParameterError, QuadratureError

EULER_GAMMA = 0.57721566490153286061

#: Ein switches from its alternating series to quadrature above this point.
EIN_SWITCH = 10.0

DEFAULT_STEP = 1e-3
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class DickmanParams:
    """Shape ``theta`` (Poisson rate of the jumps) and scale ``a``."""

    theta: float
    a: float = 1.0

    def __post_init__(self):
        for name in ("theta", "a"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be a positive finite number, got {v!r}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "a", float(self.a))

    @property
    def mean(self) -> float:
        return self.a * self.theta

    @property
    def variance(self) -> float:
        return self.a**2 * self.theta / 2.0

    @property
    def norm_const(self) -> float:
        """exp(-gamma*theta)/Gamma(theta), the density constant at a = 1."""
        return math.exp(-EULER_GAMMA * self.theta - special.gammaln(self.theta))


def make_params(theta: float, a: float = 1.0) -> DickmanParams:
    return DickmanParams(theta, a)


# ---------------------------------------------------------------------------
# Transform and cumulants


def _ein_series(z: float) -> float:
    # alternating series, stopped once the next term is below the float floor
    total, term, k = 0.0, 1.0, 0
    while True:
        k += 1
        term *= z / k  # z**k / k!
        contrib = term / k
        total += contrib if k % 2 else -contrib
        if contrib < 1e-17 * max(1.0, abs(total)) and k > z:
            return total


def ein(z: float) -> float:
    """Modified exponential integral Ein(z) = int_0^z (1 - e^-u)/u du, z >= 0."""
    z = float(z)
    if not z >= 0:
        raise ParameterError(f"ein requires z >= 0, got {z}")
    if z <= EIN_SWITCH:
        return _ein_series(z)
    tail, _ = integrate.quad(lambda u: -math.expm1(-u) / u, EIN_SWITCH, z, epsabs=1e-13, epsrel=1e-13, limit=200)
    return _ein_series(EIN_SWITCH) + tail


def laplace_transform(p: DickmanParams, s: float) -> float:
    """E exp(-s D) = exp(-theta * Ein(a s))."""
    if not s >= 0:
        raise ParameterError(f"laplace_transform requires s >= 0, got {s}")
    return math.exp(-p.theta * ein(p.a * s))


def cumulant(p: DickmanParams, k: int) -> float:
    """k-th cumulant a**k * theta / k."""
    if int(k) != k or k < 1:
        raise ParameterError(f"cumulant order must be a positive integer, got {k!r}")
    return p.a**k * p.theta / k


def mean(p: DickmanParams) -> float:
    return p.mean


def variance(p: DickmanParams) -> float:
    return p.variance


def tail_bound(p: DickmanParams, x: float) -> float:
    """Chernoff bound on P(D > x) from the moment generating function.

    log E e^{sD} = theta * sum_k (a s)^k / (k k!) = theta*(Ei(as) - log(as) - gamma),
    minimised over s > 0.  The minimiser solves theta*(e^{as} - 1) = x*s.
    """
    if x <= p.mean:
        return 1.0

    def grad(s):
        return p.theta * math.expm1(p.a * s) / s - x

    hi = 1.0 / p.a
    while grad(hi) < 0:
        hi *= 2.0
    s = optimize.brentq(grad, 1e-12 / p.a, hi, xtol=1e-14)
    z = p.a * s
    log_mgf = p.theta * (special.expi(z) - math.log(z) - EULER_GAMMA)
    return min(1.0, math.exp(log_mgf - s * x))


# ---------------------------------------------------------------------------
# Delay-equation solution


def _rho_first(x, theta):
    """Closed form of rho_theta on (0, 2].

    On (1, 2]:  rho(x) = x^(theta-1) * (1 - theta * sum_n w^(theta+n)/(theta+n)),
    w = 1 - 1/x <= 1/2, from integrating the delay equation once.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    low = (x > 0) & (x <= 1)
    out[low] = x[low] ** (theta - 1.0)
    mid = x > 1
    if np.any(mid):
        xm = x[mid]
        w = 1.0 - 1.0 / xm
        s = np.zeros_like(xm)
        wn = w**theta
        for n in range(80):  # w <= 1/2, 80 terms reach 1e-24
            s += wn / (theta + n)
            wn = wn * w
        out[mid] = xm ** (theta - 1.0) * (1.0 - theta * s)
    return out


def _mid_interp(v, j):
    """Value halfway between nodes j and j+1 by 4-point Lagrange interpolation."""
    return (-v[j - 1] + 9.0 * v[j] + 9.0 * v[j + 1] - v[j + 2]) / 16.0


@dataclass(frozen=True, eq=False)
class RhoTable:
    """rho_theta on the grid k*step, k = 1..len(values)."""

    theta: float
    step: float
    x_max: float
    values: np.ndarray = field(repr=False)

    @property
    def per_unit(self) -> int:
        return int(round(1.0 / self.step))

    @property
    def grid(self) -> np.ndarray:
        return self.step * np.arange(1, len(self.values) + 1)

    def __call__(self, x):
        """rho_theta(x): exact on (0, 1], 4-point Lagrange interpolation above."""
        x = np.asarray(x, dtype=float)
        if np.any(x > self.x_max * (1 + 1e-12)):
            raise ParameterError(f"x = {x.max()} beyond table x_max = {self.x_max}")
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = _rho_first(np.minimum(x, 1.0), self.theta) * (x > 0)
        hi = x > 1
        if np.any(hi):
            out[hi] = self._interp(x[hi])
        return out[0] if scalar else out

    def _interp(self, x):
        # node k*h is values[k-1]; prepend the node at 0 so v[k] = rho(k h)
        v = self._padded
        h = self.step
        u = x / h
        j = np.clip(np.floor(u).astype(int), 1, len(self.values) - 2)
        s = u - j
        f0, f1, f2, f3 = v[j - 1], v[j], v[j + 1], v[j + 2]
        return (
            -s * (s - 1) * (s - 2) / 6 * f0
            + (s + 1) * (s - 1) * (s - 2) / 2 * f1
            - (s + 1) * s * (s - 2) / 2 * f2
            + (s + 1) * s * (s - 1) / 6 * f3
        )

    @property
    def _padded(self):
        cached = self.__dict__.get("_padded_cache")
        if cached is None:
            # rho at node 0 only enters stencils for x in (1, 1+h) when h = 1,
            # which the step bound excludes; keep it finite.
            cached = np.concatenate(([0.0], self.values, [self.values[-1]]))
            object.__setattr__(self, "_padded_cache", cached)
        return cached

    def integral(self, u):
        """int_0^u rho_theta, Simpson on the grid above 1 (u beyond 1 must be in the table)."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        out = np.where(u > 0, np.maximum(np.minimum(u, 1.0), 0.0) ** self.theta / self.theta, 0.0)
        hi = u > 1
        if np.any(hi):
            cum = self._cumulative
            n1 = self.per_unit
            h = self.step
            uh = u[hi]
            # last even offset node from 1 that does not pass u
            m = np.floor((uh / h - n1) / 2.0).astype(int) * 2
            m = np.clip(m, 0, len(cum) * 2 - 2)
            base = 1.0 + m * h
            rem = uh - base
            mid = self(base + rem / 2)
            end = self(uh)
            start = self.values[n1 + m - 1]
            out[hi] = out[hi] + cum[m // 2] + rem / 6.0 * (start + 4 * mid + end)
        return out[0] if scalar else out

    @property
    def _cumulative(self):
        cached = self.__dict__.get("_cum_cache")
        if cached is None:
            n1 = self.per_unit
            v = self.values[n1 - 1:]  # rho at 1, 1+h, ...
            npairs = (len(v) - 1) // 2
            pair = self.step / 3.0 * (v[0:2 * npairs:2] + 4 * v[1:2 * npairs:2] + v[2:2 * npairs + 1:2])
            cached = np.concatenate(([0.0], np.cumsum(pair)))
            object.__setattr__(self, "_cum_cache", cached)
        return cached


def _rk4_interval(theta, x0, rho0, h, nsteps, d0, dmid, d1):
    """Advance rho' = ((theta-1) rho - theta d(x-1)) / x over nsteps RK4 steps.

    d0, dmid, d1 hold the delayed values at the left node, midpoint and right
    node of each step.
    """
    out = np.empty(nsteps)
    x, r = x0, rho0
    tm1 = theta - 1.0
    for i in range(nsteps):
        xm = x + 0.5 * h
        x1 = x + h
        k1 = (tm1 * r - theta * d0[i]) / x
        k2 = (tm1 * (r + 0.5 * h * k1) - theta * dmid[i]) / xm
        k3 = (tm1 * (r + 0.5 * h * k2) - theta * dmid[i]) / xm
        k4 = (tm1 * (r + h * k3) - theta * d1[i]) / x1
        r = r + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        x = x1
        out[i] = r
    return out


#: Grid steps at the start of (2, 3] that are sub-stepped; the delayed term
#: there has a (x-2)^theta cusp that a plain RK4 step resolves poorly.
_CUSP_STEPS = 40
_CUSP_SUB = 64


def rho_solve(theta: float, x_max: float = 30.0, step: float = DEFAULT_STEP) -> RhoTable:
    """Tabulate rho_theta on (0, x_max] by the method of steps.

    (0, 1] and (1, 2] are filled from closed forms; each later unit interval
    is advanced with classical RK4, reading the delayed term one unit behind
    (exactly below 2, by cubic interpolation of the stored table above).
    The step is snapped so that 1/step is an even integer.
    """
    theta = float(theta)
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if not x_max >= 1:
        raise ParameterError(f"x_max must be >= 1, got {x_max}")
    if not 0 < step <= 0.01:
        raise ParameterError(f"step must lie in (0, 0.01], got {step}")
    n1 = int(math.ceil(1.0 / step - 1e-9))
    n1 += n1 % 2
    h = 1.0 / n1
    units = int(math.ceil(x_max - 1e-12))
    n_total = units * n1
    v = np.empty(n_total)
    grid = h * np.arange(1, min(n_total, 2 * n1) + 1)
    v[: len(grid)] = _rho_first(grid, theta)

    for m in range(2, units):
        # nodes m*n1 .. (m+1)*n1 ; v[k-1] = rho(k h)
        start = m * n1
        k = np.arange(start, start + n1)  # left node index of each step
        if m == 2:
            left = k * h - 1.0
            d0 = _rho_first(left, theta)
            dmid = _rho_first(left + 0.5 * h, theta)
            d1 = _rho_first(left + h, theta)
        else:
            padded = np.concatenate(([0.0], v))
            j = k - n1
            d0 = padded[j]
            d1 = padded[j + 1]
            dmid = np.empty(n1)
            dmid[:-1] = _mid_interp(padded, j[:-1])
            # last step: node j+2 lies in the interval being solved, shift the stencil left
            jl = j[-1]
            dmid[-1] = (padded[jl - 2] - 5 * padded[jl - 1] + 15 * padded[jl] + 5 * padded[jl + 1]) / 16.0
        rho0 = v[start - 1]
        if m == 2:
            hs = h / _CUSP_SUB
            ns = _CUSP_STEPS * _CUSP_SUB
            left = 1.0 + hs * np.arange(ns)
            fine = _rk4_interval(
                theta, 2.0, rho0, hs, ns,
                _rho_first(left, theta), _rho_first(left + 0.5 * hs, theta), _rho_first(left + hs, theta),
            )
            v[start:start + _CUSP_STEPS] = fine[_CUSP_SUB - 1::_CUSP_SUB]
            s = _CUSP_STEPS
            v[start + s:start + n1] = _rk4_interval(
                theta, (start + s) * h, v[start + s - 1], h, n1 - s, d0[s:], dmid[s:], d1[s:]
            )
        else:
            v[start:start + n1] = _rk4_interval(theta, start * h, rho0, h, n1, d0, dmid, d1)
    np.maximum(v, 0.0, out=v)
    return RhoTable(theta=theta, step=h, x_max=units * 1.0, values=v)


@lru_cache(maxsize=32)
def default_table(theta: float, x_max: float = 30.0, step: float = DEFAULT_STEP) -> RhoTable:
    """Cached rho table, shared by the convenience paths of pdf/cdf."""
    return rho_solve(theta, x_max, step)


def _table_for(p: DickmanParams, x, table):
    need = float(np.max(np.asarray(x, dtype=float))) / p.a
    if table is None:
        return default_table(p.theta, max(30.0, math.ceil(need)))
    if not math.isclose(table.theta, p.theta, rel_tol=0, abs_tol=1e-14):
        raise ParameterError(f"table built for theta={table.theta}, params have theta={p.theta}")
    if need > table.x_max * (1 + 1e-12):
        raise ParameterError(f"x/a = {need} exceeds table x_max = {table.x_max}")
    return table


# ---------------------------------------------------------------------------
# Density and CDF


class DensityEval(NamedTuple):
    x: float
    pdf: float
    method: str  # "dde" or "recurrence"


def pdf(p: DickmanParams, x, table: RhoTable | None = None):
    """Density of GD(theta, a) from a rho table (built and cached when omitted).

    On (0, a] the exact branch is used, so theta < 1 gives the true singular value.
    """
    x = np.asarray(x, dtype=float)
    table = _table_for(p, x, table)
    u = x / p.a
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = p.norm_const / p.a * np.asarray(table(u[pos]))
    return out[()] if out.ndim == 0 else out


def _recurrence_unit(theta: float, u: float, tol: float) -> float:
    """f_{theta,1}(u), u <= 3, from the integral recurrence with adaptive quadrature."""
    c = math.exp(-EULER_GAMMA * theta - special.gammaln(theta))
    if u <= 0:
        return 0.0
    if u <= 1:
        return c * u ** (theta - 1.0)

    def quad(fun, lo, hi, **kw):
        val, err, info = integrate.quad(fun, lo, hi, epsabs=tol, epsrel=1e-13, limit=200, full_output=1, **kw)[:3]
        if err > max(tol, 1e-13 * abs(val)) * 10:
            raise QuadratureError(f"recurrence integral on ({lo}, {hi}) did not converge", err)
        return val

    def correction(b):
        # int_0^b f(z)/(1+z)^theta dz, b <= 2; z^(theta-1) singularity handled by QAWS
        head = c * quad(lambda z: (1.0 + z) ** -theta, 0.0, min(b, 1.0), weight="alg", wvar=(theta - 1.0, 0.0))
        if b <= 1:
            return head
        return head + quad(lambda z: _recurrence_unit(theta, z, tol) / (1.0 + z) ** theta, 1.0, b)

    return u ** (theta - 1.0) * (c - theta * correction(u - 1.0))


def pdf_recurrence(p: DickmanParams, x, quad_tol: float = 1e-11):
    """Density from the integral recurrence on (0, 3a]; beyond 3a delegates to pdf."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    flat = out.reshape(-1)
    for i, xi in enumerate(x.reshape(-1)):
        u = xi / p.a
        if u <= 3.0:
            flat[i] = _recurrence_unit(p.theta, u, quad_tol) / p.a
        else:
            flat[i] = pdf(p, xi)
    return out[()] if out.ndim == 0 else out


def density(p: DickmanParams, x: float, method: str = "dde", table: RhoTable | None = None) -> DensityEval:
    if method == "dde":
        return DensityEval(float(x), float(pdf(p, x, table)), "dde")
    if method == "recurrence":
        return DensityEval(float(x), float(pdf_recurrence(p, x)), "recurrence")
    raise ParameterError(f"unknown density method {method!r}")


def cdf(p: DickmanParams, x, table: RhoTable | None = None):
    """P(D <= x) by Simpson integration of the tabulated density, clamped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    table = _table_for(p, np.maximum(x, 0.0), table)
    val = p.norm_const * np.asarray(table.integral(x / p.a))
    out = np.clip(val, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Samplers


def _uniform_01(rng, n):
    # (0, 1] rather than numpy's [0, 1)
    return 1.0 - rng.random(n)


def sample_arrivals(p: DickmanParams, rng: np.random.Generator, tol: float = DEFAULT_TOL, size=None):
    """GD(theta, a) draws as a * sum_n exp(-T_n), T_n Poisson arrivals of rate theta.

    Terms are accumulated until the expected remaining tail theta*exp(-T_n)
    of the unit-scale series drops below ``tol``; the result is then scaled
    by a, so draws for (theta, a) are exactly a times those for (theta, 1).
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    n = 1 if size is None else int(np.prod(size))
    t = np.zeros(n)
    out = np.zeros(n)
    active = np.arange(n)
    scale = 1.0 / p.theta
    while active.size:
        t[active] += rng.exponential(scale, active.size)
        term = np.exp(-t[active])
        out[active] += term
        active = active[p.theta * term >= tol]
    out *= p.a
    return float(out[0]) if size is None else out.reshape(size)


def sample_perpetuity(p: DickmanParams, rng: np.random.Generator, tol: float = DEFAULT_TOL, size=None):
    """GD(theta, a) draws from the perpetuity a*U1^(1/theta) + a*(U1 U2)^(1/theta) + ...

    Stops once theta * P_n < tol for the unit-scale prefactor P_n = (U1...Un)^(1/theta).
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    n = 1 if size is None else int(np.prod(size))
    logp = np.zeros(n)
    out = np.zeros(n)
    active = np.arange(n)
    inv = 1.0 / p.theta
    while active.size:
        logp[active] += inv * np.log(_uniform_01(rng, active.size))
        term = np.exp(logp[active])
        out[active] += term
        active = active[p.theta * term >= tol]
    out *= p.a
    return float(out[0]) if size is None else out.reshape(size)


def sample(p: DickmanParams, rng: np.random.Generator, size=None, method: str = "arrivals", tol: float = DEFAULT_TOL):
    if method == "arrivals":
        return sample_arrivals(p, rng, tol, size)
    if method == "perpetuity":
        return sample_perpetuity(p, rng, tol, size)
    raise ParameterError(f"unknown sampler {method!r}")
