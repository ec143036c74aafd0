"""Acceptance checks: each criterion simulates, estimates and compares with a closed form.

A criterion returns a ``CriterionResult`` made of named ``Check`` rows.  All
randomness of criterion ``i`` comes from SeedSequence([seed, i]), so a subset
run reproduces the numbers of the full run.
"""

from __future__ import annotations

import io
import json
import math
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache

import numpy as np

from . import asymptotics as asy
from . import distribution as dd
from . import dou, driven, stats, supou
from .distribution import EULER_GAMMA, DickmanParams
from .errors import ParameterError
from .rng import make_rng, spawn_rngs

SCHEMA = "dickman-verify/1"
DEFAULT_SEED = 20240607


@dataclass(frozen=True)
class Tolerances:
    se_k: float = 4.0  # estimates must lie within se_k standard errors
    ks_c: float = stats.KS_C_1PCT  # sqrt(n) KS critical constant (1% level)
    chi2_alpha: float = 0.01
    density_abs: float = 1e-6
    norm_abs: float = 1e-4
    fclt_rel: float = 0.10
    stable_abs: float = 0.07
    tau2_abs: float = 0.10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"tolerance {f.name} must be positive, got {v!r}")
        if not self.chi2_alpha < 1:
            raise ParameterError("chi2_alpha must be below 1")


@dataclass
class Check:
    name: str
    estimate: float
    target: float
    tolerance: float
    passed: bool


@dataclass
class CriterionResult:
    id: int
    name: str
    group: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def line(self) -> str:
        bad = [c.name for c in self.checks if not c.passed]
        tail = "" if not bad else "  failed: " + ", ".join(bad)
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id:2d} {self.name} ({self.seconds:.1f}s){tail}"


class _Recorder:
    def __init__(self, tol: Tolerances):
        self.tol = tol
        self.checks = []

    def add(self, name, estimate, target, tolerance, passed):
        self.checks.append(Check(name, float(estimate), float(target), float(tolerance), bool(passed)))

    def se(self, name, estimate, se, target):
        tol = self.tol.se_k * se
        self.add(name, estimate, target, tol, abs(estimate - target) <= tol)

    def absolute(self, name, estimate, target, tol):
        self.add(name, estimate, target, tol, abs(estimate - target) <= tol)

    def ks(self, name, sample, cdf):
        d, crit = stats.ks_distance(sample, cdf)
        crit *= self.tol.ks_c / stats.KS_C_1PCT
        self.add(name, d, 0.0, crit, d <= crit)

    def ks2(self, name, x, y):
        d, crit = stats.ks_two_sample(x, y)
        crit *= self.tol.ks_c / stats.KS_C_1PCT
        self.add(name, d, 0.0, crit, d <= crit)

    def agree(self, name, e1, s1, e2, s2):
        # difference of two independent estimates
        self.se(name, e1 - e2, math.hypot(s1, s2), 0.0)


def _var_known_mean(x, mu):
    return stats.mean_with_se((np.asarray(x) - mu) ** 2)


def _lag_cov(x, y, mu):
    return stats.mean_with_se((np.asarray(x) - mu) * (np.asarray(y) - mu))


# ---------------------------------------------------------------------------
# dickman_dist


def c1_density(rec: _Recorder, seed: int):
    grid = np.array([0.25, 0.75, 1.3, 1.9, 2.5])
    worst = 0.0
    for theta in (0.5, 1.0, 2.0, 3.0):
        for a in (1.0, 2.0):
            p = DickmanParams(theta, a)
            x = grid * a
            worst = max(worst, float(np.max(np.abs(dd.pdf(p, x) - dd.pdf_recurrence(p, x)))))
    rec.absolute("max |pdf - pdf_recurrence|", worst, 0.0, rec.tol.density_abs)
    p = DickmanParams(1.0, 1.0)
    eg = math.exp(-EULER_GAMMA)
    flat = dd.pdf(p, np.array([0.1, 0.5, 0.9, 1.0]))
    rec.absolute("f_{1,1} on (0,1] = e^-gamma", flat[np.argmax(np.abs(flat - eg))], eg, rec.tol.density_abs)
    rec.absolute("f_{1,1}(2) = e^-gamma (1 - ln 2)", dd.pdf(p, 2.0), eg * (1 - math.log(2)), rec.tol.density_abs)


def c2_normalization(rec: _Recorder, seed: int):
    for theta in (0.5, 0.9, 1.0, 1.2, 2.0, 3.0):
        for a in (1.0, 2.0):
            p = DickmanParams(theta, a)
            mass = p.norm_const * float(dd.default_table(theta).integral(30.0))
            rec.add(f"mass(0, 30a] theta={theta} a={a}", mass, 1.0, rec.tol.norm_abs, mass >= 1 - rec.tol.norm_abs)


def c3_samplers(rec: _Recorder, seed: int):
    rng = make_rng(seed, 3)
    for method in ("arrivals", "perpetuity"):
        for theta, a in ((1.0, 1.0), (0.5, 2.0), (3.0, 1.0)):
            p = DickmanParams(theta, a)
            x = dd.sample(p, rng, size=100_000, method=method)
            rec.ks(f"{method} KS theta={theta} a={a}", x, lambda v, p=p: dd.cdf(p, v))
        p = DickmanParams(3.0, 1.0)
        s = stats.empirical_cumulants(dd.sample(p, rng, size=1_000_000, method=method), rng=rng)
        for k in (1, 2, 3):
            rec.se(f"{method} k{k} theta=3", s.kstats[k - 1], s.stderr[k - 1], dd.cumulant(p, k))


def c4_laplace(rec: _Recorder, seed: int):
    rng = make_rng(seed, 4)
    for method in ("arrivals", "perpetuity"):
        for theta, a in ((1.0, 1.0), (2.0, 0.5)):
            p = DickmanParams(theta, a)
            x = dd.sample(p, rng, size=1_000_000, method=method)
            for s in (0.5, 1.0, 2.0):
                est, se = stats.empirical_laplace(x, s)
                rec.se(f"{method} E exp(-{s} D) theta={theta} a={a}", est, se, dd.laplace_transform(p, s))


def c5_convolution(rec: _Recorder, seed: int):
    rng = make_rng(seed, 5)
    for a in (1.0, 2.0):
        x = dd.sample(DickmanParams(1.0, a), rng, size=100_000) + dd.sample(DickmanParams(2.0, a), rng, size=100_000)
        p3 = DickmanParams(3.0, a)
        rec.ks(f"GD(1,a)+GD(2,a) vs GD(3,a), a={a}", x, lambda v: dd.cdf(p3, v))


# ---------------------------------------------------------------------------
# dou


def c6_dou(rec: _Recorder, seed: int):
    p, lam, T, dt = DickmanParams(3.0, 1.0), 1.0, 50.0, 0.5
    grid = dt * np.arange(int(T / dt) + 1)
    paths = np.array([dou.simulate_exact(p, lam, T, r).value(grid) for r in spawn_rngs(seed, 500, 6)])
    marg = paths[:, ::20].ravel()  # t = 0, 10, ..., 50; correlation e^-10 between them
    rec.ks("marginal vs GD(3,1)", marg, lambda v: dd.cdf(p, v))
    taus = np.array([0.5, 1.0, 2.0])
    lags = np.rint(taus / dt).astype(int)
    r, rse = stats.ensemble_acf(paths, lags, p.mean)
    g, gse = stats.ensemble_autocov(paths, lags, p.mean)
    for i, tau in enumerate(taus):
        rec.se(f"acf({tau})", r[i], rse[i], dou.correlation(lam, tau))
        rec.se(f"autocov({tau})", g[i], gse[i], dou.covariance(p, lam, tau))


def c7_transition(rec: _Recorder, seed: int):
    rng = make_rng(seed, 7)
    p, lam, x, t = DickmanParams(3.0, 1.0), 1.0, 5.0, 0.7
    y = dou.transition_sample(p, lam, x, t, rng, size=1_000_000)
    e = math.exp(-lam * t)
    m, se = stats.mean_with_se(y)
    rec.se("conditional mean", m, se, e * x + p.a * p.theta * (1 - e))
    # with no jump the output is exactly e^{-lam t} x
    z = (y == e * x).astype(float)
    q, qse = stats.mean_with_se(z)
    rec.se("zero-jump frequency", q, qse, math.exp(-p.theta * lam * t))
    s = 0.3
    mid = dou.transition_sample(p, lam, x, s, rng, size=100_000)
    two = dou.transition_sample(p, lam, mid, t - s, rng, size=100_000)
    one = dou.transition_sample(p, lam, x, t, rng, size=100_000)
    rec.ks2("semigroup P_s P_{t-s} = P_t", two, one)


def c8_ar1(rec: _Recorder, seed: int):
    rng = make_rng(seed, 8)
    p = DickmanParams(3.0, 1.0)
    for c in (0.5, math.exp(-1.0)):
        m, se = stats.mean_with_se(dou.ar1_innovation(p, c, rng, size=1_000_000))
        rec.se(f"innovation mean c={c:.4g}", m, se, p.a * p.theta * (1 - c))
    c = 0.5
    x = dou.ar1_simulate(p, c, 400_000, rng).values
    prod = (x[:-1] - p.mean) * (x[1:] - p.mean)
    batches = prod[: prod.size // 1000 * 1000].reshape(-1, 1000).mean(axis=1)
    m, se = stats.mean_with_se(batches)
    rec.se("lag-1 autocovariance (batch means)", m, se, dou.ar1_covariance(p, c, 1))
    rec.ks("marginal (every 25th step)", x[::25], lambda v: dd.cdf(p, v))


# ---------------------------------------------------------------------------
# driven_variants


def _driven_summary(simulate, n_paths, seed, key):
    times = np.array([0.0, 1.0, 20.0, 21.0, 40.0, 41.0])
    vals = np.array([simulate(r).value(times) for r in spawn_rngs(seed, n_paths, key)])
    return vals[:, 0::2].ravel(), vals[:, 1::2].ravel()


def _driven_checks(rec, label, x, x1, mean, var, cov1):
    m, mse = stats.mean_with_se(x)
    v, vse = _var_known_mean(x, mean)
    g, gse = _lag_cov(x, x1, mean)
    rec.se(f"{label} mean", m, mse, mean)
    rec.se(f"{label} variance", v, vse, var)
    rec.se(f"{label} lag-1 covariance", g, gse, cov1)
    return (m, mse), (v, vse), (g, gse)


def _modes(rec, simulate, mean, var, cov1, seed, cid):
    out = {}
    for j, mode in enumerate(driven.MODES):
        x, x1 = _driven_summary(lambda r: simulate(r, mode), 1000, seed, cid * 10 + j)
        out[mode] = _driven_checks(rec, mode, x, x1, mean, var, cov1)
    for name, a, b in zip(("mean", "variance", "lag-1 covariance"), out["direct"], out["superposition"]):
        rec.agree(f"direct vs superposition {name}", a[0], a[1], b[0], b[1])


def c9_order_k(rec: _Recorder, seed: int):
    p = driven.OrderKParams(theta=2.0, k=3, lam=1.0)
    mean, var = driven.ppk_moments(p)
    _modes(rec, lambda r, mode: driven.simulate_ppk_ou(p, 42.0, r, mode), mean, var, driven.ppk_moments(p, 1.0)[1], seed, 9)


def c10_bell_touchard(rec: _Recorder, seed: int):
    p = driven.BellTouchardParams(alpha=1.0, nu=1.0, lam=1.0)
    mean, var = driven.bt_moments(p)
    _modes(rec, lambda r, mode: driven.simulate_bt_ou(p, 42.0, r, mode), mean, var, driven.bt_moments(p, 1.0)[1], seed, 10)
    rng = make_rng(seed, 10)
    y = driven.sample_zero_truncated_poisson(p.nu, rng, size=100_000)
    support = np.arange(1, y.max() + 1)
    obs = np.bincount(y, minlength=y.max() + 1)[1:]
    stat, crit, _ = stats.chi2_gof(obs, driven.zero_truncated_poisson_pmf(p.nu, support), alpha=rec.tol.chi2_alpha)
    rec.add("mark pmf chi-square", stat, 0.0, crit, stat <= crit)


# ---------------------------------------------------------------------------
# supou


SUPOU_MEASURES = {
    "degenerate": supou.Degenerate(1.0),
    "discrete": supou.Discrete.from_pairs([(1.0, 0.5), (2.0, 0.5)]),
    "gamma(6,5)": supou.GammaShapeRate(6.0, 5.0),
}


def c11_supou(rec: _Recorder, seed: int):
    p, T, dt = DickmanParams(2.0, 1.0), 100.0, 0.5
    taus = np.array([1.0, 5.0])
    lags = np.rint(taus / dt).astype(int)
    for j, (name, pi) in enumerate(SUPOU_MEASURES.items()):
        paths = np.array([supou.simulate_supdou(p, pi, T, dt, r)[1].values for r in spawn_rngs(seed, 400, 11, j)])
        rec.ks(f"{name} marginal vs GD(2,1)", paths[:, ::100].ravel(), lambda v: dd.cdf(p, v))
        r, rse = stats.ensemble_acf(paths, lags, p.mean)
        for i, tau in enumerate(taus):
            rec.se(f"{name} acf({tau})", r[i], rse[i], supou.supou_correlation(pi, tau))
    rec.absolute("gamma alpha=5 beta=5: r(5) = 2^-5", supou.supou_correlation(SUPOU_MEASURES["gamma(6,5)"], 5.0),
                 2.0**-5, 1e-14)


# ---------------------------------------------------------------------------
# asymptotics


STABLE_HORIZONS = 50.0 * 2.0 ** np.arange(6)
N_SCALING_PATHS = 2000


def _dou_ystar(p, lam, horizons, rngs):
    return np.array([asy.integrate_path(dou.simulate_exact(p, lam, horizons[-1], r), p, horizons).ystar[1:]
                     for r in rngs])


def _supou_ystar(p, pi, horizons, rngs):
    return np.array([asy.integrate_path(supou.sample_shots(p, pi, horizons[-1], r, past="exact"), p, horizons).ystar[1:]
                     for r in rngs])


@lru_cache(maxsize=4)
def _long_memory_ystar(seed: int):
    # shared by criteria 13 and 14 (gamma alpha=0.5, beta=1, theta=2, a=1)
    p, pi = DickmanParams(2.0, 1.0), supou.GammaShapeRate.from_alpha_beta(0.5, 1.0)
    return _supou_ystar(p, pi, STABLE_HORIZONS, spawn_rngs(seed, N_SCALING_PATHS, 13))


def c12_fclt(rec: _Recorder, seed: int):
    T = np.array([200.0])
    p, lam = DickmanParams(3.0, 1.0), 1.0
    y = _dou_ystar(p, lam, T, spawn_rngs(seed, 2000, 12, 0))[:, 0]
    target = asy.s_c_squared(p, lam)
    est = float(np.var(y, ddof=1) / T[0])
    rec.add("DOU Var(Y*(T))/T", est, target, rec.tol.fclt_rel * target, abs(est - target) <= rec.tol.fclt_rel * target)
    p2, pi = DickmanParams(2.0, 1.0), supou.GammaShapeRate.from_alpha_beta(5.0, 5.0)
    y = _supou_ystar(p2, pi, T, spawn_rngs(seed, 2000, 12, 1))[:, 0]
    target = asy.fclt_sigma2(pi, p2)
    est = float(np.var(y, ddof=1) / T[0])
    rec.add("gamma(5,5) Var(Y*(T))/T", est, target, rec.tol.fclt_rel * target,
            abs(est - target) <= rec.tol.fclt_rel * target)


def c13_stable(rec: _Recorder, seed: int):
    y = _long_memory_ystar(seed)
    s = asy.scaling_slope(y, STABLE_HORIZONS, 1.0, rng=make_rng(seed, 13, 1))
    rec.absolute("slope log E|Y*(T)| vs log T (alpha=0.5)", s.slope, 1 / 1.5, rec.tol.stable_abs)


def c14_scaling(rec: _Recorder, seed: int):
    p, pi = DickmanParams(2.0, 1.0), supou.GammaShapeRate.from_alpha_beta(5.0, 5.0)
    y = _supou_ystar(p, pi, STABLE_HORIZONS, spawn_rngs(seed, N_SCALING_PATHS, 14))
    s2 = asy.scaling_slope(y, STABLE_HORIZONS, 2.0, rng=make_rng(seed, 14, 1))
    rec.absolute("short memory tau(2) (gamma alpha=5)", s2.slope, asy.tau_theoretical(2.0, 5.0, "short"), rec.tol.tau2_abs)
    yl = np.abs(_long_memory_ystar(seed))
    s1 = asy.scaling_slope(yl, STABLE_HORIZONS, 1.0, n_boot=2)
    rec.absolute("long memory tau(1) (alpha=0.5)", s1.slope, asy.tau_theoretical(1.0, 0.5, "long"), rec.tol.stable_abs)
    # paired bootstrap of tau(3)/3 - tau(1) over paths
    logT = np.log(STABLE_HORIZONS)
    m1, m3 = yl, yl**3
    diff = asy._slope(logT, np.log(m3.mean(0))) / 3 - asy._slope(logT, np.log(m1.mean(0)))
    rng = make_rng(seed, 14, 2)
    boot = []
    for idx in rng.integers(0, yl.shape[0], size=(400, yl.shape[0])):
        boot.append(asy._slope(logT, np.log(m3[idx].mean(0))) / 3 - asy._slope(logT, np.log(m1[idx].mean(0))))
    lo = float(np.quantile(boot, 0.025))
    rec.add("intermittency tau(3)/3 - tau(1) (bootstrap 2.5% quantile > 0)", diff, 0.0, diff - lo, lo > 0)


# ---------------------------------------------------------------------------
# cli


def c15_determinism(rec: _Recorder, seed: int):
    from . import cli

    commands = [
        ["sample", "--theta", "1", "--a", "1", "--n", "1000"],
        ["sample", "--theta", "0.7", "--a", "2", "--n", "500", "--method", "perpetuity"],
        ["simulate", "dou", "--theta", "3", "--a", "1", "--lambda", "1", "--T", "30", "--dt", "0.01"],
        ["simulate", "supdou", "--theta", "2", "--alpha", "0.5", "--T", "20", "--dt", "0.1", "--events-out", "{events}"],
        ["simulate", "ppk-ou", "--theta", "2", "--k", "3", "--T", "20", "--dt", "0.1"],
        ["simulate", "bt-ou", "--alpha", "1", "--nu", "1", "--T", "20", "--dt", "0.1", "--mode", "superposition"],
        ["simulate", "ar1", "--theta", "3", "--a", "1", "--c", "0.5", "--n", "2000"],
        ["pdf-table", "--theta", "0.9", "--a", "1", "--x-max", "5"],
        ["verify", "--only", "1,2", "--quiet"],
    ]
    with tempfile.TemporaryDirectory() as d:
        for i, cmd in enumerate(commands):
            outs = []
            for run in range(2):
                out = os.path.join(d, f"c{i}_{run}.out")
                ev = os.path.join(d, f"c{i}_{run}.events")
                argv = [c.replace("{events}", ev) for c in cmd] + ["--seed", str(seed), "--out", out]
                code = cli.main(argv, stdout=io.StringIO())
                blobs = [open(out, "rb").read()]
                if os.path.exists(ev):
                    blobs.append(open(ev, "rb").read())
                outs.append((code, blobs))
            same = outs[0] == outs[1] and outs[0][0] in (0, 1)
            rec.add(" ".join(cmd[:2] if cmd[0] == "simulate" else cmd[:1]) + f" #{i}", float(same), 1.0, 0.0, same)


# ---------------------------------------------------------------------------

CRITERIA = {
    1: ("density oracle agreement", "dickman", c1_density),
    2: ("normalization", "dickman", c2_normalization),
    3: ("sampler correctness", "dickman", c3_samplers),
    4: ("Laplace transform", "dickman", c4_laplace),
    5: ("convolution in theta", "dickman", c5_convolution),
    6: ("DOU stationarity and ACF", "dou", c6_dou),
    7: ("transition sampler", "dou", c7_transition),
    8: ("AR(1) chain", "dou", c8_ar1),
    9: ("order-k OU", "driven", c9_order_k),
    10: ("Bell-Touchard OU", "driven", c10_bell_touchard),
    11: ("supDOU marginals and ACF", "supou", c11_supou),
    12: ("FCLT variance", "asymptotics", c12_fclt),
    13: ("stable scaling exponent", "asymptotics", c13_stable),
    14: ("scaling function", "asymptotics", c14_scaling),
    15: ("CLI determinism", "cli", c15_determinism),
}
GROUPS = sorted({g for _, g, _ in CRITERIA.values()})


def select(only: str | None) -> list[int]:
    """Criterion ids from a comma list of ids and/or group names (None: all)."""
    if only is None or only.strip() == "":
        return sorted(CRITERIA)
    ids = set()
    for tok in only.split(","):
        tok = tok.strip()
        if tok.isdigit() and int(tok) in CRITERIA:
            ids.add(int(tok))
        elif tok in GROUPS:
            ids.update(i for i, (_, g, _) in CRITERIA.items() if g == tok)
        else:
            raise ParameterError(f"unknown criterion or group {tok!r}; groups: {', '.join(GROUPS)}")
    return sorted(ids)


def run_criterion(cid: int, seed: int = DEFAULT_SEED, tol: Tolerances | None = None) -> CriterionResult:
    name, group, fn = CRITERIA[cid]
    rec = _Recorder(tol or Tolerances())
    t0 = time.perf_counter()
    fn(rec, seed)
    return CriterionResult(cid, name, group, rec.checks, time.perf_counter() - t0)


def run(ids=None, seed: int = DEFAULT_SEED, tol: Tolerances | None = None, progress=None) -> list[CriterionResult]:
    results = []
    for cid in ids or sorted(CRITERIA):
        r = run_criterion(cid, seed, tol)
        if progress is not None:
            progress(r)
        results.append(r)
    return results


def report(results, seed: int, tol: Tolerances) -> dict:
    """JSON-ready report.  Timings are left out so the report is reproducible."""

    def num(v):
        return v if math.isfinite(v) else str(v)

    return {
        "schema": SCHEMA,
        "seed": seed,
        "tolerances": asdict(tol),
        "passed": all(r.passed for r in results),
        "criteria": [
            {
                "id": r.id,
                "name": r.name,
                "group": r.group,
                "passed": r.passed,
                "checks": [{**asdict(c), "estimate": num(c.estimate), "tolerance": num(c.tolerance)} for c in r.checks],
            }
            for r in results
        ],
    }


def dumps(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=False) + "\n"
