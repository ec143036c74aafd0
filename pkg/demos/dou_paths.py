"""
The Dickman OU process
======================

Exact event paths, the grid algorithm, the transition law, and the integer-time
AR(1) chain.  All four share the GD(theta, a) marginal.
"""

import math

import numpy as np

import dickman as dk
from dickman import asymptotics, dou, stats

p, lam = dk.DickmanParams(3.0, 1.0), 1.0
rng = dk.make_rng(2)

# one long path on a grid, as the classic algorithm does it
g = dou.simulate_grid(p, lam, 300.0, 0.01, rng)
print("grid path mean", g.values.mean(), "(stationary mean", p.mean, ")")
print("acf at lags 1, 2 :", stats.empirical_acf(g, [100, 200], mean=p.mean), "vs", np.exp(-lam * np.array([1, 2])))

# exact paths integrate in closed form
paths = [dou.simulate_exact(p, lam, 200.0, r) for r in dk.spawn_rngs(3, 1000)]
y = np.array([asymptotics.integrate_path(e, p, [200.0]).ystar[-1] for e in paths])
print("Var Y*(200)/200 =", y.var() / 200, "long-run variance", asymptotics.s_c_squared(p, lam))

# transition law from x = 5 over t = 0.7
t, x = 0.7, 5.0
z = dou.transition_sample(p, lam, x, t, rng, size=100_000)
print("P(no jump) =", np.mean(z == math.exp(-lam * t) * x), "exact", math.exp(-p.theta * lam * t))

# AR(1) at integer times
ch = dou.ar1_simulate(p, 0.5, 100_000, rng)
print("AR(1) lag-1 acf", stats.empirical_acf(ch.values, [1], mean=p.mean)[0], "vs c = 0.5")
