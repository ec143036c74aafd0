"""
supDOU processes: same marginal, different memory
=================================================

With a gamma mixing law on the mean-reversion rate the correlation decays like
a power.  For alpha < 1 it is not integrable and Y* grows faster than sqrt(T).
"""

import numpy as np

import dickman as dk
from dickman import asymptotics, stats, supou

p = dk.DickmanParams(2.0, 1.0)
for alpha in (0.1, 5.0):
    pi = supou.GammaShapeRate.from_alpha_beta(alpha, alpha)
    vals = np.array([supou.simulate_supdou(p, pi, 20.0, 1.0, r)[1].values for r in dk.spawn_rngs(4, 300)])
    d, crit = stats.ks_distance(vals[:, -1], lambda v: dk.cdf(p, v))
    print(f"alpha={alpha}: {supou.memory_classification(pi).value} memory, KS {d:.3f} (crit {crit:.3f}),"
          f" r(5) = {supou.supou_correlation(pi, 5.0):.4f}")

# growth of E|Y*(T)| under long memory, alpha = 0.5
pi = supou.GammaShapeRate.from_alpha_beta(0.5, 1.0)
T = asymptotics.geometric_horizons(50.0, 6)
ystar = np.array([asymptotics.integrate_path(supou.sample_shots(p, pi, T[-1], r, past="exact"), p, T).ystar[1:]
                  for r in dk.spawn_rngs(5, 1000)])
est = asymptotics.scaling_slope(ystar, T, 1.0, rng=dk.make_rng(6))
print(f"slope of log E|Y*| : {est.slope:.3f} +- {est.stderr:.3f}; limit 1/(1+alpha) = {1 / 1.5:.3f}")
# the approach to the limit is slow: local slopes between consecutive horizons
m = np.log(np.abs(ystar).mean(axis=0))
print("local slopes:", np.round(np.diff(m) / np.diff(np.log(T)), 3))
