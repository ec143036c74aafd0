"""
OU processes with order-k Poisson and Bell-Touchard drivers
===========================================================

Each is compound Poisson, so it can be run directly or as a sum of
independent DOU processes with jump sizes 1, 2, ...
"""

import numpy as np

import dickman as dk
from dickman import driven, stats

pk = driven.OrderKParams(theta=2.0, k=3)
bt = driven.BellTouchardParams(alpha=1.0, nu=1.0)
for name, sim, moments in (("order-3", lambda r, m: driven.simulate_ppk_ou(pk, 10.0, r, m), driven.ppk_moments(pk)),
                           ("Bell-Touchard", lambda r, m: driven.simulate_bt_ou(bt, 10.0, r, m), driven.bt_moments(bt))):
    for mode in driven.MODES:
        x = np.array([sim(r, mode).value(10.0) for r in dk.spawn_rngs(7, 2000)])
        m, se = stats.mean_with_se(x)
        print(f"{name:14s} {mode:13s} mean {m:.3f} +- {se:.3f} var {x.var():.3f}  (exact {moments[0]:.3f}, {moments[1]:.3f})")
