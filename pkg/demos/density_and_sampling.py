"""
Generalized Dickman laws: density, transform and two samplers
=============================================================

The density comes from the delay equation, solved on a grid once per theta.
We check it against the integral recurrence, then draw samples two ways.
"""

import numpy as np

import dickman as dk
from dickman import stats

# the density at a few points for a spread of shapes
x = np.array([0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0])
for theta in (0.9, 1.0, 1.2, 3.0):
    p = dk.DickmanParams(theta, 1.0)
    print(f"theta={theta:<4}", " ".join(f"{v:8.5f}" for v in dk.pdf(p, x)))

# the grid solution and the recurrence are independent routes to f
p = dk.DickmanParams(2.0, 1.0)
print("max |dde - recurrence|:", np.max(np.abs(dk.pdf(p, x) - dk.pdf_recurrence(p, x))))

# series of Poisson arrivals vs the perpetuity; both are GD(theta, a)
rng = dk.make_rng(1)
for method in ("arrivals", "perpetuity"):
    s = dk.sample(p, rng, size=200_000, method=method)
    d, crit = stats.ks_distance(s, lambda v: dk.cdf(p, v))
    lt, se = stats.empirical_laplace(s, 1.0)
    print(f"{method:10s} KS {d:.4f} (crit {crit:.4f})  E e^-D {lt:.5f} +- {se:.5f}"
          f"  exact {dk.laplace_transform(p, 1.0):.5f}")
