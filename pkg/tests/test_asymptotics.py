import math

import numpy as np
import pytest

from dickman import DickmanParams, ParameterError
from dickman import asymptotics as asy
from dickman import dou, supou


def test_tau_theoretical():
    assert asy.tau_theoretical(2.0, 5.0, "short") == 1.0
    assert asy.tau_theoretical(12.0, 5.0, "short") == 7.0
    assert asy.tau_theoretical(1.0, 0.5, asy.Regime.LONG_REGVAR) == pytest.approx(2 / 3)
    assert asy.tau_theoretical(3.0, 0.5, "long") == 2.5
    with pytest.raises(ParameterError):
        asy.tau_theoretical(1.0, 0.5, "short")
    with pytest.raises(ParameterError):
        asy.tau_theoretical(1.0, 2.0, "long")


def test_tau_continuous_and_intermittent():
    for a in (0.2, 0.5, 0.9):
        q = 1 + a
        assert asy.tau_theoretical(q - 1e-9, a, "long") == pytest.approx(asy.tau_theoretical(q + 1e-9, a, "long"), abs=1e-8)
        assert asy.tau_theoretical(3.0, a, "long") / 3 > asy.tau_theoretical(1.0, a, "long")


def test_sigma2():
    p = DickmanParams(2.0, 1.0)
    assert asy.fclt_sigma2(supou.GammaShapeRate.from_alpha_beta(5, 5), p) == pytest.approx(2.5)
    assert asy.fclt_sigma2(supou.Degenerate(1.0), DickmanParams(3.0, 1.0)) == pytest.approx(3.0)
    assert asy.s_c_squared(DickmanParams(3.0, 1.0), 1.0) == 3.0
    with pytest.raises(ParameterError):
        asy.fclt_sigma(supou.GammaShapeRate.from_alpha_beta(0.5, 1), p)


def test_s_d_squared_from_covariances():
    p, lam = DickmanParams(3.0, 1.0), 0.7
    ref = dou.covariance(p, lam, 0) + 2 * sum(dou.covariance(p, lam, k) for k in range(1, 200))
    assert asy.s_d_squared(p, lam) == pytest.approx(ref, rel=1e-12)


def test_integrate_event_path_vs_trapezoid():
    p = DickmanParams(3.0, 1.0)
    e = dou.simulate_exact(p, 1.0, 20.0, np.random.default_rng(0))
    exact = asy.integrate_path(e, p, [5.0, 20.0])
    fine = asy.integrate_path(e.on_grid(1e-4), p)
    assert exact.ystar[0] == 0.0
    # each jump inside a grid step costs at most a * dt in the trapezoid rule
    assert exact.at(20.0) == pytest.approx(fine.at(20.0), abs=e.n_events * 1e-4)


def test_integrated_grid_constant():
    g = dou.GridPath(dt=0.5, values=np.full(5, 3.0))
    y = asy.integrate_path(g, DickmanParams(3.0, 1.0))
    assert np.allclose(y.ystar, 0.0)


def test_scaling_slope_recovers_exponent():
    rng = np.random.default_rng(0)
    T = asy.geometric_horizons(10.0, 6)
    z = rng.standard_normal((3000, 1))
    y = z * T[None, :] ** 0.7
    for q in (1.0, 2.0):
        s = asy.scaling_slope(y, T, q, n_boot=50)
        assert s.slope == pytest.approx(0.7 * q, abs=1e-12)
        assert s.stderr < 1e-10
    with pytest.raises(ParameterError):
        asy.scaling_slope(y[:, :2], T[:2], 1.0)


def test_geometric_horizons():
    assert list(asy.geometric_horizons(50.0, 3)) == [50.0, 100.0, 200.0]
