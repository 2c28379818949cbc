import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from hetnet_ee.errors import InvalidParams
from hetnet_ee.laplace import LaplaceKind, laplace_exponent
from hetnet_ee.network import FDD, derive
from hetnet_ee.rates import (LN2, RateBundle, compute_rates, fixed_point_energies,
                             fixed_point_residual, prefactor, rate_backhaul_dl, rate_macro_dl,
                             rates_fdd, rates_tdd, sum_rate_area, unit_rate)


def _log_grid(lo, hi, n=6001):
    """Nodes z and trapezoid weights for int f(z) dz / z on [lo, hi] in s = ln z.

    The integrands decay smoothly at both ends in s, where the trapezoid rule
    converges geometrically.
    """
    s = np.linspace(math.log(lo), math.log(hi), n)
    w = np.full(n, s[1] - s[0])
    w[[0, -1]] *= 0.5
    return np.exp(s), w


def test_macro_dl_against_swapped_order(femto_model):
    """Serving path loss outside (scipy), z inside (trapezoid in ln z)."""
    m = femto_model
    d, G, nu, s2 = m.delta, m.G_m, m.nu_m_D, m.params.sigma2
    z, w = _log_grid(1e-10 / nu, 1e3 / s2, 8001)
    common = np.exp(-s2 * z - laplace_exponent(LaplaceKind.UE_DL, z, model=m)) * -np.expm1(-z * nu)

    def given_u(u):
        t = (u / G) ** (1 / d)
        return float(np.sum(w * common * np.exp(-laplace_exponent(LaplaceKind.OC_MacroUE, z, t, m))))

    ref = integrate.quad(lambda u: given_u(u) * math.exp(-u), 0, 50, epsabs=0, epsrel=1e-9, limit=200)[0] / LN2
    assert unit_rate("m_DL", m) == pytest.approx(ref, rel=1e-6)


def test_small_ul_against_swapped_order(femto_model):
    m = femto_model
    d, G, P, Ds, s2 = m.delta, m.G_s, m.powers.P_ut, m.Delta_s, m.params.sigma2
    z, w = _log_grid(1e-12 / P, 1e3 / s2, 4001)
    common = np.exp(-s2 * z - laplace_exponent(LaplaceKind.UE_UL_Small, z, model=m)
                    - laplace_exponent(LaplaceKind.MBS_UL, z, model=m))

    def given_u(u):
        t = (u / G) ** (1 / d)
        return float(np.sum(w * common * -np.expm1(-Ds * np.log1p(z * P / t))))

    ref = integrate.quad(lambda u: given_u(u) * math.exp(-u), 0, 50, epsabs=0, epsrel=1e-9, limit=200)[0] / LN2
    assert unit_rate("s_UL", m) == pytest.approx(ref, rel=1e-6)


def test_prefactors(femto_light):
    p, w = femto_light
    m = derive(replace(p, zeta_b=0.25), w)
    assert prefactor("m_DL", m) == 0.75
    assert prefactor("b_UL", m) == pytest.approx(0.25 * 4 / 1)
    f = derive(replace(p, zeta_b=0.25, duplex=FDD(0.6, 0.3)), w)
    assert prefactor("s_UL", f) == pytest.approx(0.4 * 0.75)
    assert prefactor("b_DL", f) == pytest.approx(0.3 * 0.25 * 4)


def test_bundle_scales_with_zeta(femto_light):
    p, w = femto_light
    r0 = rates_tdd(derive(replace(p, zeta_b=0.0), w))
    r5 = rates_tdd(derive(replace(p, zeta_b=0.5), w))
    assert r0.R_b_DL == 0.0 and r0.R_b_UL == 0.0
    assert r5.R_m_DL == pytest.approx(0.5 * r0.R_m_DL, rel=1e-15)
    assert r5.R_b_DL == pytest.approx(0.5 * 4 * unit_rate("b_DL", derive(p, w)), rel=1e-15)
    for v in r5.as_dict().values():
        assert v > 0


def test_tdd_fdd_dispatch(femto_light):
    p, w = femto_light
    m = derive(p, w)
    with pytest.raises(InvalidParams):
        rates_fdd(m)
    mf = derive(replace(p, duplex=FDD(), zeta_b=0.5), w)
    with pytest.raises(InvalidParams):
        rate_macro_dl(mf)
    rf = rates_fdd(mf)
    assert rf == compute_rates(mf)
    # FDD downlink equals TDD with every station in downlink (no UL UEs, all BSs on)
    all_dl = derive(replace(p, duplex=replace(p.duplex, tau_m=1.0, tau_s=1.0)), w)
    assert unit_rate("m_DL", mf) == pytest.approx(unit_rate("m_DL", all_dl), rel=1e-12)


def test_powers_argument_rederives(femto_light):
    p, w = femto_light
    m = derive(replace(p, zeta_b=0.5), w)
    louder = replace(w, P_mb=4 * w.P_mb)
    assert rate_backhaul_dl(m, louder) == pytest.approx(rate_backhaul_dl(derive(m.params, louder)))


def test_no_small_cells(femto_light):
    p, w = femto_light
    m = derive(replace(p, lambda_s=0.0, zeta_b=0.0), w)
    r = compute_rates(m)
    assert (r.R_s_DL, r.R_s_UL, r.R_b_DL, r.R_b_UL) == (0.0, 0.0, 0.0, 0.0)
    assert r.R_m_DL > 0


def test_sum_rate_area_caps_small_cells(femto_light):
    p, w = femto_light
    m = derive(p, w)
    r = RateBundle(1.0, 0.5, 3.0, 2.0, 1.0, 4.0)
    expected = p.B * (p.K_m * p.lambda_m + p.K_s * p.lambda_s) * (
        m.A_m * 0.5 * (1.0 + 0.5) + m.A_s * 0.5 * (1.0 + 2.0))
    assert sum_rate_area(m, w, r) == pytest.approx(expected)


def test_fixed_point_closed_form():
    rng = np.random.default_rng(5)
    for M, K in ((128, 32), (64, 60), (16, 1)):
        L = rng.exponential(size=K) ** 1.9 * 1e9
        it, closed = fixed_point_energies(L, M)
        np.testing.assert_allclose(it, closed, rtol=1e-12)
        assert fixed_point_residual(closed, L, M) < 1e-12
    with pytest.raises(InvalidParams):
        fixed_point_energies(np.ones(4), 4)
