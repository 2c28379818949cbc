import warnings
from dataclasses import replace

import numpy as np
import pytest

from hetnet_ee import energy
from hetnet_ee.energy import (AllocationScheme, EEResult, FlatObjective, apply_scheme,
                              energy_efficiency, evaluate_point, link_powers, optimize_zeta,
                              scheme_zeta, sweep)
from hetnet_ee.errors import DegenerateModel
from hetnet_ee.network import FDD, PowerParams, derive
from hetnet_ee.rates import RateBundle, compute_rates, sum_rate_area

RATES = RateBundle(2.0, 1.0, 3.0, 1.5, 2.5, 2.0)


def test_link_powers_by_hand(femto_light):
    p, w = femto_light
    B = p.B
    b = link_powers(p, w, RATES)
    P_m = (0.5 * w.P_mt + 0.5 * 25 * w.P_ut + 225 + 100 * 1.0 + 0.1 * 25
           + 0.5 * 25 * (0.1e-9 + 2.4e-9) * B * 2.0 + 0.5 * 25 * (0.8e-9 + 0.3e-9) * B * 1.0)
    P_s = (0.5 * w.P_st + 0.5 * 1 * w.P_ut + 5.2 + 0.8 * 4 + 0.1 * 1
           + 0.5 * (0.2e-9 + 2.4e-9) * B * 3.0 + 0.5 * (1.6e-9 + 0.3e-9) * B * 1.5)
    P_b = (0.5 * w.P_mb + 0.5 * 5 * w.P_sb + 100 * 1.0 + 5 * 4 * 0.8
           + 0.5 * 5 * (0.1e-9 + 1.6e-9) * B * 2.5 + 0.5 * 5 * (0.8e-9 + 0.2e-9) * B * 2.0)
    assert b.P_macro_link == pytest.approx(P_m)
    assert b.P_small_link == pytest.approx(P_s)
    assert b.P_backhaul_link == pytest.approx(P_b)
    assert b.P_area == pytest.approx(p.lambda_m * (P_m + P_b) + p.lambda_s * P_s)


def test_fdd_duty_weights(femto_light):
    p, w = femto_light
    f = replace(p, duplex=FDD())
    b = link_powers(f, w, RATES)
    assert b.P_macro_link > link_powers(p, w, RATES).P_macro_link


def test_one_tier_drops_backhaul(femto_light):
    p, w = femto_light
    q = apply_scheme(AllocationScheme.OneTier, p)
    assert q.lambda_s == 0.0 and q.zeta_b == 0.0
    assert link_powers(q, w, RATES).P_backhaul_link == 0.0


def test_scheme_shares(femto_light):
    p, _ = femto_light
    assert scheme_zeta(AllocationScheme.Proportional, p) == pytest.approx(5 / 30)
    assert scheme_zeta(AllocationScheme.Fixed, p) == 0.5
    with pytest.raises(ValueError):
        scheme_zeta(AllocationScheme.Optimal, p)


def test_eta_identity_and_zero_zeta(femto_light):
    p, w = femto_light
    r = energy_efficiency(replace(p, zeta_b=0.0), w)
    assert r.eta * r.area_power == pytest.approx(r.area_rate, rel=1e-15)
    assert r.rates.R_b_DL == 0.0 and r.rates.R_b_UL == 0.0
    m = derive(p, w)
    macro_only = p.B * (p.K_m * p.lambda_m + p.K_s * p.lambda_s) * m.A_m * 0.5 * (r.rates.R_m_DL + r.rates.R_m_UL)
    assert r.area_rate == pytest.approx(macro_only, rel=1e-15)


def test_degenerate_power(femto_light):
    p, _ = femto_light
    zero = PowerParams(P_mt=1.0, P_st=1.0, P_ut=0.0, P_mb=0.0, P_sb=0.0, P_ma=0.0, P_sa=0.0, P_ua=0.0,
                       P_mf=0.0, P_sf=0.0, P_me=0.0, P_md=0.0, P_se=0.0, P_sd=0.0, P_ue=0.0, P_ud=0.0)
    q = replace(p, duplex=replace(p.duplex, tau_m=0.0, tau_s=0.0, tau_b=0.0))
    with pytest.raises(DegenerateModel):
        energy_efficiency(q, zero)


def test_optimize_zeta_beats_grid(femto_light):
    p, w = femto_light
    z, best = optimize_zeta(p, w)
    fine = np.linspace(0, 1, 201)
    etas = [energy_efficiency(replace(p, zeta_b=x), w).eta for x in fine]
    assert best.eta >= max(etas) * (1 - 1e-3)
    assert best.eta >= max(energy_efficiency(replace(p, zeta_b=x), w).eta for x in np.linspace(0, 1, 33))
    assert abs(z - fine[int(np.argmax(etas))]) <= 1 / 32


def test_optimize_flat(monkeypatch, femto_light):
    p, w = femto_light
    fake = EEResult(1.0, 1.0, 1.0, RATES)
    monkeypatch.setattr(energy, "_eta_at", lambda params, powers, z: replace(fake, zeta_b=z))
    with pytest.warns(FlatObjective):
        optimize_zeta(p, w)


def test_optimize_one_tier(femto_light):
    p, w = femto_light
    z, r = optimize_zeta(replace(p, lambda_s=0.0), w)
    assert z == 0.0 and r.eta > 0


def test_sweep_rows_and_errors(femto_light):
    p, w = femto_light
    rows = sweep(p, w, "saps_per_mbs", [1, 2.5, 30], scheme=AllocationScheme.Fixed)
    assert [r.index for r in rows] == [0, 1, 2]
    assert rows[0].error is None and rows[0].zeta_b == 0.5
    assert "InvalidParams" in rows[1].error and "InvalidParams" in rows[2].error
    with pytest.raises(ValueError):
        sweep(p, w, "bogus", [1])
    with pytest.raises(ValueError):
        sweep(p, w, "zeta_b", [])


def test_power_sweep_coupling(femto_light):
    p, w = femto_light
    _, a = evaluate_point(p, w, "P_mt_coupled", 20.0, AllocationScheme.Fixed, coupled=True)
    _, b = evaluate_point(p, w, "P_mt_coupled", 20.0, AllocationScheme.Fixed, coupled=False)
    assert a.rates.R_b_DL != b.rates.R_b_DL
    assert a.rates.R_m_DL == b.rates.R_m_DL


def test_sweep_matches_direct(femto_light):
    p, w = femto_light
    rows = sweep(p, w, "zeta_b", [0.1, 0.4])
    for r in rows:
        direct = energy_efficiency(replace(p, zeta_b=r.value), w)
        assert r.result.eta == direct.eta
