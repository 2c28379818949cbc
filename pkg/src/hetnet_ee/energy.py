"""Power consumption, energy efficiency and the sweep/optimisation drivers."""

from __future__ import annotations

import enum
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateModel, HetNetError, InvalidParams
from .network import DerivedModel, PowerParams, SystemParams, derive
from .rates import RateBundle, compute_rates, sum_rate_area

log = logging.getLogger(__name__)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class FlatObjective(UserWarning):
    """The objective barely varies over the search interval."""


@dataclass(frozen=True)
class PowerBreakdown:
    P_macro_link: float
    P_small_link: float
    P_backhaul_link: float
    P_area: float


@dataclass(frozen=True)
class EEResult:
    eta: float
    area_rate: float
    area_power: float
    rates: RateBundle
    zeta_b: float = 0.0


class AllocationScheme(enum.Enum):
    Optimal = "optimal"
    Proportional = "proportional"
    Fixed = "fixed"
    OneTier = "one-tier"


FIXED_ZETA = 0.5


def scheme_zeta(scheme: AllocationScheme, params: SystemParams) -> float:
    """Backhaul bandwidth share prescribed by a non-optimised scheme."""
    if scheme is AllocationScheme.Proportional:
        load_b = params.K_b * params.K_s
        return load_b / (params.K_m + load_b)
    if scheme is AllocationScheme.Fixed:
        return FIXED_ZETA
    if scheme is AllocationScheme.OneTier:
        return 0.0
    raise ValueError("the optimal share comes from optimize_zeta, not scheme_zeta")


def apply_scheme(scheme: AllocationScheme, params: SystemParams) -> SystemParams:
    """Parameters with the scheme's zeta_b (and, for OneTier, no small cells)."""
    if scheme is AllocationScheme.OneTier:
        return replace(params, zeta_b=0.0, lambda_s=0.0)
    if scheme is AllocationScheme.Optimal:
        return params
    return replace(params, zeta_b=scheme_zeta(scheme, params))


def _duty(params: SystemParams):
    """(DL, UL) duty weights per tier: macro, small, backhaul."""
    if params.is_fdd:
        return (1.0, 1.0), (1.0, 1.0), (1.0, 1.0)
    d = params.duplex
    return (d.tau_m, 1 - d.tau_m), (d.tau_s, 1 - d.tau_s), (d.tau_b, 1 - d.tau_b)


def link_powers(params: SystemParams, powers: PowerParams, rates: RateBundle) -> PowerBreakdown:
    """Average power of one macro cell, one small cell and one MBS backhaul.

    Coding terms consume bit rates ``B * spectral efficiency``; the coding
    energies are in W per bit/s.
    """
    (tm, um), (ts, us), (tb, ub) = _duty(params)
    p, w, B = params, powers, params.B
    P_m = (tm * w.P_mt + um * p.K_m * w.P_ut
           + w.P_mf + w.P_ma * p.M_m + w.P_ua * p.K_m
           + tm * p.K_m * (w.P_me + w.P_ud) * B * rates.R_m_DL
           + um * p.K_m * (w.P_md + w.P_ue) * B * rates.R_m_UL)
    P_s = (ts * w.P_st + us * p.K_s * w.P_ut
           + w.P_sf + w.P_sa * p.M_s + w.P_ua * p.K_s
           + ts * p.K_s * (w.P_se + w.P_ud) * B * rates.R_s_DL
           + us * p.K_s * (w.P_sd + w.P_ue) * B * rates.R_s_UL)
    if p.lambda_s == 0.0:
        # no SAPs to feed: the backhaul radio chain is absent
        P_b = 0.0
    else:
        P_b = (tb * w.P_mb + ub * p.K_b * w.P_sb
               + w.P_ma * p.M_m + p.K_b * p.M_s * w.P_sa
               + tb * p.K_b * p.K_s * (w.P_me + w.P_sd) * B * rates.R_b_DL
               + ub * p.K_b * p.K_s * (w.P_md + w.P_se) * B * rates.R_b_UL)
    area = p.lambda_m * P_m + p.lambda_s * P_s + p.lambda_m * P_b
    return PowerBreakdown(P_m, P_s, P_b, area)


def area_power(params: SystemParams, powers: PowerParams, rates: RateBundle) -> float:
    return link_powers(params, powers, rates).P_area


def energy_efficiency(params: SystemParams, powers: PowerParams) -> EEResult:
    """Area sum rate over area power, in bit/J."""
    model = derive(params, powers)
    rates = compute_rates(model)
    return _ee_from(model, rates)


def _ee_from(model: DerivedModel, rates: RateBundle) -> EEResult:
    params, powers = model.params, model.powers
    r = sum_rate_area(model, powers, rates)
    p = area_power(params, powers, rates)
    if not p > 0.0:
        raise DegenerateModel("area power consumption is zero; energy efficiency is undefined")
    return EEResult(eta=r / p, area_rate=r, area_power=p, rates=rates, zeta_b=params.zeta_b)


# ---------------------------------------------------------------------------
# optimisation over zeta_b

def _eta_at(params: SystemParams, powers: PowerParams, zeta: float) -> EEResult:
    return energy_efficiency(replace(params, zeta_b=float(zeta)), powers)


def optimize_zeta(params: SystemParams, powers: PowerParams, grid_resolution: int = 33,
                  refine_tol: float = 1e-3) -> tuple[float, EEResult]:
    """Maximise eta over zeta_b in [0, 1]: coarse grid, then golden section.

    The refinement runs on the two grid cells around the best grid point, so
    the returned value is never below any grid value.
    """
    if grid_resolution < 3:
        raise ValueError("grid_resolution must be >= 3")
    if not refine_tol > 0:
        raise ValueError("refine_tol must be > 0")
    if params.lambda_s == 0.0:
        return 0.0, _eta_at(params, powers, 0.0)
    grid = np.linspace(0.0, 1.0, grid_resolution)
    results = [_eta_at(params, powers, z) for z in grid]
    etas = np.array([r.eta for r in results])
    i = int(np.argmax(etas))
    if etas.max() - etas.min() < 1e-6 * abs(etas.max()):
        warnings.warn("energy efficiency is flat in zeta_b", FlatObjective, stacklevel=2)
        return float(grid[i]), results[i]
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_resolution - 1)]
    best_z, best = float(grid[i]), results[i]
    cache = {}

    def f(z):
        if z not in cache:
            cache[z] = _eta_at(params, powers, z)
        return cache[z]

    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > refine_tol:
        if f(c).eta >= f(d).eta:
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    for z, r in cache.items():
        if r.eta > best.eta:
            best_z, best = float(z), r
    return best_z, best


# ---------------------------------------------------------------------------
# sweeps

SWEEP_VARIABLES = ("zeta_b", "P_mt_coupled", "saps_per_mbs")


@dataclass(frozen=True)
class SweepRow:
    index: int
    value: float
    zeta_b: Optional[float]
    result: Optional[EEResult]
    error: Optional[str] = None


def _point(params: SystemParams, powers: PowerParams, variable: str, value: float,
           scheme: AllocationScheme, coupled: bool) -> tuple[SystemParams, PowerParams]:
    if variable == "zeta_b":
        return replace(params, zeta_b=float(value)), powers
    if variable == "P_mt_coupled":
        if coupled:
            return params, replace(powers, P_mt=float(value), P_mb=float(value))
        return params, replace(powers, P_mt=float(value))
    if variable == "saps_per_mbs":
        kb = int(value)
        if kb != value:
            raise InvalidParams(f"SAPs per MBS must be an integer, got {value}")
        return replace(params, K_b=kb, lambda_s=kb * params.lambda_m), powers
    raise ValueError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")


def evaluate_point(params: SystemParams, powers: PowerParams, variable: str, value: float,
                   scheme: AllocationScheme = AllocationScheme.Optimal,
                   coupled: bool = True) -> tuple[float, EEResult]:
    """One sweep point: returns (zeta_b used, result)."""
    p, w = _point(params, powers, variable, value, scheme, coupled)
    if variable == "zeta_b":
        if scheme is AllocationScheme.OneTier:
            p = replace(p, lambda_s=0.0)
        return p.zeta_b, energy_efficiency(p, w)
    p = apply_scheme(scheme, p)
    if scheme is AllocationScheme.Optimal:
        return optimize_zeta(p, w)
    return p.zeta_b, energy_efficiency(p, w)


def _run_row(args) -> SweepRow:
    idx, params, powers, variable, value, scheme, coupled = args
    try:
        z, res = evaluate_point(params, powers, variable, value, scheme, coupled)
        return SweepRow(idx, float(value), z, res)
    except HetNetError as exc:
        log.warning("sweep point %s=%s failed: %s", variable, value, exc)
        return SweepRow(idx, float(value), None, None, f"{type(exc).__name__}: {exc}")


def sweep(params: SystemParams, powers: PowerParams, variable: str, grid: Sequence[float],
          scheme: AllocationScheme = AllocationScheme.Optimal, coupled: bool = True,
          workers: int = 1) -> list[SweepRow]:
    """Evaluate one row per grid value, in grid order; failures become row errors.

    For ``zeta_b`` the scheme only matters for OneTier (small cells removed).
    """
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    if variable not in SWEEP_VARIABLES:
        raise ValueError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")
    jobs = [(i, params, powers, variable, v, scheme, coupled) for i, v in enumerate(grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run_row, jobs))
    else:
        rows = [_run_row(j) for j in jobs]
    return sorted(rows, key=lambda r: r.index)
