"""Ergodic spectral efficiencies of the six links under TDD and FDD.

Every rate has the form ``prefactor * int_0^inf e^{-sigma^2 z} / (z ln 2) *
kernel(z) * laplace(z) dz`` where conditional interference is averaged over
the serving path loss inside the integral. The prefactors depend on the
backhaul share ``zeta_b`` and the duplex split, the integrals do not, so the
integrals are cached per ``zeta_b``-free model and sweeps over ``zeta_b`` cost
nothing after the first point.

Integration uses the log substitution of :func:`integrate_semi_infinite`
because the integrands spread over many decades of ``z``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InvalidParams, NonConvergence
from .laplace import INNER_CFG, LaplaceKind, laplace_exponent
from .network import DerivedModel, PowerParams, derive
from .quadrature import QuadConfig, integrate_semi_infinite

LN2 = math.log(2.0)
OUTER_CFG = QuadConfig(rel_tol=1e-8, abs_tol=1e-12)

K = LaplaceKind


@dataclass(frozen=True)
class RateBundle:
    """Spectral efficiencies in bit/s/Hz, prefactors included."""

    R_m_DL: float
    R_m_UL: float
    R_s_DL: float
    R_s_UL: float
    R_b_DL: float
    R_b_UL: float

    def as_dict(self) -> dict:
        return dict(R_m_DL=self.R_m_DL, R_m_UL=self.R_m_UL, R_s_DL=self.R_s_DL,
                    R_s_UL=self.R_s_UL, R_b_DL=self.R_b_DL, R_b_UL=self.R_b_UL)


# ---------------------------------------------------------------------------
# serving path-loss averages

def _t_of_u(u, G: float, delta: float):
    return (u / G) ** (1.0 / delta)


def _expect_t(h, G: float, delta: float, u_feature: float, cfg: QuadConfig) -> float:
    """E[h(L)] for L**delta ~ Exp(G), integrated in u = G L**delta.

    ``u_feature`` is where ``h`` changes fastest; the log map is centred
    between it and the bulk of the exponential at u ~ 1.
    """
    centre = math.sqrt(min(max(u_feature, 1e-300), 1.0))

    def f(u):
        return h(_t_of_u(u, G, delta)) * np.exp(-u)

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return integrate_semi_infinite(f, cfg, scale=centre, method="log").value


def _vec_expect(h_of_zt, zs, G, delta, feature_of_z, cfg):
    out = np.empty_like(zs)
    for i, z in enumerate(zs):
        out[i] = _expect_t(lambda t: h_of_zt(z, t), G, delta, feature_of_z(z), cfg)
    return out


# ---------------------------------------------------------------------------
# outer integral

def _outer(g, z_scale: float, cfg: QuadConfig) -> float:
    """int_0^inf g(z) / (z ln 2) dz with ``g`` vectorised over z.

    The log map absorbs the 1/z, so the z -> 0 limit of the kernel never has
    to be formed explicitly.
    """
    try:
        r = integrate_semi_infinite(lambda z: g(z) / z, cfg, scale=z_scale, method="log")
    except NonConvergence as exc:
        if exc.level is None:
            exc.level = "outer"
        raise
    return r.value / LN2


def _noise(model: DerivedModel, z):
    return np.exp(-model.params.sigma2 * z)


def _unit_macro_dl(model: DerivedModel, cfg: QuadConfig) -> float:
    d, G, nu = model.delta, model.G_m, model.nu_m_D
    P, Km = model.powers.P_mt, model.params.K_m
    fdd = model.params.is_fdd

    def g(z):
        ue = 0.0 if fdd else laplace_exponent(K.UE_DL, z, model=model)
        oc = _vec_expect(lambda zz, t: np.exp(-laplace_exponent(K.OC_MacroUE, zz, t, model)),
                         z, G, d, lambda zz: G * (zz * P / Km) ** d, cfg.tighter())
        return _noise(model, z) * -np.expm1(-z * nu) * np.exp(-ue) * oc

    return _outer(g, 1.0 / nu, cfg)


def _ul_signal_expect(model, z, G, nu, cfg):
    """E_t[1 - exp(-z nu / t)]."""
    d = model.delta
    return _vec_expect(lambda zz, t: -np.expm1(-zz * nu / t), z, G, d,
                       lambda zz: G * (zz * nu) ** d, cfg.tighter())


def _ul_serving_G(model: DerivedModel, G_tdd: float) -> float:
    return model.G_U if model.params.is_fdd else G_tdd


def _unit_macro_ul(model: DerivedModel, cfg: QuadConfig) -> float:
    G = _ul_serving_G(model, model.G_m)
    nu = model.nu_m_U
    fdd = model.params.is_fdd
    t_typ = (1.0 / G) ** (1.0 / model.delta)

    def g(z):
        sig = _ul_signal_expect(model, z, G, nu, cfg)
        expo = laplace_exponent(K.UE_UL_Macro, z, model=model, cfg=INNER_CFG)
        if not fdd:
            expo = expo + laplace_exponent(K.MBS_UL, z, model=model)
        return _noise(model, z) * sig * np.exp(-expo)

    return _outer(g, t_typ / nu, cfg)


def _unit_small_dl(model: DerivedModel, cfg: QuadConfig) -> float:
    d, G = model.delta, model.G_s
    P, Ks, Ds = model.powers.P_st, model.params.K_s, model.Delta_s
    fdd = model.params.is_fdd
    t_typ = (1.0 / G) ** (1.0 / d)

    def h(z, t):
        sig = -np.expm1(-Ds * np.log1p(z * P / (t * Ks)))
        return sig * np.exp(-laplace_exponent(K.OC_SmallUE, z, t, model))

    def g(z):
        ue = 0.0 if fdd else laplace_exponent(K.UE_DL, z, model=model)
        inner = _vec_expect(h, z, G, d, lambda zz: G * (zz * P / Ks) ** d, cfg.tighter())
        return _noise(model, z) * np.exp(-ue) * inner

    return _outer(g, t_typ * Ks / P, cfg)


def _unit_small_ul(model: DerivedModel, cfg: QuadConfig) -> float:
    d = model.delta
    G = _ul_serving_G(model, model.G_s)
    P, Ds = model.powers.P_ut, model.Delta_s
    fdd = model.params.is_fdd
    t_typ = (1.0 / G) ** (1.0 / d)

    def g(z):
        sig = _vec_expect(lambda zz, t: -np.expm1(-Ds * np.log1p(zz * P / t)), z, G, d,
                          lambda zz: G * (zz * P) ** d, cfg.tighter())
        expo = laplace_exponent(K.UE_UL_Small, z, model=model, cfg=INNER_CFG)
        if not fdd:
            expo = expo + laplace_exponent(K.MBS_UL, z, model=model)
        return _noise(model, z) * sig * np.exp(-expo)

    return _outer(g, t_typ / P, cfg)


def _unit_backhaul_dl(model: DerivedModel, cfg: QuadConfig) -> float:
    d, G, nu = model.delta, model.a_b, model.nu_b_D
    P = model.powers.P_mb
    Kb = model.params.K_b * model.params.M_s
    fdd = model.params.is_fdd

    def g(z):
        sap = 0.0 if fdd else laplace_exponent(K.BH_SAP_on_DL, z, model=model)
        mbs = _vec_expect(lambda zz, t: np.exp(-laplace_exponent(K.BH_MBS_DL, zz, t, model)),
                          z, G, d, lambda zz: G * (zz * P / Kb) ** d, cfg.tighter())
        return _noise(model, z) * -np.expm1(-z * nu) * np.exp(-sap) * mbs

    return _outer(g, 1.0 / nu, cfg)


def _unit_backhaul_ul(model: DerivedModel, cfg: QuadConfig) -> float:
    d, nu = model.delta, model.nu_b_U
    fdd = model.params.is_fdd
    if fdd and model.params.options.fdd_bh_serving == "f_LU":
        G = model.G_U
    else:
        G = model.a_b
    t_typ = (1.0 / G) ** (1.0 / d)

    def g(z):
        sig = _ul_signal_expect(model, z, G, nu, cfg)
        expo = laplace_exponent(K.BH_SAP_UL, z, model=model, cfg=INNER_CFG)
        if not fdd:
            expo = expo + laplace_exponent(K.BH_MBS_UL, z, model=model)
        return _noise(model, z) * sig * np.exp(-expo)

    return _outer(g, t_typ / nu, cfg)


_UNITS = {
    "m_DL": _unit_macro_dl, "m_UL": _unit_macro_ul,
    "s_DL": _unit_small_dl, "s_UL": _unit_small_ul,
    "b_DL": _unit_backhaul_dl, "b_UL": _unit_backhaul_ul,
}


def _zeta_free(model: DerivedModel) -> DerivedModel:
    if model.params.zeta_b == 0.0:
        return model
    return replace(model, params=replace(model.params, zeta_b=0.0))


@functools.lru_cache(maxsize=4096)
def _unit_cached(link: str, model: DerivedModel, cfg: QuadConfig) -> float:
    return _UNITS[link](model, cfg)


def _signal_constant(link: str, model: DerivedModel) -> float:
    return {"m_DL": model.nu_m_D, "m_UL": model.nu_m_U, "s_DL": model.powers.P_st,
            "s_UL": model.powers.P_ut, "b_DL": model.nu_b_D, "b_UL": model.nu_b_U}[link]


def unit_rate(link: str, model: DerivedModel, cfg: QuadConfig = OUTER_CFG) -> float:
    """E[log2(1 + SINR)] of one link, without bandwidth or zeta prefactors."""
    if link in ("s_DL", "s_UL", "b_DL", "b_UL") and model.params.lambda_s == 0.0:
        # no small cells: nothing to serve, the links do not exist
        return 0.0
    if _signal_constant(link, model) == 0.0:
        return 0.0
    return _unit_cached(link, _zeta_free(model), cfg)


def prefactor(link: str, model: DerivedModel) -> float:
    prm = model.params
    z = prm.zeta_b
    bh = prm.M_s / prm.K_s
    if prm.is_fdd:
        xd, xb = prm.duplex.xi_D, prm.duplex.xi_B
        table = {"m_DL": xd * (1 - z), "m_UL": (1 - xd) * (1 - z),
                 "s_DL": xd * (1 - z), "s_UL": (1 - xd) * (1 - z),
                 "b_DL": xb * z * bh, "b_UL": (1 - xb) * z * bh}
    else:
        table = {"m_DL": 1 - z, "m_UL": 1 - z, "s_DL": 1 - z, "s_UL": 1 - z,
                 "b_DL": z * bh, "b_UL": z * bh}
    return table[link]


def _rate(link: str, model: DerivedModel, powers: Optional[PowerParams], cfg: QuadConfig) -> float:
    if powers is not None and powers != model.powers:
        model = derive(model.params, powers)
    pre = prefactor(link, model)
    if pre == 0.0:
        return 0.0
    return pre * unit_rate(link, model, cfg)


def _need_tdd(model):
    if model.params.is_fdd:
        raise InvalidParams("this rate expression is defined for TDD; use rates_fdd for FDD")


def rate_macro_dl(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("m_DL", model, powers, cfg)


def rate_macro_ul(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("m_UL", model, powers, cfg)


def rate_small_dl(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("s_DL", model, powers, cfg)


def rate_small_ul(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("s_UL", model, powers, cfg)


def rate_backhaul_dl(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("b_DL", model, powers, cfg)


def rate_backhaul_ul(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> float:
    _need_tdd(model)
    return _rate("b_UL", model, powers, cfg)


def _bundle(model, powers, cfg) -> RateBundle:
    r = {link: _rate(link, model, powers, cfg) for link in _UNITS}
    return RateBundle(r["m_DL"], r["m_UL"], r["s_DL"], r["s_UL"], r["b_DL"], r["b_UL"])


def rates_tdd(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> RateBundle:
    _need_tdd(model)
    return _bundle(model, powers, cfg)


def rates_fdd(model: DerivedModel, powers: Optional[PowerParams] = None, cfg: QuadConfig = OUTER_CFG) -> RateBundle:
    if not model.params.is_fdd:
        raise InvalidParams("rates_fdd needs an FDD duplex configuration")
    return _bundle(model, powers, cfg)


def compute_rates(model: DerivedModel, cfg: QuadConfig = OUTER_CFG) -> RateBundle:
    """Dispatch on the duplex mode of ``model``."""
    return _bundle(model, None, cfg)


def clear_cache() -> None:
    _unit_cached.cache_clear()


def sum_rate_area(model: DerivedModel, powers: Optional[PowerParams], rates: RateBundle) -> float:
    """Sum rate per unit area in bit/s/m^2.

    Small-cell traffic is capped by its backhaul in each direction.
    """
    prm = model.params
    if prm.is_fdd:
        w_m = w_s = (1.0, 1.0)
    else:
        w_m = (prm.duplex.tau_m, 1.0 - prm.duplex.tau_m)
        w_s = (prm.duplex.tau_s, 1.0 - prm.duplex.tau_s)
    macro = w_m[0] * rates.R_m_DL + w_m[1] * rates.R_m_UL
    small = (w_s[0] * min(rates.R_s_DL, rates.R_b_DL)
             + w_s[1] * min(rates.R_s_UL, rates.R_b_UL))
    active = prm.K_m * prm.lambda_m + prm.K_s * prm.lambda_s
    return prm.B * active * (model.A_m * macro + model.A_s * small)


# ---------------------------------------------------------------------------
# deterministic equivalent of the ZF receive SINR

def fixed_point_residual(e_inv, L, M: int) -> float:
    """Largest violation of ``e_i**-1 / L_i = 1 + J / M`` with
    ``J = sum_j e_j**-1 / L_j`` (the ZF deterministic-equivalent system)."""
    e_inv = np.asarray(e_inv, dtype=float)
    L = np.asarray(L, dtype=float)
    J = float(np.sum(e_inv / L))
    return float(np.max(np.abs(e_inv / L - (1.0 + J / M))))


def fixed_point_energies(L, M: int, tol: float = 1e-15, max_iter: int = 10_000):
    """Solve the deterministic-equivalent system by iteration.

    Returns ``(iterated, closed_form)`` values of ``1/e_i``; the closed form is
    ``M / (M - K) * L_i``.
    """
    L = np.asarray(L, dtype=float)
    Kn = L.size
    if Kn >= M:
        raise InvalidParams("need fewer users than antennas")
    e_inv = L.copy()
    for _ in range(max_iter):
        J = float(np.sum(e_inv / L))
        new = L * (1.0 + J / M)
        if np.max(np.abs(new - e_inv) / new) < tol:
            e_inv = new
            break
        e_inv = new
    else:
        raise NonConvergence("fixed-point iteration did not settle")
    return e_inv, M / (M - Kn) * L
