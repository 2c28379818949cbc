"""Interference Laplace transforms E[exp(-z I)] for every link type.

Each transform is written as ``exp(-exponent)``; the exponents are exposed
separately (``laplace_exponent``) because the Monte Carlo oracle and the tests
compare them directly. ``z`` may be a scalar or an array; for the conditional
kinds ``t`` broadcasts against ``z``.

Point processes are handled in path-loss space: a PPP of density ``lam`` with
lognormal shadowing maps to a PPP on (0, inf) with intensity
``delta * a * x**(delta - 1)``, ``a = lam * pi * E[S**delta]``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .network import DerivedModel
from .quadrature import QuadConfig, integrate_semi_infinite
from .special import c_alpha_k_w

INNER_CFG = QuadConfig(rel_tol=1e-10, abs_tol=1e-14)


class LaplaceKind(enum.Enum):
    UE_DL = "UE_DL"                  # UL UEs interfering with a DL receiver
    OC_MacroUE = "OC_MacroUE"        # DL BSs seen by a macro UE (conditional on t)
    OC_SmallUE = "OC_SmallUE"        # DL BSs seen by a small-cell UE (conditional on t)
    MBS_UL = "MBS_UL"                # DL BSs seen by an UL receiver
    UE_UL_Macro = "UE_UL_Macro"      # UL UEs seen by an MBS
    UE_UL_Small = "UE_UL_Small"      # UL UEs seen by a SAP
    BH_SAP_on_DL = "BH_SAP_on_DL"    # SAPs transmitting backhaul UL, seen by a SAP in backhaul DL
    BH_MBS_DL = "BH_MBS_DL"          # MBSs transmitting backhaul DL (conditional on t)
    BH_MBS_UL = "BH_MBS_UL"          # MBSs transmitting backhaul DL, seen by an MBS in backhaul UL
    BH_SAP_UL = "BH_SAP_UL"          # SAPs transmitting backhaul UL, seen by an MBS

    @property
    def conditional(self) -> bool:
        return self in (LaplaceKind.OC_MacroUE, LaplaceKind.OC_SmallUE, LaplaceKind.BH_MBS_DL)


def _gamma_ppp_factor(K: int, delta: float, literal: bool) -> float:
    """E[g**delta] * Gamma(1 - delta) for g ~ Gamma(K, 1), or the printed variant.

    The printed variant carries an extra Gamma(1 + delta) and pi.
    """
    exact = math.exp(math.lgamma(K + delta) - math.lgamma(K)) * math.gamma(1.0 - delta)
    if literal:
        return exact * math.pi * math.gamma(1.0 + delta)
    return exact


def _bs_exponent(a: float, P: float, K: int, z, delta: float, literal: bool):
    """Exponent of a full-plane PPP of K-stream transmitters with Gamma(K) fading."""
    if a == 0.0:
        return np.zeros_like(z)
    return a * (z * P / K) ** delta * _gamma_ppp_factor(K, delta, literal)


def _bs_exponent_excl(a: float, P: float, K: int, z, c, delta: float, alpha: float):
    """Exponent of the same PPP with interferers restricted to path loss > c."""
    if a == 0.0:
        return np.zeros(np.broadcast(z, c).shape)
    s = z * P
    return a * c_alpha_k_w(s / (c * K), K, alpha) * (s / K) ** delta


def _log_integral(f, scale: float, cfg: QuadConfig) -> float:
    with np.errstate(over="ignore"):
        return integrate_semi_infinite(f, cfg, scale=scale, method="log").value


def _ue_ul_exponent(model: DerivedModel, z, G: float, literal_small: bool, cfg: QuadConfig):
    """Inhomogeneous UE process seen by a BS; UEs closer to the receiver than
    to their own BS are thinned with probability exp(-G u)."""
    lam = model.lambda_u_tilde
    if lam == 0.0:
        return np.zeros_like(z)
    d = model.delta
    p = 1.0 / d
    pu = model.powers.P_ut
    pref = lam * math.pi * model.E_SD_delta
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    base = math.pi * d / math.sin(math.pi * d)
    for i, zi in enumerate(zz):
        scale = (zi * pu) ** d
        if literal_small:
            out[i] = pref * -math.expm1(-G * zi) * scale * base
            continue
        c = G * scale
        # u = scale * y: (1 - exp(-c y)) / (1 + y**(1/delta))
        val = _log_integral(lambda y: -np.expm1(-c * y) / (1.0 + y ** p), 1.0 / max(c, 1e-300) ** 0.5, cfg)
        out[i] = pref * scale * val
    return out if np.ndim(z) else float(out[0])


def _sap_ul_exponent(model: DerivedModel, z, cfg: QuadConfig):
    """SAPs in backhaul UL seen by an MBS, thinned by their own association."""
    prm = model.params
    act = model.ul_b
    if act == 0.0 or prm.lambda_s == 0.0:
        return np.zeros_like(z)
    d = model.delta
    Ms = prm.M_s
    ab = model.a_b
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    for i, zi in enumerate(zz):
        scale = (zi * model.powers.P_sb / Ms) ** d
        c = ab * scale

        def f(y, c=c):
            # 1 - (1 + y**(-1/delta))**(-Ms) computed stably for large y
            g = -np.expm1(-Ms * np.log1p(y ** (-1.0 / d)))
            return g * -np.expm1(-c * y)

        val = _log_integral(f, 1.0 / max(c, 1e-300) ** 0.5, cfg)
        out[i] = act * prm.K_b * ab * scale * val
    return out if np.ndim(z) else float(out[0])


def laplace_exponent(kind: LaplaceKind, z, t=None, model: DerivedModel = None,
                     cfg: QuadConfig = INNER_CFG):
    """``-log E[exp(-z I)]`` for interference of the given kind."""
    if model is None:
        raise TypeError("model is required")
    if kind.conditional and t is None:
        raise ValueError(f"{kind.value} is conditional on the serving path loss t")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("Laplace argument must be >= 0")
    prm, pw, opt = model.params, model.powers, model.params.options
    d, alpha = model.delta, prm.alpha
    lit = opt.laplace_literal

    if kind is LaplaceKind.UE_DL:
        lam = model.lambda_u_tilde
        return lam * math.pi * model.E_SD_delta * (z * pw.P_ut) ** d * math.pi * d / math.sin(math.pi * d)

    if kind is LaplaceKind.MBS_UL:
        return (model.dl_m * _bs_exponent(model.a_m, pw.P_mt, prm.K_m, z, d, lit)
                + model.dl_s * _bs_exponent(model.a_s, pw.P_st, prm.K_s, z, d, lit))

    if kind is LaplaceKind.OC_MacroUE:
        t = np.asarray(t, dtype=float)
        macro = _bs_exponent_excl(model.a_m, pw.P_mt, prm.K_m, z, t, d, alpha)
        # SAPs can only be weaker than the serving MBS: path loss > t P_st / P_mt
        c_s = t if opt.eq41_literal else t * pw.P_st / pw.P_mt
        small = _bs_exponent_excl(model.a_s, pw.P_st, prm.K_s, z, c_s, d, alpha)
        return model.dl_m * macro + model.dl_s * small

    if kind is LaplaceKind.OC_SmallUE:
        t = np.asarray(t, dtype=float)
        small = _bs_exponent_excl(model.a_s, pw.P_st, prm.K_s, z, t, d, alpha)
        macro = _bs_exponent_excl(model.a_m, pw.P_mt, prm.K_m, z, t * pw.P_mt / pw.P_st, d, alpha)
        return model.dl_s * small + model.dl_m * macro

    if kind is LaplaceKind.UE_UL_Macro:
        return _ue_ul_exponent(model, z, model.G_m, False, cfg)

    if kind is LaplaceKind.UE_UL_Small:
        return _ue_ul_exponent(model, z, model.G_s, opt.eq18_literal, cfg)

    if kind is LaplaceKind.BH_SAP_on_DL:
        a_sb = prm.lambda_s * math.pi * model.E_SB_delta
        return model.ul_b * _bs_exponent(a_sb, pw.P_sb, prm.M_s, z, d, lit)

    if kind is LaplaceKind.BH_MBS_DL:
        t = np.asarray(t, dtype=float)
        K = prm.K_b * prm.M_s
        return model.dl_b * _bs_exponent_excl(model.a_b, pw.P_mb, K, z, t, d, alpha)

    if kind is LaplaceKind.BH_MBS_UL:
        return model.dl_b * _bs_exponent(model.a_b, pw.P_mb, prm.K_b * prm.M_s, z, d, lit)

    if kind is LaplaceKind.BH_SAP_UL:
        return _sap_ul_exponent(model, z, cfg)

    raise ValueError(f"unknown Laplace kind {kind!r}")


def interference_laplace(kind: LaplaceKind, z, t=None, model: DerivedModel = None,
                         cfg: QuadConfig = INNER_CFG):
    """E[exp(-z I)] for interference of the given kind; lies in (0, 1]."""
    return np.exp(-laplace_exponent(kind, z, t, model, cfg))
