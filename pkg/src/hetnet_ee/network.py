"""Network parameters, validation, association and derived constants.

All quantities are SI: densities per m^2, powers in W, bandwidth in Hz and
coding energies in W per (bit/s). Unit handling for human input lives in
:mod:`hetnet_ee.config`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import special as sp

from .errors import InvalidParams
from .special import LognormalShadow, frac_moment_lognormal

# Shape parameter of the gamma-approximated Voronoi cell area.
CELL_SHAPE = 3.5


@dataclass(frozen=True)
class TDD:
    tau_m: float = 0.5
    tau_s: float = 0.5
    tau_b: float = 0.5


@dataclass(frozen=True)
class FDD:
    xi_D: float = 0.5
    xi_B: float = 0.5


@dataclass(frozen=True)
class ModelOptions:
    """Switches between the printed and the self-consistent reading of a formula.

    Every default is the self-consistent reading; the ``*_literal`` flags
    restore the expression exactly as printed for auditing.
    """

    # uplink macro signal constant uses P_mt instead of P_ut
    lemma3_literal: bool = False
    # backhaul DL signal constant uses a_b**delta instead of a_b**(1/delta)
    eq21_literal: bool = False
    # small-cell UL UE interference kernel uses (1 - exp(-G_s z)) outside the u-integral
    eq18_literal: bool = False
    # SAP interferers seen by a macro UE keep an exclusion boundary at t instead of t*P_st/P_mt
    eq41_literal: bool = False
    # BS-interference Laplace exponents keep the printed Gamma(1+delta) (and pi) factors
    laplace_literal: bool = False
    # FDD backhaul UL serving-link density: "f_LU" (as printed) or "f_Lb"
    fdd_bh_serving: str = "f_LU"
    # FDD UL interfering UE density override (per m^2); None = lambda_m K_m + lambda_s K_s
    fdd_ul_interferer_density: Optional[float] = None

    def __post_init__(self):
        if self.fdd_bh_serving not in ("f_LU", "f_Lb"):
            raise InvalidParams(f"fdd_bh_serving must be 'f_LU' or 'f_Lb', got {self.fdd_bh_serving!r}")


@dataclass(frozen=True)
class SystemParams:
    lambda_m: float
    lambda_s: float
    lambda_u: float
    M_m: int = 100
    M_s: int = 4
    K_m: int = 25
    K_s: int = 1
    K_b: int = 6
    alpha: float = 3.8
    sigma2: float = 1e-13
    B: float = 10e6
    zeta_b: float = 0.0
    duplex: Union[TDD, FDD] = field(default_factory=TDD)
    shadow_D: LognormalShadow = field(default_factory=lambda: LognormalShadow(6.0))
    shadow_B: LognormalShadow = field(default_factory=lambda: LognormalShadow(3.0))
    options: ModelOptions = field(default_factory=ModelOptions)

    def __post_init__(self):
        validate(self)

    @property
    def is_fdd(self) -> bool:
        return isinstance(self.duplex, FDD)


@dataclass(frozen=True)
class PowerParams:
    P_mt: float
    P_st: float
    P_ut: float
    P_mb: float
    P_sb: float
    P_ma: float = 1.0
    P_sa: float = 0.8
    P_ua: float = 0.1
    P_mf: float = 225.0
    P_sf: float = 5.2
    P_me: float = 0.1e-9
    P_md: float = 0.8e-9
    P_se: float = 0.2e-9
    P_sd: float = 1.6e-9
    P_ue: float = 0.3e-9
    P_ud: float = 2.4e-9

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (value >= 0.0 and math.isfinite(value)):
                raise InvalidParams(f"{name} must be finite and >= 0, got {value}")


def _require(cond: bool, what: str):
    if not cond:
        raise InvalidParams(f"violated invariant: {what}")


def validate(p: SystemParams) -> None:
    _require(p.lambda_m > 0, "lambda_m > 0")
    _require(p.lambda_s >= 0, "lambda_s >= 0")
    _require(p.lambda_u > 0, "lambda_u > 0")
    for name in ("M_m", "M_s", "K_m", "K_s", "K_b"):
        v = getattr(p, name)
        _require(int(v) == v and v >= 1, f"{name} is a positive integer")
    _require(p.K_m <= p.M_m, "K_m <= M_m")
    _require(p.K_s <= p.M_s, "K_s <= M_s")
    _require(p.K_b * p.M_s <= p.M_m, "K_b * M_s <= M_m")
    _require(p.alpha > 2, "alpha > 2")
    _require(p.sigma2 >= 0, "sigma2 >= 0")
    _require(p.B > 0, "B > 0")
    _require(0.0 <= p.zeta_b <= 1.0, "0 <= zeta_b <= 1")
    d = p.duplex
    if isinstance(d, TDD):
        for name in ("tau_m", "tau_s", "tau_b"):
            _require(0.0 <= getattr(d, name) <= 1.0, f"0 <= {name} <= 1")
    elif isinstance(d, FDD):
        _require(0.0 <= d.xi_D <= 1.0, "0 <= xi_D <= 1")
        _require(0.0 <= d.xi_B <= 1.0, "0 <= xi_B <= 1")
    else:
        raise InvalidParams(f"duplex must be TDD or FDD, got {type(d).__name__}")


@dataclass(frozen=True)
class DerivedModel:
    """Every derived constant the rate and power formulas consume.

    Carries the ``params`` and ``powers`` it was derived from, so rate
    functions only need the model.
    """

    params: SystemParams
    powers: PowerParams
    delta: float
    beta_m: float
    beta_s: float
    beta_b: float
    E_SD_delta: float
    E_SB_delta: float
    a_m: float
    a_s: float
    a_b: float
    G_m: float
    G_s: float
    G_U: float
    lambda_u_tilde: float
    A_m: float
    A_s: float
    nu_m_D: float
    nu_m_U: float
    nu_b_D: float
    nu_b_U: float
    Delta_s: int

    # Activity factors of each transmitter class on the band being analysed.
    # TDD: the DL probabilities; FDD: every transmitter is always on its band.
    @property
    def dl_m(self) -> float:
        return 1.0 if self.params.is_fdd else self.params.duplex.tau_m

    @property
    def dl_s(self) -> float:
        return 1.0 if self.params.is_fdd else self.params.duplex.tau_s

    @property
    def dl_b(self) -> float:
        return 1.0 if self.params.is_fdd else self.params.duplex.tau_b

    @property
    def ul_b(self) -> float:
        return 1.0 if self.params.is_fdd else 1.0 - self.params.duplex.tau_b


def association_probabilities(params: SystemParams, powers: PowerParams) -> tuple[float, float]:
    """Probabilities that a UE attaches to the macro tier and the small-cell tier."""
    delta = 2.0 / params.alpha
    wm = params.lambda_m * powers.P_mt ** delta
    ws = params.lambda_s * powers.P_st ** delta
    A_m = wm / (wm + ws)
    return A_m, 1.0 - A_m


def ul_interferer_density(params: SystemParams) -> float:
    if params.is_fdd:
        override = params.options.fdd_ul_interferer_density
        if override is not None:
            return override
        return params.lambda_m * params.K_m + params.lambda_s * params.K_s
    d = params.duplex
    return (1.0 - d.tau_m) * params.lambda_m * params.K_m + (1.0 - d.tau_s) * params.lambda_s * params.K_s


def derive(params: SystemParams, powers: PowerParams) -> DerivedModel:
    validate(params)
    opt = params.options
    delta = 2.0 / params.alpha
    beta_m = params.K_m / params.M_m
    beta_s = params.K_s / params.M_s
    beta_b = params.K_b * params.M_s / params.M_m
    esd = frac_moment_lognormal(params.shadow_D, delta)
    esb = frac_moment_lognormal(params.shadow_B, delta)
    a_m = params.lambda_m * math.pi * esd
    a_s = params.lambda_s * math.pi * esd
    a_b = params.lambda_m * math.pi * esb
    if powers.P_mt <= 0 or powers.P_st <= 0:
        raise InvalidParams("violated invariant: P_mt > 0 and P_st > 0 (association is undefined otherwise)")
    G_m = a_m + a_s * (powers.P_st / powers.P_mt) ** delta
    G_s = a_s + a_m * (powers.P_mt / powers.P_st) ** delta
    G_U = (params.lambda_s + params.lambda_m) * math.pi * esd
    A_m, A_s = association_probabilities(params, powers)
    g_inv = math.gamma(1.0 + 1.0 / delta)
    nu_m_D = powers.P_mt * (1.0 - beta_m) * G_m ** (1.0 / delta) / (beta_m * g_inv)
    nu_m_U = (1.0 - beta_m) * params.M_m * (powers.P_mt if opt.lemma3_literal else powers.P_ut)
    ab_pow = delta if opt.eq21_literal else 1.0 / delta
    nu_b_D = powers.P_mb * (1.0 - beta_b) * a_b ** ab_pow / (beta_b * g_inv)
    nu_b_U = (1.0 - beta_b) * params.M_m * powers.P_sb
    return DerivedModel(
        params=params, powers=powers, delta=delta,
        beta_m=beta_m, beta_s=beta_s, beta_b=beta_b,
        E_SD_delta=esd, E_SB_delta=esb,
        a_m=a_m, a_s=a_s, a_b=a_b, G_m=G_m, G_s=G_s, G_U=G_U,
        lambda_u_tilde=ul_interferer_density(params),
        A_m=A_m, A_s=A_s,
        nu_m_D=nu_m_D, nu_m_U=nu_m_U, nu_b_D=nu_b_D, nu_b_U=nu_b_U,
        Delta_s=params.M_s - params.K_s + 1,
    )


def macro_load_mean(params: SystemParams, powers: PowerParams) -> float:
    """Mean number of UEs in a macro cell, A_m * lambda_u / lambda_m."""
    A_m, _ = association_probabilities(params, powers)
    return A_m * params.lambda_u / params.lambda_m


def cell_load_pmf(n, mu: float):
    """P(N = n) for the number of UEs in a cell with mean load ``mu``.

    Negative binomial with shape 3.5 (gamma-approximated cell area mixing a
    Poisson count). Vectorised over ``n``.
    """
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("n must be >= 0")
    if mu == 0:
        out = np.where(n == 0, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out
    c = CELL_SHAPE
    logp = (c * math.log(c) + sp.gammaln(n + c) - sp.gammaln(c) - sp.gammaln(n + 1.0)
            + sp.xlogy(n, mu) - (n + c) * math.log(mu + c))
    out = np.exp(logp)
    return float(out) if out.ndim == 0 else out


def underload_probability(K: int, params: SystemParams, powers: PowerParams) -> tuple[float, float]:
    """(P(N_m < K), closed-form upper bound) for a macro cell limited to K UEs.

    The bound is valid whenever A_m >= 1/2.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    n = np.arange(K, dtype=float)
    exact = float(np.sum(cell_load_pmf(n, macro_load_mean(params, powers))))
    c = CELL_SHAPE
    terms = np.exp(sp.gammaln(n + c) - sp.gammaln(n + 1.0) + c * math.log(c) - sp.gammaln(c))
    bound = (2.0 * params.lambda_m / params.lambda_u) ** c * float(np.sum(terms))
    return min(exact, 1.0), bound
