"""Monte Carlo simulation of the two-tier network.

Each replicate places Poisson stations in a disk around a typical receiver at
the origin and evaluates one SINR. Two channel modes exist:

``GammaEffective``
    interferers carry the effective fading ``g ~ Gamma(K, 1)`` of a K-stream
    precoder seen through an independent channel, and MIMO signals use their
    deterministic equivalents. This is the propagation model of the
    analysis, so it isolates the geometry and the integrals.
``FullChannel``
    the tagged link is built from complex Gaussian channel matrices with real
    zero-forcing precoders/filters; interferers keep the effective fading.

Every random draw comes from ``default_rng([seed, stream, index])`` so any
single replicate can be regenerated on its own.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import precoding
from .errors import EmptyTier, InvalidParams, RankDeficient
from .laplace import LaplaceKind, laplace_exponent
from .network import DerivedModel, PowerParams, SystemParams, derive
from .rates import prefactor

# Truncation of the disk: interference from beyond R relative to the
# in-disk interference from [r_ref, R] is (R / r_ref)**(2 - alpha).
TRUNCATION_TARGET = 0.005
MAX_REJECTIONS = 10_000


class ChannelMode(enum.Enum):
    GammaEffective = "gamma"
    FullChannel = "full"


class Link(enum.Enum):
    MacroDL = "m_DL"
    MacroUL = "m_UL"
    SmallDL = "s_DL"
    SmallUL = "s_UL"
    BackhaulDL = "b_DL"
    BackhaulUL = "b_UL"


_STREAM = {"topology": 0, Link.MacroDL: 1, Link.MacroUL: 2, Link.SmallDL: 3,
           Link.SmallUL: 4, Link.BackhaulDL: 5, Link.BackhaulUL: 6, "laplace": 7,
           "association": 8, "bd": 9, "deq": 10}


@dataclass(frozen=True)
class SimConfig:
    replicates: int = 2000
    seed: int = 1
    channel: str = "gamma"
    workers: int = 1
    radius_factor: float = 19.0
    radius_m: Optional[float] = None

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidParams("replicates must be >= 1")
        if self.seed < 0:
            raise InvalidParams("seed must be >= 0")
        if self.workers < 1:
            raise InvalidParams("workers must be >= 1")
        if self.radius_factor <= 1.0:
            raise InvalidParams("radius_factor must exceed 1")
        if self.radius_m is not None and self.radius_m <= 0:
            raise InvalidParams("radius_m must be > 0")
        ChannelMode(self.channel)

    @property
    def mode(self) -> ChannelMode:
        return ChannelMode(self.channel)


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    ci95_halfwidth: float
    replicates: int
    rejections: int = 0

    @property
    def interval(self) -> tuple[float, float]:
        return self.mean - self.ci95_halfwidth, self.mean + self.ci95_halfwidth


def truncation_radius_factor(alpha: float, target: float = TRUNCATION_TARGET) -> float:
    """Smallest R / r_ref with (R/r_ref)**(2-alpha) / (1 - (R/r_ref)**(2-alpha)) <= target."""
    return (target / (1.0 + target)) ** (1.0 / (2.0 - alpha))


def sim_radius(params: SystemParams, cfg: SimConfig) -> float:
    """Disk radius: ``radius_factor`` mean MBS spacings ``1 / sqrt(pi lambda_m)``."""
    if cfg.radius_m is not None:
        return cfg.radius_m
    return cfg.radius_factor / math.sqrt(math.pi * params.lambda_m)


# ---------------------------------------------------------------------------
# topology

@dataclass(frozen=True)
class Topology:
    """Stations and UEs in a disk; shadowing values are toward the origin."""

    radius: float
    mbs: np.ndarray
    sap: np.ndarray
    ue: np.ndarray
    mbs_SD: np.ndarray
    mbs_SB: np.ndarray
    sap_SD: np.ndarray
    sap_SB: np.ndarray
    ue_SD: np.ndarray

    @staticmethod
    def _r(points):
        return np.hypot(points[:, 0], points[:, 1])

    @property
    def r_mbs(self):
        return self._r(self.mbs)

    @property
    def r_sap(self):
        return self._r(self.sap)


def _disk_points(rng, density: float, radius: float) -> np.ndarray:
    n = rng.poisson(density * math.pi * radius * radius) if density > 0 else 0
    r = radius * np.sqrt(rng.random(n))
    th = 2.0 * math.pi * rng.random(n)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def _draw_topology(params: SystemParams, radius: float, rng, with_ues: bool = True) -> Topology:
    mbs = _disk_points(rng, params.lambda_m, radius)
    sap = _disk_points(rng, params.lambda_s, radius)
    ue = _disk_points(rng, params.lambda_u, radius) if with_ues else np.zeros((0, 2))
    sd, sb = params.shadow_D, params.shadow_B
    return Topology(radius, mbs, sap, ue,
                    sd.sample(rng, len(mbs)), sb.sample(rng, len(mbs)),
                    sd.sample(rng, len(sap)), sb.sample(rng, len(sap)),
                    sd.sample(rng, len(ue)))


def sample_topology(params: SystemParams, cfg: SimConfig, replicate_index: int) -> Topology:
    """Topology of one replicate, fully determined by (seed, replicate_index)."""
    rng = np.random.default_rng([cfg.seed, _STREAM["topology"], replicate_index])
    return _draw_topology(params, sim_radius(params, cfg), rng)


@dataclass(frozen=True)
class Association:
    """Serving station of a receiver at the origin."""

    tier: str            # "macro" or "small"
    index: int
    path_loss: float
    backhaul_index: int  # MBS serving a SAP placed at the origin
    backhaul_path_loss: float


def associate(topology: Topology, powers: PowerParams, alpha: float) -> Association:
    """Largest average received power for a UE at the origin (shadowing
    included), and the smallest shadowed path loss for a SAP at the origin."""
    if len(topology.mbs) == 0:
        raise EmptyTier("no MBS in the simulation window")
    Lm = topology.r_mbs ** alpha / topology.mbs_SD
    im = int(np.argmin(Lm))
    tier, idx, L = "macro", im, float(Lm[im])
    if len(topology.sap):
        Ls = topology.r_sap ** alpha / topology.sap_SD
        js = int(np.argmin(Ls))
        if powers.P_st / Ls[js] > powers.P_mt / Lm[im]:
            tier, idx, L = "small", js, float(Ls[js])
    Lb = topology.r_mbs ** alpha / topology.mbs_SB
    ib = int(np.argmin(Lb))
    return Association(tier, idx, L, ib, float(Lb[ib]))


def empirical_macro_share(params: SystemParams, powers: PowerParams, cfg: SimConfig,
                          ues: int) -> float:
    """Fraction of ``ues`` independent typical UEs that attach to an MBS."""
    radius = sim_radius(params, cfg)
    hits = 0
    for i in range(ues):
        rng = np.random.default_rng([cfg.seed, _STREAM["association"], i])
        topo = _draw_topology(params, radius, rng, with_ues=False)
        hits += associate(topo, powers, params.alpha).tier == "macro"
    return hits / ues


# ---------------------------------------------------------------------------
# interference

def _gamma_sum(rng, shape_k: float, scale: np.ndarray) -> float:
    if scale.size == 0:
        return 0.0
    return float(np.sum(scale * rng.gamma(shape_k, 1.0, scale.size)))


def _bs_interference(rng, r, shadow, alpha, P, K, activity, exclude=None) -> float:
    """Sum of P/K * g / L over active stations, g ~ Gamma(K, 1)."""
    L = r ** alpha / shadow
    on = rng.random(L.size) < activity
    if exclude is not None:
        on[exclude] = False
    return _gamma_sum(rng, K, (P / K) / L[on])


def _ue_interference(rng, model: DerivedModel, radius: float, thin_G: Optional[float]) -> float:
    """Scheduled uplink UEs (density lambda_u_tilde) around the origin.

    With ``thin_G`` a UE at path loss L is kept with probability
    1 - exp(-G L**delta): it must be closer to its own station than to the
    receiver.
    """
    prm = model.params
    pts = _disk_points(rng, model.lambda_u_tilde, radius)
    if len(pts) == 0:
        return 0.0
    S = prm.shadow_D.sample(rng, len(pts))
    L = np.hypot(pts[:, 0], pts[:, 1]) ** prm.alpha / S
    if thin_G is not None:
        keep = rng.random(L.size) < -np.expm1(-thin_G * L ** model.delta)
        L = L[keep]
    return float(np.sum(model.powers.P_ut * rng.exponential(1.0, L.size) / L))


def _serving_path_loss(rng, G: float, delta: float) -> float:
    """Draw from G delta t**(delta-1) exp(-G t**delta)."""
    return (rng.exponential() / G) ** (1.0 / delta)


# ---------------------------------------------------------------------------
# full-channel signal terms

def _served_path_losses(rng, model: DerivedModel, topo: Topology, station_xy, own_tier: str,
                        own_index: int, count: int, radius: float):
    """Path losses from ``count`` UEs served by the given station.

    UEs are drawn in a window around the station and associated against
    every station in the topology (fresh shadowing per UE-station pair).
    Returns None when the cell holds fewer than ``count`` UEs.
    """
    prm, pw = model.params, model.powers
    cx, cy = station_xy
    win = _disk_points(rng, prm.lambda_u, radius)
    win = win + np.array([cx, cy])
    if len(win) < count:
        return None
    a = prm.alpha
    dm = np.hypot(win[:, None, 0] - topo.mbs[None, :, 0], win[:, None, 1] - topo.mbs[None, :, 1])
    Lm = np.maximum(dm, 1.0) ** a / prm.shadow_D.sample(rng, dm.shape)
    best_m = np.argmin(Lm, axis=1)
    Pm = pw.P_mt / Lm[np.arange(len(win)), best_m]
    if len(topo.sap):
        ds = np.hypot(win[:, None, 0] - topo.sap[None, :, 0], win[:, None, 1] - topo.sap[None, :, 1])
        Ls = np.maximum(ds, 1.0) ** a / prm.shadow_D.sample(rng, ds.shape)
        best_s = np.argmin(Ls, axis=1)
        Ps = pw.P_st / Ls[np.arange(len(win)), best_s]
    else:
        best_s = np.full(len(win), -1)
        Ps = np.zeros(len(win))
    if own_tier == "macro":
        mine = (Pm >= Ps) & (best_m == own_index)
        L = Lm[mine, own_index]
    else:
        mine = (Ps > Pm) & (best_s == own_index)
        L = Ls[mine, own_index]
    if L.size < count:
        return None
    return rng.choice(L, size=count, replace=False)


def zf_macro_dl_signal(rng, P: float, L_served: np.ndarray, M: int) -> float:
    """Received signal power P * xi**2 of every stream of a total-power ZF precoder.

    With ``H = D^-1/2 Hw`` the trace ``tr[(H H^*)^-1]`` equals
    ``sum_k L_k [(Hw Hw^*)^-1]_kk``, which keeps the inversion well conditioned
    when path losses span many decades.
    """
    Hw = precoding.complex_gaussian(rng, (L_served.size, M))
    Gw = precoding.zf_receive_noise_factors(Hw.conj().T)
    return P / float(np.sum(L_served * Gw))


def zf_ul_signal(rng, P: float, L_served: np.ndarray, M: int) -> float:
    """P / [(H^* H)^-1]_11: ZF receive SINR numerator for stream 0 (noise-normalised)."""
    Hw = precoding.complex_gaussian(rng, (M, L_served.size))
    return P / (L_served[0] * precoding.zf_receive_noise_factors(Hw)[0])


def zf_small_signal(rng, M: int, K: int) -> float:
    """|h^* w|**2 for a unit-norm ZF direction of stream 0, ~ Gamma(M-K+1, 1)."""
    H = precoding.complex_gaussian(rng, (K, M))
    W = precoding.column_normalised_zf(H)
    return float(np.abs(H[0] @ W[:, 0]) ** 2)


# ---------------------------------------------------------------------------
# SINR of one replicate

class _Reject(Exception):
    pass


def sinr_sample(link: Link, model: DerivedModel, topology: Topology, rng,
                mode: ChannelMode = ChannelMode.GammaEffective) -> float:
    """SINR of the typical receiver of ``link`` at the origin.

    Raises ``_Reject`` when the topology does not realise the link (e.g. the
    origin UE is served by the other tier); the caller redraws.
    """
    prm, pw = model.params, model.powers
    a, d = prm.alpha, model.delta
    fdd = prm.is_fdd
    R = topology.radius
    full = mode is ChannelMode.FullChannel
    noise = prm.sigma2

    if link in (Link.MacroDL, Link.SmallDL):
        asg = associate(topology, pw, a)
        want = "macro" if link is Link.MacroDL else "small"
        if asg.tier != want:
            raise _Reject
        ex_m = asg.index if want == "macro" else None
        ex_s = asg.index if want == "small" else None
        I = _bs_interference(rng, topology.r_mbs, topology.mbs_SD, a, pw.P_mt, prm.K_m, model.dl_m, ex_m)
        I += _bs_interference(rng, topology.r_sap, topology.sap_SD, a, pw.P_st, prm.K_s, model.dl_s, ex_s)
        if not fdd:
            I += _ue_interference(rng, model, R, None)
        t = asg.path_loss
        if link is Link.MacroDL:
            if full:
                others = _served_path_losses(rng, model, topology, topology.mbs[asg.index], "macro",
                                             asg.index, prm.K_m - 1, 3.0 / math.sqrt(math.pi * prm.lambda_m))
                if others is None:
                    raise _Reject
                S = zf_macro_dl_signal(rng, pw.P_mt, np.concatenate([[t], others]), prm.M_m)
            else:
                S = model.nu_m_D
        else:
            g = zf_small_signal(rng, prm.M_s, prm.K_s) if full else rng.gamma(model.Delta_s)
            S = pw.P_st / prm.K_s * g / t
        return S / (I + noise)

    if link in (Link.MacroUL, Link.SmallUL):
        macro = link is Link.MacroUL
        G_serv = model.G_U if fdd else (model.G_m if macro else model.G_s)
        t = _serving_path_loss(rng, G_serv, d)
        I = _ue_interference(rng, model, R, model.G_m if macro else model.G_s)
        if not fdd:
            I += _bs_interference(rng, topology.r_mbs, topology.mbs_SD, a, pw.P_mt, prm.K_m, model.dl_m)
            I += _bs_interference(rng, topology.r_sap, topology.sap_SD, a, pw.P_st, prm.K_s, model.dl_s)
        if macro:
            if full:
                others = np.array([_serving_path_loss(rng, G_serv, d) for _ in range(prm.K_m - 1)])
                S = zf_ul_signal(rng, pw.P_ut, np.concatenate([[t], others]), prm.M_m)
            else:
                S = model.nu_m_U / t
        else:
            g = zf_small_signal(rng, prm.M_s, prm.K_s) if full else rng.gamma(model.Delta_s)
            S = pw.P_ut * g / t
        return S / (I + noise)

    Kb = prm.K_b * prm.M_s
    if link is Link.BackhaulDL:
        asg = associate(topology, pw, a)
        I = _bs_interference(rng, topology.r_mbs, topology.mbs_SB, a, pw.P_mb, Kb, model.dl_b,
                             asg.backhaul_index)
        if not fdd:
            I += _bs_interference(rng, topology.r_sap, topology.sap_SB, a, pw.P_sb, prm.M_s, model.ul_b)
        t = asg.backhaul_path_loss
        if full:
            others = np.array([_serving_path_loss(rng, model.a_b, d) for _ in range(prm.K_b - 1)])
            L = np.repeat(np.concatenate([[t], others]), prm.M_s)
            S = zf_macro_dl_signal(rng, pw.P_mb, L, prm.M_m)
        else:
            S = model.nu_b_D
        return S / (I + noise)

    if link is Link.BackhaulUL:
        if fdd and prm.options.fdd_bh_serving == "f_LU":
            G_serv = model.G_U
        else:
            G_serv = model.a_b
        t = _serving_path_loss(rng, G_serv, d)
        I = _sap_ul_interference(rng, model, R)
        if not fdd:
            I += _bs_interference(rng, topology.r_mbs, topology.mbs_SB, a, pw.P_mb, Kb, model.dl_b)
        if full:
            others = np.array([_serving_path_loss(rng, G_serv, d) for _ in range(prm.K_b - 1)])
            L = np.repeat(np.concatenate([[t], others]), prm.M_s)
            # every SAP antenna sends its stream at P_sb, as in the large-system signal term
            S = zf_ul_signal(rng, pw.P_sb, L, prm.M_m)
        else:
            S = model.nu_b_U / t
        return S / (I + noise)

    raise ValueError(f"unknown link {link!r}")


def _sap_ul_interference(rng, model: DerivedModel, radius: float) -> float:
    """Scheduled SAPs (K_b per MBS) sending backhaul uplink toward the origin MBS."""
    prm, pw = model.params, model.powers
    if prm.lambda_s == 0.0:
        return 0.0
    pts = _disk_points(rng, prm.K_b * prm.lambda_m * model.ul_b, radius)
    if len(pts) == 0:
        return 0.0
    L = np.hypot(pts[:, 0], pts[:, 1]) ** prm.alpha / prm.shadow_B.sample(rng, len(pts))
    keep = rng.random(L.size) < -np.expm1(-model.a_b * L ** model.delta)
    L = L[keep]
    return _gamma_sum(rng, prm.M_s, (pw.P_sb / prm.M_s) / L)


# ---------------------------------------------------------------------------
# rate estimation

def _one_replicate(link: Link, model: DerivedModel, cfg: SimConfig, radius: float, index: int):
    rng = np.random.default_rng([cfg.seed, _STREAM[link], index])
    for attempt in range(MAX_REJECTIONS):
        topo = _draw_topology(model.params, radius, rng, with_ues=False)
        try:
            return sinr_sample(link, model, topo, rng, cfg.mode), attempt
        except (_Reject, EmptyTier, RankDeficient):
            continue
    raise EmptyTier(f"{link.value}: no valid topology after {MAX_REJECTIONS} draws")


def sample_sinrs(link: Link, params: SystemParams, powers: PowerParams, cfg: SimConfig):
    """(SINR per replicate, total rejected draws)."""
    model = derive(params, powers)
    radius = sim_radius(params, cfg)
    idx = range(cfg.replicates)
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            out = list(ex.map(_one_replicate, *zip(*[(link, model, cfg, radius, i) for i in idx]),
                              chunksize=64))
    else:
        out = [_one_replicate(link, model, cfg, radius, i) for i in idx]
    sinr = np.array([s for s, _ in out])
    return sinr, int(sum(r for _, r in out))


def estimate_spectral_efficiency(link: Link, params: SystemParams, powers: PowerParams,
                                 cfg: SimConfig) -> RateEstimate:
    """Mean log2(1 + SINR) of the link with a normal 95% CI (no bandwidth prefactor)."""
    if params.lambda_s == 0.0 and link not in (Link.MacroDL, Link.MacroUL):
        return RateEstimate(0.0, 0.0, 0)
    sinr, rejected = sample_sinrs(link, params, powers, cfg)
    se = np.log2(1.0 + sinr)
    n = se.size
    half = 1.959963984540054 * float(np.std(se, ddof=1)) / math.sqrt(n) if n > 1 else math.inf
    return RateEstimate(float(np.mean(se)), half, n, rejected)


def estimate_rate(link: Link, params: SystemParams, powers: PowerParams, cfg: SimConfig) -> RateEstimate:
    """Spectral efficiency scaled by the link's bandwidth/stream prefactor."""
    pre = prefactor(link.value, derive(params, powers))
    if pre == 0.0:
        return RateEstimate(0.0, 0.0, 0)
    est = estimate_spectral_efficiency(link, params, powers, cfg)
    return RateEstimate(pre * est.mean, pre * est.ci95_halfwidth, est.replicates, est.rejections)


# ---------------------------------------------------------------------------
# interference Laplace transforms sampled in path-loss space

@dataclass(frozen=True)
class _Process:
    a: float             # lam * pi * E[S**delta]
    shape: float         # effective fading Gamma(shape, 1)
    power: float         # per-stream transmit power
    exclusion: float     # interferers only beyond this path loss
    activity: float
    thin_G: Optional[float] = None


def _processes(kind: LaplaceKind, model: DerivedModel, t: Optional[float]) -> list[_Process]:
    prm, pw = model.params, model.powers
    ue_a = model.lambda_u_tilde * math.pi * model.E_SD_delta
    Kb = prm.K_b * prm.M_s
    sap_b = prm.lambda_s * math.pi * model.E_SB_delta
    k = LaplaceKind
    if kind is k.UE_DL:
        return [_Process(ue_a, 1, pw.P_ut, 0.0, 1.0)]
    if kind is k.OC_MacroUE:
        return [_Process(model.a_m, prm.K_m, pw.P_mt / prm.K_m, t, model.dl_m),
                _Process(model.a_s, prm.K_s, pw.P_st / prm.K_s, t * pw.P_st / pw.P_mt, model.dl_s)]
    if kind is k.OC_SmallUE:
        return [_Process(model.a_s, prm.K_s, pw.P_st / prm.K_s, t, model.dl_s),
                _Process(model.a_m, prm.K_m, pw.P_mt / prm.K_m, t * pw.P_mt / pw.P_st, model.dl_m)]
    if kind is k.MBS_UL:
        return [_Process(model.a_m, prm.K_m, pw.P_mt / prm.K_m, 0.0, model.dl_m),
                _Process(model.a_s, prm.K_s, pw.P_st / prm.K_s, 0.0, model.dl_s)]
    if kind is k.UE_UL_Macro:
        return [_Process(ue_a, 1, pw.P_ut, 0.0, 1.0, model.G_m)]
    if kind is k.UE_UL_Small:
        return [_Process(ue_a, 1, pw.P_ut, 0.0, 1.0, model.G_s)]
    if kind is k.BH_SAP_on_DL:
        return [_Process(sap_b, prm.M_s, pw.P_sb / prm.M_s, 0.0, model.ul_b)]
    if kind is k.BH_MBS_DL:
        return [_Process(model.a_b, Kb, pw.P_mb / Kb, t, model.dl_b)]
    if kind is k.BH_MBS_UL:
        return [_Process(model.a_b, Kb, pw.P_mb / Kb, 0.0, model.dl_b)]
    if kind is k.BH_SAP_UL:
        return [_Process(prm.K_b * model.a_b, prm.M_s, pw.P_sb / prm.M_s, 0.0, model.ul_b, model.a_b)]
    raise ValueError(f"unknown Laplace kind {kind!r}")


def sample_laplace(kind: LaplaceKind, z, model: DerivedModel, t: Optional[float] = None,
                   samples: int = 1_000_000, seed: int = 1, points: int = 256,
                   chunk: int = 50_000) -> np.ndarray:
    """Empirical E[exp(-z I)] for each ``z`` from ``samples`` interference draws.

    Interferer path losses are the first ``points`` arrivals of the Poisson
    process on (0, inf) with intensity ``delta a x**(delta-1)`` beyond the
    exclusion boundary, each carrying Gamma(shape, 1) fading and an
    independent activity coin. The far tail beyond the last arrival is folded
    in through its mean, exp(-z E[I_tail]); it is below 1e-3 of the
    exponent for the default ``points``.
    """
    if kind.conditional and t is None:
        raise ValueError(f"{kind.value} needs the serving path loss t")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    d = model.delta
    procs = [p for p in _processes(kind, model, t) if p.a > 0 and p.activity > 0]
    rng = np.random.default_rng([seed, _STREAM["laplace"], list(LaplaceKind).index(kind)])
    acc = np.zeros(z.size)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        I = np.zeros(n)
        tail = np.zeros(n)
        for p in procs:
            arrivals = np.cumsum(rng.exponential(1.0, (n, points)), axis=1)
            x = (p.exclusion ** d + arrivals / p.a) ** (1.0 / d)
            on = rng.random((n, points)) < p.activity
            if p.thin_G is not None:
                on &= rng.random((n, points)) < -np.expm1(-p.thin_G * x ** d)
            g = rng.gamma(p.shape, 1.0, (n, points))
            I += np.sum(np.where(on, p.power * g / x, 0.0), axis=1)
            xN = x[:, -1]
            tail += p.activity * p.power * p.shape * d * p.a * xN ** (d - 1.0) / (1.0 - d)
        acc += np.sum(np.exp(-np.outer(I + tail, z)), axis=0)
        done += n
    return acc / samples


def laplace_reference_z(kind: LaplaceKind, model: DerivedModel, t: Optional[float] = None) -> float:
    """The z at which the analytic exponent equals 1 (natural unit for z)."""
    from scipy.optimize import brentq

    def f(logz):
        return math.log(float(laplace_exponent(kind, math.exp(logz), t, model)))

    return math.exp(brentq(f, -200.0, 200.0, xtol=1e-10))


# ---------------------------------------------------------------------------
# large-system and precoder comparisons

def deterministic_equivalent_check(M: int, K: int, G: float, delta: float, draws: int,
                                   seed: int = 1) -> tuple[float, float]:
    """Mean ZF downlink signal gain ``xi**2`` and its large-system value.

    Path losses of the K served UEs are drawn from the serving density with
    scale ``G``. On each draw the exact gain ``1 / tr[(H H^*)^-1]`` is paired
    with ``(M - K) / sum(L)``; interference and noise are common to both
    SINRs and cancel in the comparison. Returns the two means.
    """
    rng = np.random.default_rng([seed, _STREAM["deq"], M, K])
    full, deq = np.empty(draws), np.empty(draws)
    for i in range(draws):
        L = (rng.exponential(1.0, K) / G) ** (1.0 / delta)
        full[i] = zf_macro_dl_signal(rng, 1.0, L, M)
        deq[i] = (M - K) / np.sum(L)
    return float(np.mean(full)), float(np.mean(deq))


def bd_zf_pairs(M: int, K_b: int, M_s: int, draws: int, snr: float = 10.0, seed: int = 1):
    """Paired per-SAP backhaul rates (BD, ZF) on identical channel draws.

    Channels are i.i.d. CN(0, 1) (equal path loss) and ``snr`` is the total
    transmit power over noise plus interference.
    """
    rng = np.random.default_rng([seed, _STREAM["bd"], M, K_b, M_s])
    bd, zf = np.empty(draws), np.empty(draws)
    for i in range(draws):
        blocks = [precoding.complex_gaussian(rng, (M_s, M)) for _ in range(K_b)]
        bd[i] = precoding.bd_sum_rate(blocks, snr, 1.0) / K_b
        zf[i] = precoding.zf_sum_rate(blocks, snr, 1.0) / K_b
    return bd, zf
