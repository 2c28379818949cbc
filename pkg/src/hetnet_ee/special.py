"""Unit conversions and special functions used by the rate integrals.

The incomplete Beta and log-Gamma evaluations are delegated to
:mod:`scipy.special` (Cephes continued-fraction/series kernels). Everything
here is pure and vectorises over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError

LN10_OVER_10 = math.log(10.0) / 10.0


@dataclass(frozen=True)
class LognormalShadow:
    """Shadowing ``S = 10**(X/10)`` with ``X ~ N(0, sigma_dB**2)``."""

    sigma_dB: float = 0.0

    def __post_init__(self):
        if not (self.sigma_dB >= 0.0 and math.isfinite(self.sigma_dB)):
            raise DomainError(f"sigma_dB must be finite and >= 0, got {self.sigma_dB}")

    def moment(self, p: float) -> float:
        return frac_moment_lognormal(self, p)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.sigma_dB == 0.0:
            return np.ones(size)
        return np.exp(LN10_OVER_10 * self.sigma_dB * rng.standard_normal(size))


def dbm_to_watts(x):
    if np.ndim(x):
        return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)
    return 10.0 ** ((float(x) - 30.0) / 10.0)


def watts_to_dbm(p):
    return 10.0 * np.log10(p) + 30.0


def frac_moment_lognormal(shadow: LognormalShadow, p: float) -> float:
    """E[S**p] for lognormal shadowing: exp((p * sigma * ln10/10)**2 / 2)."""
    if p < 0:
        raise DomainError(f"moment order must be >= 0, got {p}")
    s = p * shadow.sigma_dB * LN10_OVER_10
    return math.exp(0.5 * s * s)


def _check_shapes(y, z):
    if np.any(np.asarray(y) <= 0) or np.any(np.asarray(z) <= 0):
        raise DomainError("incomplete Beta shapes must be > 0")


def incomplete_beta(x, y, z):
    """Non-regularised incomplete Beta ``B(x; y, z) = int_0^x t**(y-1) (1-t)**(z-1) dt``."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa >= 0.0)) or np.any(~(xa <= 1.0)):
        raise DomainError(f"incomplete Beta upper limit must lie in [0, 1], got {x}")
    _check_shapes(y, z)
    out = sp.betainc(y, z, xa) * np.exp(sp.betaln(y, z))
    return float(out) if np.ndim(out) == 0 else out


def incomplete_beta_upper(x, y, z):
    """``B(1; y, z) - B(x; y, z)`` without cancellation."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa >= 0.0)) or np.any(~(xa <= 1.0)):
        raise DomainError(f"incomplete Beta upper limit must lie in [0, 1], got {x}")
    _check_shapes(y, z)
    out = sp.betaincc(y, z, xa) * np.exp(sp.betaln(y, z))
    return float(out) if np.ndim(out) == 0 else out


def _c_coefficients(K: int, delta: float):
    n = np.arange(1, K + 1, dtype=float)
    a = n - delta
    b = K - n + delta
    logc = (sp.gammaln(K + 1.0) - sp.gammaln(n + 1.0) - sp.gammaln(K - n + 1.0)
            + sp.betaln(b, a))
    return a, b, np.exp(logc)


def c_alpha_k_w(w, K: int, alpha: float):
    """C_{alpha,K} as a function of the single ratio ``w = s / (t K)``.

    Uses ``B(1; b, a) - B((1+w)^-1; b, a) = B(w/(1+w); a, b)`` so every term
    is a positive regularised Beta value times a positive coefficient.
    """
    K = int(K)
    if K < 1:
        raise DomainError(f"stream count must be >= 1, got {K}")
    if not alpha > 2.0:
        raise DomainError(f"path loss exponent must exceed 2, got {alpha}")
    delta = 2.0 / alpha
    a, b, coef = _c_coefficients(K, delta)
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise DomainError("C_{alpha,K} needs s >= 0")
    with np.errstate(invalid="ignore"):
        x = np.where(np.isinf(w), 1.0, w / (1.0 + w))
    vals = sp.betainc(a, b, x[..., None])
    out = delta * np.sum(coef * vals, axis=-1)
    return float(out) if out.ndim == 0 else out


def c_alpha_k(s, t, K: int, alpha: float):
    """C_{alpha,K}(s, t): the binomial/incomplete-Beta sum from the interference
    Laplace transform with an exclusion boundary at path loss ``t``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("C_{alpha,K} needs t > 0")
    return c_alpha_k_w(np.asarray(s, dtype=float) / (t * int(K)), K, alpha)


def c_alpha_k_limit(K: int, alpha: float) -> float:
    """Value of C_{alpha,K} as s/t -> infinity (no exclusion region)."""
    return c_alpha_k_w(np.inf, K, alpha)


def path_loss_pdf(G, delta, t):
    """Density ``G delta t**(delta-1) exp(-G t**delta)`` of a serving path loss."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = G * delta * t ** (delta - 1.0) * np.exp(-G * t ** delta)
    return float(out) if out.ndim == 0 else out


def path_loss_cdf(G, delta, t):
    return -np.expm1(-G * np.asarray(t, dtype=float) ** delta)


def path_loss_mean(G: float, delta: float) -> float:
    """E[L] = Gamma(1 + 1/delta) * G**(-1/delta)."""
    return math.gamma(1.0 + 1.0 / delta) * G ** (-1.0 / delta)


def gamma_fading_moment(K: float, p: float) -> float:
    """E[g**p] for g ~ Gamma(K, 1)."""
    return math.exp(math.lgamma(K + p) - math.lgamma(K))


def rising_product(K: int, delta: float) -> float:
    """prod_{i=1}^{K-1} (i + delta), i.e. Gamma(K+delta)/Gamma(1+delta)."""
    return math.exp(math.lgamma(K + delta) - math.lgamma(1.0 + delta))
