"""Air-to-ground visibility, path loss, fading and SINR thresholds."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import Environment, NetworkParams, ServiceParams
from .quadrature import QuadSpec, integrate

__all__ = [
    "DomainError",
    "Tier",
    "Fading",
    "LinkBudget",
    "link_budget",
    "los_probability",
    "los_weight",
    "nlos_weight",
    "received_power_mean",
    "sample_fading",
    "fading_cdf",
    "sinr_thresholds",
    "alzer_eta",
]


class DomainError(ValueError):
    """Argument outside the domain of a model function."""


class Tier(enum.Enum):
    TBS_ACCESS = "tbs_access"
    UAV_LOS_ACCESS = "uav_los_access"
    UAV_NLOS_ACCESS = "uav_nlos_access"
    TBS_XHAUL = "tbs_xhaul"
    UAVBS_XHAUL = "uavbs_xhaul"


class Fading(enum.Enum):
    RAYLEIGH = "rayleigh"
    NAKAGAMI = "nakagami"


@dataclass(frozen=True)
class LinkBudget:
    tier: Tier
    k: float
    power_w: float
    alpha: float
    fading: Fading
    m: int = 1

    @property
    def shape(self) -> int:
        """Gamma shape of the power gain (1 for Rayleigh)."""
        return 1 if self.fading is Fading.RAYLEIGH else self.m


def link_budget(tier: Tier, params: NetworkParams) -> LinkBudget:
    """Coefficient, power, exponent and fading law of a link class."""
    p = params
    table = {
        Tier.TBS_ACCESS: (p.k_m, p.p_m, p.alpha_n, Fading.RAYLEIGH),
        Tier.UAV_LOS_ACCESS: (p.k_u, p.p_ua, p.alpha_l, Fading.NAKAGAMI),
        Tier.UAV_NLOS_ACCESS: (p.k_u, p.p_ua, p.alpha_n, Fading.RAYLEIGH),
        Tier.TBS_XHAUL: (p.k_m, p.p_m, p.alpha_l, Fading.RAYLEIGH),
        Tier.UAVBS_XHAUL: (p.k_u, p.p_ub, p.alpha_l, Fading.NAKAGAMI),
    }
    k, pw, alpha, fad = table[tier]
    return LinkBudget(tier, k, pw, alpha, fad, p.nakagami_m if fad is Fading.NAKAGAMI else 1)


def los_probability(theta, env: Environment):
    """LoS probability of a link at polar angle ``theta`` (radians from vertical).

    ``W_L = 1 / (1 + eta exp(-mu (phi - eta)))`` with ``phi`` the elevation
    angle in degrees, ``phi = 90 - theta * 180 / pi``.
    """
    th = np.asarray(theta, dtype=float)
    if np.any((th < 0) | (th > math.pi / 2 + 1e-12)) or np.any(np.isnan(th)):
        raise DomainError("theta must lie in [0, pi/2]")
    elev = 90.0 - np.degrees(th)
    out = 1.0 / (1.0 + env.eta * np.exp(-env.mu * (elev - env.eta)))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _los_weight(eta: float, mu: float, rel_tol: float) -> float:
    env = Environment(eta, mu)
    spec = QuadSpec(rel_tol=rel_tol, abs_tol=1e-14)
    return integrate(lambda th: los_probability(th, env) * np.sin(th), 0.0, math.pi / 2, spec)


def los_weight(env: Environment, spec: QuadSpec | None = None) -> float:
    """Angle-averaged LoS weight ``W'_L = int_0^{pi/2} W_L(theta) sin(theta) dtheta``."""
    return _los_weight(env.eta, env.mu, 1e-12 if spec is None else spec.rel_tol)


def nlos_weight(env: Environment, spec: QuadSpec | None = None) -> float:
    """``W'_N = 1 - W'_L`` (the sine weight integrates to one)."""
    return 1.0 - los_weight(env, spec)


def received_power_mean(link: LinkBudget, d):
    """Fading-free received power ``k P d^-alpha`` used for RSSI association."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("distance must be positive")
    out = link.k * link.power_w * d ** (-link.alpha)
    return float(out) if out.ndim == 0 else out


def sample_fading(link: LinkBudget | int, rng: np.random.Generator, size=None):
    """Unit-mean power gains: exponential (Rayleigh) or Gamma(m, 1/m) (Nakagami-m)."""
    m = link if isinstance(link, int) else link.shape
    if m == 1:
        return rng.standard_exponential(size)
    return rng.gamma(m, 1.0 / m, size)


def fading_cdf(x, m: int):
    """CDF of the unit-mean Gamma(m, 1/m) power gain."""
    from scipy.special import gammainc

    return gammainc(m, m * np.maximum(np.asarray(x, dtype=float), 0.0))


def sinr_thresholds(svc: ServiceParams, bandwidth_hz: float) -> tuple[float, float]:
    """Access and xHaul SINR thresholds from the rate requirements.

    ``t_a = 2^(N_u r_a / (beta B)) - 1`` and ``t_b = 2^(r_b / ((1 - beta) B)) - 1``;
    a zero bandwidth share yields an infinite threshold.
    """
    beta = svc.beta
    if beta <= 0:
        t_a = math.inf
    else:
        t_a = _pow2m1(svc.n_users * svc.rate_access_bps / (beta * bandwidth_hz))
    if beta >= 1:
        t_b = math.inf
    else:
        t_b = _pow2m1(svc.rate_xhaul_bps / ((1.0 - beta) * bandwidth_hz))
    return t_a, t_b


def _pow2m1(e: float) -> float:
    if e > 1023:
        return math.inf
    return math.expm1(e * math.log(2.0))


def alzer_eta(m: int) -> float:
    """Alzer constant ``m (m!)^(-1/m)``; equals 1 for m = 1."""
    return m * math.exp(-math.lgamma(m + 1) / m)
