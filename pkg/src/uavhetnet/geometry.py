"""Nearest-neighbour distance laws of the three point processes.

All densities come from void probabilities ``exp(-lambda |B|)`` of the
relevant ball: a 2-D disk for ground TBSs seen from the ground, a half-ball
for aerial nodes seen from a ground user, a ball clipped by the ground plane
for UAV-BSs seen from an aerial node at height ``h``.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import DomainError, los_probability, los_weight
from .params import NetworkParams

__all__ = [
    "pdf_nearest_tbs",
    "cdf_nearest_tbs",
    "pdf_nearest_uav",
    "cdf_nearest_uav",
    "pdf_xhaul_tbs",
    "cdf_xhaul_tbs",
    "pdf_xhaul_uavbs",
    "cdf_xhaul_uavbs",
    "clipped_ball_volume",
    "THETA_LAWS",
    "theta_average_weights",
]


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


def _check_nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("distance must be non-negative")
    return x


def pdf_nearest_tbs(x, lambda_m: float):
    """``2 pi lambda x exp(-pi lambda x^2)``."""
    x = _check_nonneg(x)
    return _out(2.0 * math.pi * lambda_m * x * np.exp(-math.pi * lambda_m * (x * x)))


def cdf_nearest_tbs(x, lambda_m: float):
    x = _check_nonneg(x)
    return _out(-np.expm1(-math.pi * lambda_m * (x * x)))


def _check_weight(weight: float):
    if not 0.0 < weight <= 1.0:
        raise DomainError(f"visibility weight must lie in (0, 1], got {weight!r}")


def pdf_nearest_uav(x, lambda_ua: float, weight: float):
    """Nearest LoS (``weight = W'_L``) or NLoS (``W'_N``) UAV-AP on the half-space.

    ``2 pi lambda W' x^2 exp(-(2/3) pi lambda W' x^3)``.
    """
    _check_weight(weight)
    x = _check_nonneg(x)
    lw = lambda_ua * weight
    return _out(2.0 * math.pi * lw * x * x * np.exp(-(2.0 / 3.0) * math.pi * lw * x ** 3))


def cdf_nearest_uav(x, lambda_ua: float, weight: float):
    _check_weight(weight)
    x = _check_nonneg(x)
    return _out(-np.expm1(-(2.0 / 3.0) * math.pi * lambda_ua * weight * x ** 3))


def pdf_xhaul_tbs(x, h: float, lambda_m: float):
    """Nearest ground TBS from an aerial point at height ``h``; zero below ``h``."""
    x = np.asarray(x, dtype=float)
    above = x >= h
    xs = np.where(above, x, h)
    val = 2.0 * math.pi * lambda_m * xs * np.exp(-math.pi * lambda_m * (xs * xs - h * h))
    return _out(np.where(above, val, 0.0))


def cdf_xhaul_tbs(x, h: float, lambda_m: float):
    x = np.asarray(x, dtype=float)
    xs = np.maximum(x, h)
    return _out(-np.expm1(-math.pi * lambda_m * (xs * xs - h * h)))


def clipped_ball_volume(x, h: float):
    """Volume of the ball of radius ``x`` centred at height ``h`` above the ground.

    ``(4/3) pi x^3`` for ``x <= h``; otherwise the spherical cap below the
    ground is removed, leaving ``(2/3) pi x^3 + pi h x^2 - (1/3) pi h^3``.
    """
    x = np.asarray(x, dtype=float)
    full = (4.0 / 3.0) * math.pi * x ** 3
    cut = (2.0 / 3.0) * math.pi * x ** 3 + math.pi * h * x * x - math.pi * h ** 3 / 3.0
    return _out(np.where(x <= h, full, cut))


def pdf_xhaul_uavbs(x, h: float, lambda_ub: float):
    """Nearest UAV-BS from an aerial point at height ``h``.

    ``4 pi lambda x^2 exp(-(4/3) pi lambda x^3)`` for ``x <= h`` and
    ``2 pi lambda (x^2 + x h) exp(-lambda V(x))`` beyond, ``V`` being the
    ground-clipped ball volume.
    """
    x = _check_nonneg(x)
    surf = np.where(x <= h, 4.0 * math.pi * x * x, 2.0 * math.pi * (x * x + x * h))
    return _out(lambda_ub * surf * np.exp(-lambda_ub * np.asarray(clipped_ball_volume(x, h))))


def cdf_xhaul_uavbs(x, h: float, lambda_ub: float):
    x = _check_nonneg(x)
    return _out(-np.expm1(-lambda_ub * np.asarray(clipped_ball_volume(x, h))))


THETA_LAWS = ("exact", "uniform")

_GL_T, _GL_W = np.polynomial.legendre.leggauss(48)
_THETA = (math.pi / 4) * (_GL_T + 1.0)
_THETA_W = (math.pi / 4) * _GL_W


def theta_average_weights(law: str, los: bool, params: NetworkParams):
    """Nodes ``cos(theta)`` and weights of the tagged UAV-AP's polar-angle law.

    ``"exact"``: the angle density of the nearest LoS (NLoS) UAV-AP,
    ``W_L(theta) sin(theta) / W'_L`` (resp. NLoS); ``"uniform"``: ``theta``
    uniform on ``[-pi/2, pi/2]``.
    """
    if law == "uniform":
        w = _THETA_W * (2.0 / math.pi)
    elif law == "exact":
        wl = los_probability(_THETA, params.env)
        dens = (wl if los else 1.0 - wl) * np.sin(_THETA)
        norm = los_weight(params.env) if los else 1.0 - los_weight(params.env)
        w = _THETA_W * dens / norm
    else:
        raise ValueError(f"theta law must be one of {THETA_LAWS}")
    return np.cos(_THETA), w

