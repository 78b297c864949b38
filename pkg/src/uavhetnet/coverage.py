"""SINR coverage through interference Laplace functionals.

A receiver with serving gain ``g`` (unit-mean, shape ``m_s``), serving
``K P d^-alpha`` and threshold ``t`` is covered when
``g > s (I + N)`` with ``s = t d^alpha / (K P)``. For each interfering tier
the Laplace functional of its aggregate interference is

    exp(-int_e^R mu(r) [1 - E exp(-s K_j P_j G r^-alpha_j)] dr),

where ``mu`` is the distance measure of the tier seen from the receiver,
``e`` the exclusion radius implied by RSSI association and ``R`` the
interference radius. Rayleigh serving links give the coverage directly.
Nakagami-m serving links (integer m) use the exact gamma tail through
derivatives of the Laplace functional; the Alzer binomial expansion
``P(g > y) ~ sum_n (-1)^(n+1) C(m, n) exp(-n eta y)`` is available with
``alzer=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from . import geometry as geo
from .association import access_constants, assoc_tbs_given, assoc_los_uav_given, assoc_nlos_uav_given
from .channel import DomainError, alzer_eta, los_weight
from .params import NetworkParams
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate

__all__ = [
    "InterferenceField",
    "laplace_exponent",
    "coverage_given",
    "cov_tbs_access_given",
    "cov_tbs_access",
    "cov_nlos_uav_access",
    "cov_los_uav_access",
    "cov_tbs_xhaul",
    "cov_uavbs_xhaul",
    "AccessCoverage",
    "access_coverage",
    "cov_overall_access",
    "xhaul_coverage_given_height",
]

# fixed composite Gauss-Legendre rule on [0, 1] used along log r
_N_PANELS = 24
_ORDER = 10
_t, _w = np.polynomial.legendre.leggauss(_ORDER)
_edges = np.linspace(0.0, 1.0, _N_PANELS + 1)
_TAU = ((_edges[:-1, None] + _edges[1:, None]) / 2 + (_edges[1:, None] - _edges[:-1, None]) / 2 * _t[None, :]).ravel()
_WTAU = (((_edges[1:] - _edges[:-1]) / 2)[:, None] * _w[None, :]).ravel()


@dataclass(frozen=True)
class InterferenceField:
    """One interfering tier.

    Parameters
    ----------
    measure : {"plane", "half", "clipped"}
        Distance measure per unit density: ``2 pi r`` (ground nodes, distance
        measured from the receiver), ``2 pi r^2`` (aerial nodes above a ground
        receiver) or the ground-clipped ball surface around a receiver at
        height ``h``.
    density : float
        Intensity, already multiplied by any visibility weight.
    a : float
        ``K P`` of the interferers.
    alpha : float
        Path-loss exponent.
    m : int
        Gamma shape of the interferer fading (1 for Rayleigh).
    h : float
        Receiver height, used by the clipped measure.
    """

    measure: str
    density: float
    a: float
    alpha: float
    m: int = 1
    h: float = 0.0


def _mu(field: InterferenceField, r):
    if field.measure == "plane":
        return 2.0 * math.pi * field.density * r
    if field.measure == "half":
        return 2.0 * math.pi * field.density * r * r
    if field.measure == "clipped":
        return field.density * np.where(r <= field.h, 4.0 * math.pi * r * r, 2.0 * math.pi * (r * r + r * field.h))
    raise ValueError(f"unknown measure {field.measure!r}")


def _one_minus_mgf(u, m: int, eta_kernel: float = 1.0, order: int = 0, c=None):
    """``1 - E exp(-u G)`` for unit-mean Gamma(m) ``G``; ``eta_kernel`` rescales ``u`` inside the kernel.

    With ``order = k > 0`` returns the k-th derivative with respect to ``s``
    where ``u = s c`` (``c`` given per node).
    """
    u = u * eta_kernel
    if order == 0:
        if m == 1:
            return u / (1.0 + u)
        return -np.expm1(-m * np.log1p(u / m))
    rising = math.gamma(m + order) / math.gamma(m)
    cm = c * eta_kernel / m
    return (-1.0) ** (order + 1) * rising * cm ** order * (1.0 + u / m) ** (-m - order)


def _log_quad(field, s, lo, hi, eta_kernel, order=0):
    """Row-wise ``int_lo^hi mu(r) (1 - mgf(s a r^-alpha)) dr`` on a log-r Gauss rule."""
    ok = hi > lo
    out = np.zeros_like(s)
    if not np.any(ok):
        return out
    llo = np.log(lo[ok])[:, None]
    span = (np.log(hi[ok]) - np.log(lo[ok]))[:, None]
    r = np.exp(llo + span * _TAU[None, :])
    c = field.a * r ** (-field.alpha)
    u = s[ok][:, None] * c
    val = _mu(field, r) * _one_minus_mgf(u, field.m, eta_kernel, order, c) * r
    out[ok] = (val * _WTAU[None, :]).sum(axis=1) * span[:, 0]
    return out


def laplace_exponent(field: InterferenceField, s, excl, radius: float, eta_kernel: float = 1.0,
                     order: int = 0):
    """Exponent ``int_e^R mu(r) (1 - E exp(-s a G r^-alpha)) dr`` (non-negative).

    ``s`` and ``excl`` broadcast together; ``radius`` is the interference radius.
    ``order = k`` returns the k-th derivative in ``s`` instead.
    """
    s, excl = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(excl, dtype=float))
    s = s.astype(float).ravel()
    lo = np.maximum(excl.astype(float).ravel(), radius * 1e-12)
    hi = np.full_like(lo, radius)
    if field.density == 0:
        return np.zeros(s.shape).reshape(np.shape(excl))
    if field.measure == "clipped" and 0 < field.h < radius:
        # the surface law changes form at r = h
        mid = np.clip(np.full_like(lo, field.h), lo, hi)
        total = (_log_quad(field, s, lo, mid, eta_kernel, order)
                 + _log_quad(field, s, mid, hi, eta_kernel, order))
    else:
        total = _log_quad(field, s, lo, hi, eta_kernel, order)
    return total.reshape(np.shape(excl))


def coverage_given(t, d, a_s: float, alpha_s: float, m_s: int, fields, exclusions, noise_w: float,
                   radius: float, alzer: bool = False, eta_kernels=None):
    """Coverage of a serving link at distances ``d`` against a list of interfering fields.

    ``exclusions`` holds one exclusion-radius array (or scalar) per field.
    Nakagami serving links (``m_s > 1``) use the Alzer expansion, or with
    ``alzer=False`` the exact gamma tail
    ``sum_{k<m} (-u)^k / k! d^k/du^k L(u)`` at ``u = m s``.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("serving distance must be positive")
    if t == math.inf:
        return np.zeros_like(d) if d.ndim else 0.0
    if t <= 0:
        return np.ones_like(d) if d.ndim else 1.0
    with np.errstate(over="ignore"):
        s0 = t * d ** alpha_s / a_s
    s0 = np.minimum(s0, 1e300)
    eta_kernels = eta_kernels or [1.0] * len(fields)

    def exponent(s, order=0):
        base = s * noise_w if order == 0 else (np.full_like(s, noise_w) if order == 1 else np.zeros_like(s))
        for fld, e, ek in zip(fields, exclusions, eta_kernels):
            base = base + laplace_exponent(fld, s, e, radius, ek, order)
        return base

    if m_s == 1:
        out = np.exp(-exponent(s0))
    elif alzer:
        eta = alzer_eta(m_s)
        out = np.zeros_like(s0)
        for n in range(1, m_s + 1):
            out = out + (-1.0) ** (n + 1) * comb(m_s, n, exact=True) * np.exp(-exponent(n * eta * s0))
    else:
        u = m_s * s0
        # f^(n) = exp(-phi) g_n with g_n = -sum C(n-1,k) phi^(k+1) g_(n-1-k), g_0 = 1
        phi = [exponent(u, k) for k in range(m_s)]
        live = phi[0] < 700.0
        g = [np.ones_like(u)]
        for n in range(1, m_s):
            g.append(-sum(comb(n - 1, k, exact=True) * phi[k + 1] * g[n - 1 - k] for k in range(n)))
        uu = np.where(live, u, 0.0)
        poly = sum((-uu) ** k / math.factorial(k) * np.where(live, g[k], 0.0) for k in range(m_s))
        out = np.where(live, np.exp(-np.minimum(phi[0], 700.0)) * poly, 0.0)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# access link


def _access_fields(p: NetworkParams):
    w_l = los_weight(p.env)
    m = p.nakagami_m
    tbs = InterferenceField("plane", p.lambda_m, p.k_m * p.p_m, p.alpha_n, 1)
    los = InterferenceField("half", p.lambda_ua * w_l, p.k_u * p.p_ua, p.alpha_l, m)
    nlos = InterferenceField("half", p.lambda_ua * (1.0 - w_l), p.k_u * p.p_ua, p.alpha_n, 1)
    return tbs, los, nlos


def _noise(p: NetworkParams, bandwidth_hz):
    return p.noise_power(p.bandwidth_hz if bandwidth_hz is None else bandwidth_hz)


def cov_tbs_access_given(q, t_a: float, params: NetworkParams, bandwidth_hz: float | None = None,
                         eta_in_interference: bool = False):
    """Coverage of a user served by a TBS at distance ``q``.

    Interferers: other TBSs beyond ``q``, LoS UAV-APs beyond ``c_m2(q)``,
    NLoS UAV-APs beyond ``c_m1(q)``. With ``eta_in_interference`` the LoS interferer
    kernel is evaluated with the Alzer constant inside, as in the published
    expression; the exact Rayleigh-serving kernel has no such factor.
    """
    p = params
    c = access_constants(p)
    q = np.asarray(q, dtype=float)
    fields = _access_fields(p)
    excl = [q, c.c_m2(q), c.c_m1(q)]
    ek = [1.0, alzer_eta(p.nakagami_m) if eta_in_interference else 1.0, 1.0]
    return coverage_given(t_a, q, c.a_m, p.alpha_n, 1, fields, excl, _noise(p, bandwidth_hz),
                          p.interference_radius, eta_kernels=ek)


def cov_nlos_uav_access(d_uan, t_a: float, params: NetworkParams, bandwidth_hz: float | None = None,
                        eta_in_interference: bool = False):
    """Coverage of a user served by an NLoS UAV-AP at distance ``d_uan`` (Rayleigh serving link)."""
    p = params
    c = access_constants(p)
    d = np.asarray(d_uan, dtype=float)
    fields = _access_fields(p)
    excl = [c.c_n1(d), np.power(d, p.alpha_n / p.alpha_l), d]
    ek = [1.0, alzer_eta(p.nakagami_m) if eta_in_interference else 1.0, 1.0]
    return coverage_given(t_a, d, c.a_u, p.alpha_n, 1, fields, excl, _noise(p, bandwidth_hz),
                          p.interference_radius, eta_kernels=ek)


def cov_los_uav_access(d_ual, t_a: float, params: NetworkParams, bandwidth_hz: float | None = None,
                       alzer: bool = False):
    """Coverage of a user served by a LoS UAV-AP at ``d_ual`` (Nakagami-m serving link, Alzer sum)."""
    p = params
    c = access_constants(p)
    d = np.asarray(d_ual, dtype=float)
    fields = _access_fields(p)
    excl = [c.c_l1(d), d, np.power(d, p.alpha_l / p.alpha_n)]
    return coverage_given(t_a, d, c.a_u, p.alpha_l, p.nakagami_m, fields, excl, _noise(p, bandwidth_hz),
                          p.interference_radius, alzer=alzer)


def cov_tbs_access(t_a: float, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC,
                   bandwidth_hz: float | None = None, weighting: str = "associated") -> float:
    """Coverage of TBS-served users, deconditioned over the serving distance.

    ``weighting="associated"`` averages over the distance law of users that
    actually associate with the TBS (``A_MA(q) f(q) / A_MA``);
    ``weighting="published"`` averages the conditional coverage over the
    unconditioned nearest-TBS law.
    """
    p = params
    c = access_constants(p)
    if p.lambda_m == 0:
        return 0.0
    if weighting == "published":
        g = lambda q: np.asarray(cov_tbs_access_given(q, t_a, p, bandwidth_hz)) * c.f_ma(q)
        return integrate(g, 0.0, math.inf, spec, scale=c.scale_m)
    if weighting != "associated":
        raise ValueError(f"unknown weighting {weighting!r}")
    acc = access_coverage(t_a, p, spec, bandwidth_hz)
    if acc.a_ma <= 0:
        return 0.0
    return acc.tbs / acc.a_ma


@dataclass(frozen=True)
class AccessCoverage:
    """Joint probabilities P(associate with tier, covered) and the association weights."""

    tbs: float
    los: float
    nlos: float
    a_ma: float
    a_ual: float
    a_uan: float

    @property
    def overall(self) -> float:
        return self.tbs + self.los + self.nlos

    @property
    def uav(self) -> float:
        return self.los + self.nlos


def access_coverage(t_a: float, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC,
                    bandwidth_hz: float | None = None, alzer: bool = False) -> AccessCoverage:
    """Association-weighted access coverage, split by serving tier."""
    p = params
    c = access_constants(p)
    spec_loose = QuadSpec(rel_tol=max(spec.rel_tol, 1e-7), abs_tol=max(spec.abs_tol, 1e-9), max_depth=spec.max_depth)

    def joint(f_dist, assoc, cov, scale, dens_ok):
        if not dens_ok:
            return 0.0, 0.0
        g_a = lambda x: np.asarray(assoc(x)) * f_dist(x)
        g_c = lambda x: np.asarray(assoc(x)) * np.asarray(cov(x)) * f_dist(x)
        return (integrate(g_c, 1e-300, math.inf, spec_loose, scale=scale),
                integrate(g_a, 1e-300, math.inf, spec_loose, scale=scale))

    tbs, a_ma = joint(c.f_ma, lambda q: assoc_tbs_given(q, p, c),
                      lambda q: cov_tbs_access_given(q, t_a, p, bandwidth_hz), c.scale_m, p.lambda_m > 0)
    if p.lambda_ua == 0:
        return AccessCoverage(tbs, 0.0, 0.0, 1.0 if p.lambda_m > 0 else 0.0, 0.0, 0.0)
    los, a_ual = joint(c.f_ual, lambda x: assoc_los_uav_given(x, p, consts=c),
                       lambda x: cov_los_uav_access(x, t_a, p, bandwidth_hz, alzer), c.scale_l, True)
    nlos, a_uan = joint(c.f_uan, lambda x: assoc_nlos_uav_given(x, p, consts=c),
                        lambda x: cov_nlos_uav_access(x, t_a, p, bandwidth_hz), c.scale_n, True)
    if p.lambda_m == 0:
        a_ma = 0.0
    return AccessCoverage(tbs, los, nlos, a_ma, a_ual, a_uan)


def cov_overall_access(t_a: float, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC,
                       bandwidth_hz: float | None = None) -> float:
    """Overall access coverage ``A_MA P_CM + int A_UAL P_CL f + int A_UAN P_CN f``."""
    return access_coverage(t_a, params, spec, bandwidth_hz).overall


# ---------------------------------------------------------------------------
# xHaul link


def _xhaul_fields(p: NetworkParams, h: float, measure: str = "exact"):
    m = p.nakagami_m
    tbs = InterferenceField("plane", p.lambda_m, p.k_m * p.p_m, p.alpha_l, 1)
    if measure == "exact":
        ub = InterferenceField("clipped", p.lambda_ub, p.k_u * p.p_ub, p.alpha_l, m, h)
    elif measure == "published":
        ub = InterferenceField("half", p.lambda_ub * los_weight(p.env), p.k_u * p.p_ub, p.alpha_l, m)
    else:
        raise ValueError(f"unknown xHaul measure {measure!r}")
    return tbs, ub


def _ub_ratio(p: NetworkParams) -> float:
    """UAV-BS at ``y`` beats a TBS at ``x`` iff ``y < ratio * x``."""
    return (p.k_u * p.p_ub / (p.k_m * p.p_m)) ** (1.0 / p.alpha_l)


def cov_tbs_xhaul(d_mb, t_b: float, params: NetworkParams, h: float = 0.0, bandwidth_hz: float | None = None,
                  measure: str = "exact"):
    """xHaul coverage of a UAV-AP at height ``h`` served by a TBS at distance ``d_mb``.

    TBS interferers lie beyond ``d_mb``; UAV-BS interferers beyond
    ``ratio * d_mb``. ``measure="published"`` replaces the ground-clipped UAV-BS
    measure with a LoS-thinned half-space.
    """
    p = params
    d = np.asarray(d_mb, dtype=float)
    fields = _xhaul_fields(p, h, measure)
    excl = [np.maximum(d, h), _ub_ratio(p) * d]
    return coverage_given(t_b, d, p.k_m * p.p_m, p.alpha_l, 1, fields, excl, _noise(p, bandwidth_hz),
                          p.interference_radius)


def cov_uavbs_xhaul(d_ub, t_b: float, params: NetworkParams, h: float = 0.0, bandwidth_hz: float | None = None,
                    measure: str = "exact", alzer: bool = False):
    """xHaul coverage of a UAV-AP at height ``h`` served by a UAV-BS at ``d_ub`` (Nakagami-m, Alzer sum)."""
    p = params
    d = np.asarray(d_ub, dtype=float)
    fields = _xhaul_fields(p, h, measure)
    excl = [np.maximum(d / _ub_ratio(p), h), d]
    return coverage_given(t_b, d, p.k_u * p.p_ub, p.alpha_l, p.nakagami_m, fields, excl, _noise(p, bandwidth_hz),
                          p.interference_radius, alzer=alzer)


def xhaul_coverage_given_height(h: float, t_b: float, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC,
                                bandwidth_hz: float | None = None, measure: str = "exact",
                                alzer: bool = False) -> float:
    """Total xHaul coverage ``B(h)`` of a UAV-AP at height ``h``.

    Sums P(UAV-BS wins, covered) and P(TBS wins, covered): each serving
    distance is weighted by its nearest-distance law and by the void
    probability of the competing tier inside the RSSI boundary.
    """
    p = params
    if t_b == math.inf:
        return 0.0
    ratio = _ub_ratio(p)
    spec_loose = QuadSpec(rel_tol=max(spec.rel_tol, 1e-7), abs_tol=max(spec.abs_tol, 1e-9), max_depth=spec.max_depth)
    total = 0.0
    if p.lambda_ub > 0:
        def g_ub(y):
            edge = np.maximum(h, y / ratio)
            tbs_void = np.exp(-math.pi * p.lambda_m * (edge * edge - h * h))
            return (np.asarray(geo.pdf_xhaul_uavbs(y, h, p.lambda_ub)) * tbs_void
                    * np.asarray(cov_uavbs_xhaul(y, t_b, p, h, bandwidth_hz, measure, alzer)))

        scale = (4.0 / 3.0 * math.pi * p.lambda_ub) ** (-1.0 / 3.0)
        pts = [x for x in (h, ratio * h) if x > 0]
        total += integrate(g_ub, 1e-300, math.inf, spec_loose, scale=scale, points=pts or None)
    if p.lambda_m > 0:
        def g_m(x):
            ub_void = 1.0 - np.asarray(geo.cdf_xhaul_uavbs(ratio * x, h, p.lambda_ub))
            return (np.asarray(geo.pdf_xhaul_tbs(x, h, p.lambda_m)) * ub_void
                    * np.asarray(cov_tbs_xhaul(x, t_b, p, h, bandwidth_hz, measure)))

        scale = 1.0 / math.sqrt(math.pi * p.lambda_m)
        pts = [h / ratio] if h / ratio > h else None
        total += integrate(g_m, max(h, 1e-300), math.inf, spec_loose, scale=scale, points=pts)
    return float(min(max(total, 0.0), 1.0))
