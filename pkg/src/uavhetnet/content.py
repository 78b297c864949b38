"""Caching model, rate coverage and end-to-end content-delivery success.

A request succeeds through one of three disjoint events:

* ``S_t``: the user is served by a TBS and its access link is covered;
* ``S_a``: the user is served by a UAV-AP holding the file and the access link is covered;
* ``S_x``: the serving UAV-AP misses the file, the access link is covered and the
  UAV-AP's own xHaul link (to a TBS or UAV-BS) is covered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .geometry import THETA_LAWS, theta_average_weights
from .association import access_constants, assoc_los_uav_given, assoc_nlos_uav_given
from .channel import sinr_thresholds
from .coverage import access_coverage, cov_los_uav_access, cov_nlos_uav_access, xhaul_coverage_given_height
from .params import NetworkParams, ServiceParams
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate

__all__ = [
    "DegenerateCache",
    "CachePolicy",
    "SuccessBreakdown",
    "zipf_popularity",
    "cache_placement",
    "hit_probability",
    "rate_coverage",
    "SuccessModel",
    "success_probability",
]

HIT_MODES = ("full-library", "paper-literal")


class DegenerateCache(ValueError):
    """Cache sizes for which the placement rule is undefined."""


def zipf_popularity(L: int, gamma: float) -> np.ndarray:
    """Request probabilities ``a_i = i^-gamma / sum_j j^-gamma``."""
    if L < 1:
        raise ValueError("library size must be >= 1")
    if gamma < 0:
        raise ValueError("Zipf exponent must be >= 0")
    w = np.arange(1, L + 1, dtype=float) ** (-gamma)
    return w / w.sum()


def cache_placement(L: int, C: int, C0: int, gamma: float) -> np.ndarray:
    """Caching probabilities ``b``: the ``C0`` most popular files always, the rest proportionally.

    ``b_i = min(a_i (C - C0) / (1 - sum_{j <= C0} a_j), 1)`` for ``i > C0``.
    A cache that holds the whole library stores every file.
    """
    if not 0 <= C0 <= C <= L:
        raise ValueError(f"need 0 <= C0 <= C <= L, got C0={C0}, C={C}, L={L}")
    if C == L or C0 == L:
        return np.ones(L)
    a = zipf_popularity(L, gamma)
    b = np.zeros(L)
    b[:C0] = 1.0
    rest = 1.0 - a[:C0].sum()
    if rest <= 0:
        raise DegenerateCache("most-popular prefix carries all request mass")
    b[C0:] = np.minimum(a[C0:] * (C - C0) / rest, 1.0)
    return b


@dataclass(frozen=True)
class CachePolicy:
    library_size: int = 1000
    cache_size: int = 600
    mpc_size: int | None = None
    gamma: float = 1.0
    hit_mode: str = "full-library"
    popularity: np.ndarray = field(init=False, repr=False, compare=False)
    placement: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c0 = self.cache_size // 2 if self.mpc_size is None else self.mpc_size
        object.__setattr__(self, "mpc_size", int(c0))
        if self.hit_mode not in HIT_MODES:
            raise ValueError(f"hit_mode must be one of {HIT_MODES}")
        object.__setattr__(self, "popularity", zipf_popularity(self.library_size, self.gamma))
        object.__setattr__(self, "placement", cache_placement(self.library_size, self.cache_size, c0, self.gamma))

    def with_(self, **changes) -> "CachePolicy":
        kw = dict(library_size=self.library_size, cache_size=self.cache_size, mpc_size=self.mpc_size,
                  gamma=self.gamma, hit_mode=self.hit_mode)
        if "cache_size" in changes and "mpc_size" not in changes:
            kw["mpc_size"] = None
        kw.update(changes)
        return CachePolicy(**kw)


def hit_probability(policy: CachePolicy, mode: str | None = None) -> tuple[float, float]:
    """Cache hit and miss probabilities.

    ``"full-library"`` sums ``a_i b_i`` over every file; ``"paper-literal"``
    stops at ``i = C``. The miss probability is the complement in both modes.
    """
    mode = mode or policy.hit_mode
    a, b = policy.popularity, policy.placement
    if mode == "full-library":
        hit = float(np.dot(a, b))
    elif mode == "paper-literal":
        c = policy.cache_size
        hit = float(np.dot(a[:c], b[:c]))
    else:
        raise ValueError(f"hit mode must be one of {HIT_MODES}")
    hit = min(max(hit, 0.0), 1.0)
    return hit, 1.0 - hit


def _access_bandwidth(svc: ServiceParams, params: NetworkParams) -> float:
    return svc.beta * params.bandwidth_hz / svc.n_users


def rate_coverage(r0: float, svc: ServiceParams, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``P(beta B / N_u log2(1 + SINR) >= r0)`` via the access SINR coverage."""
    if r0 <= 0:
        return 1.0
    if svc.beta <= 0:
        return 0.0
    e = svc.n_users * r0 / (svc.beta * params.bandwidth_hz)
    t = math.expm1(e * math.log(2.0)) if e < 1023 else math.inf
    if t == math.inf:
        return 0.0
    return access_coverage(t, params, spec, _access_bandwidth(svc, params)).overall


@dataclass(frozen=True)
class SuccessBreakdown:
    p_st: float
    p_sa: float
    p_sx: float

    @property
    def p_suc(self) -> float:
        return self.p_st + self.p_sa + self.p_sx


class SuccessModel:
    """Success-probability evaluator that caches the beta-dependent terms.

    The thresholds depend on ``beta`` (and ``N_u``) only, so the TBS term,
    the UAV access term and the xHaul term are stored per
    ``(beta, n_users)`` and recombined with any cache policy.
    """

    def __init__(self, params: NetworkParams, svc: ServiceParams, spec: QuadSpec = DEFAULT_SPEC,
                 theta_law: str = "exact", xhaul_measure: str = "exact", n_heights: int = 40,
                 alzer: bool = False):
        if theta_law not in THETA_LAWS:
            raise ValueError(f"theta law must be one of {THETA_LAWS}")
        self.params = params
        self.svc = svc
        self.spec = spec
        self.theta_law = theta_law
        self.xhaul_measure = xhaul_measure
        self.n_heights = n_heights
        self.alzer = alzer
        self._terms: dict = {}

    def terms(self, beta: float, n_users: int | None = None) -> tuple[float, float, float]:
        """``(P(TBS and covered), P(UAV-AP and covered), P(UAV-AP, access and xHaul covered))``."""
        n_users = self.svc.n_users if n_users is None else n_users
        key = (float(beta), int(n_users))
        if key not in self._terms:
            self._terms[key] = self._compute(*key)
        return self._terms[key]

    def _compute(self, beta: float, n_users: int):
        p = self.params
        svc = self.svc.with_(beta=beta, n_users=n_users)
        t_a, t_b = sinr_thresholds(svc, p.bandwidth_hz)
        if t_a == math.inf:
            return 0.0, 0.0, 0.0
        bw_a = _access_bandwidth(svc, p)
        acc = access_coverage(t_a, p, self.spec, bw_a, self.alzer)
        if t_b == math.inf or p.lambda_ua == 0:
            return acc.tbs, acc.uav, 0.0
        return acc.tbs, acc.uav, self._xhaul_term(t_a, t_b, bw_a, (1.0 - beta) * p.bandwidth_hz)

    def _xhaul_term(self, t_a, t_b, bw_a, bw_x):
        p = self.params
        c = access_constants(p)
        spec = QuadSpec(rel_tol=max(self.spec.rel_tol, 1e-6), abs_tol=max(self.spec.abs_tol, 1e-9))
        # serving distances beyond x_max carry negligible mass under both laws
        k_min = min(k for k in (c.k_l, c.k_n) if k > 0)
        x_max = (60.0 / k_min) ** (1.0 / 3.0)
        hs = x_max * np.linspace(0.0, 1.0, self.n_heights + 1) ** 2
        bh = np.array([xhaul_coverage_given_height(h, t_b, p, spec, bw_x, self.xhaul_measure, self.alzer) for h in hs])
        b_interp = PchipInterpolator(hs, bh, extrapolate=True)

        def tagged(los):
            ct, wt = theta_average_weights(self.theta_law, los, p)

            def avg_b(x):
                h = np.clip(np.asarray(x)[..., None] * ct, 0.0, x_max)
                return np.clip(b_interp(h), 0.0, 1.0) @ wt

            return avg_b

        total = 0.0
        if c.k_l > 0:
            avg_l = tagged(True)
            g = lambda x: (assoc_los_uav_given(x, p, consts=c) * cov_los_uav_access(x, t_a, p, bw_a, self.alzer)
                           * avg_l(x) * c.f_ual(x))
            total += integrate(g, 1e-300, x_max, spec)
        if c.k_n > 0:
            avg_n = tagged(False)
            g = lambda x: (assoc_nlos_uav_given(x, p, consts=c) * cov_nlos_uav_access(x, t_a, p, bw_a)
                           * avg_n(x) * c.f_uan(x))
            total += integrate(g, 1e-300, x_max, spec)
        return float(total)

    def evaluate(self, policy: CachePolicy, beta: float | None = None, n_users: int | None = None) -> SuccessBreakdown:
        beta = self.svc.beta if beta is None else beta
        p_t, p_u, p_x = self.terms(beta, n_users)
        hit, miss = hit_probability(policy)
        return SuccessBreakdown(p_t, hit * p_u, miss * p_x)


def success_probability(svc: ServiceParams, params: NetworkParams, policy: CachePolicy,
                        spec: QuadSpec = DEFAULT_SPEC, theta_law: str = "exact") -> SuccessBreakdown:
    """Probabilities of the three delivery events and their sum ``P_suc``."""
    return SuccessModel(params, svc, spec, theta_law).evaluate(policy)
