"""RSSI association probabilities for the access and xHaul links.

Access: the typical ground user compares the fading-free received power of
its nearest TBS, nearest LoS UAV-AP and nearest NLoS UAV-AP. Each ordered
event (e.g. TBS > NLoS > LoS) is an integral over the nearest-distance laws
of ``geometry``; the two orderings that end with a given winner add up to
that tier's association probability.

xHaul: the tagged UAV-AP at height ``h`` compares its nearest ground TBS
with its nearest UAV-BS; both links follow the LoS exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .geometry import theta_average_weights
from .channel import DomainError, los_weight
from .params import NetworkParams
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate
from .search import golden_section_max

__all__ = [
    "AssociationReport",
    "XhaulAssociation",
    "DensitySweep",
    "HeightSweep",
    "AccessConstants",
    "access_constants",
    "assoc_tbs_given",
    "assoc_tbs_split",
    "assoc_tbs",
    "assoc_tbs_special_closed_form",
    "assoc_los_uav_given",
    "assoc_los_uav_split",
    "assoc_los_uav",
    "assoc_nlos_uav_given",
    "assoc_nlos_uav_split",
    "assoc_nlos_uav",
    "association_report",
    "assoc_sweep_density",
    "assoc_vs_height",
    "assoc_ub_given_height",
    "assoc_xhaul",
    "assoc_xhaul_deconditioned",
]

_TWO_THIRDS_PI = 2.0 * math.pi / 3.0


@dataclass(frozen=True)
class AssociationReport:
    a_ma: float
    a_ual_bar: float
    a_uan_bar: float

    @property
    def total(self) -> float:
        return self.a_ma + self.a_ual_bar + self.a_uan_bar


@dataclass(frozen=True)
class XhaulAssociation:
    a_ub: float

    @property
    def a_mb(self) -> float:
        return 1.0 - self.a_ub


@dataclass(frozen=True)
class AccessConstants:
    """Void-probability rates and RSSI boundary maps of the access tiers.

    ``k_l``/``k_n`` multiply ``r^3`` in the half-space void probability of
    LoS/NLoS UAV-APs; ``a_m``/``a_u`` are ``K P`` of the TBS and UAV-AP.
    """

    k_l: float
    k_n: float
    pi_lm: float
    a_m: float
    a_u: float
    alpha_l: float
    alpha_n: float
    w_l: float

    # nearest TBS at w: LoS (NLoS) UAV-AP wins if closer than c_m2(w) (c_m1(w))
    def c_m1(self, w):
        return (self.a_u / self.a_m) ** (1.0 / self.alpha_n) * w

    def c_m2(self, w):
        return (self.a_u / self.a_m) ** (1.0 / self.alpha_l) * np.power(w, self.alpha_n / self.alpha_l)

    # nearest LoS UAV-AP at d: TBS must lie beyond c_l1(d), NLoS beyond d^(aL/aN)
    def c_l1(self, d):
        return (self.a_m / self.a_u) ** (1.0 / self.alpha_n) * np.power(d, self.alpha_l / self.alpha_n)

    # nearest NLoS UAV-AP at d: TBS beyond c_n1(d), LoS beyond d^(aN/aL)
    def c_n1(self, d):
        return (self.a_m / self.a_u) ** (1.0 / self.alpha_n) * d

    @property
    def scale_m(self) -> float:
        return 1.0 / math.sqrt(self.pi_lm) if self.pi_lm > 0 else 1.0

    @property
    def scale_l(self) -> float:
        return self.k_l ** (-1.0 / 3.0) if self.k_l > 0 else 1.0

    @property
    def scale_n(self) -> float:
        return self.k_n ** (-1.0 / 3.0) if self.k_n > 0 else 1.0

    def f_ma(self, w):
        return 2.0 * self.pi_lm * w * np.exp(-self.pi_lm * w * w)

    def f_ual(self, x):
        return 3.0 * self.k_l * x * x * np.exp(-self.k_l * x ** 3)

    def f_uan(self, x):
        return 3.0 * self.k_n * x * x * np.exp(-self.k_n * x ** 3)


def access_constants(params: NetworkParams) -> AccessConstants:
    w_l = los_weight(params.env)
    return AccessConstants(
        k_l=_TWO_THIRDS_PI * params.lambda_ua * w_l,
        k_n=_TWO_THIRDS_PI * params.lambda_ua * (1.0 - w_l),
        pi_lm=math.pi * params.lambda_m,
        a_m=params.k_m * params.p_m,
        a_u=params.k_u * params.p_ua,
        alpha_l=params.alpha_l,
        alpha_n=params.alpha_n,
        w_l=w_l,
    )


def _check_form(form: str):
    if form not in ("exact", "published"):
        raise ValueError(f"form must be 'exact' or 'published', got {form!r}")


# ---------------------------------------------------------------------------
# TBS association


def assoc_tbs_given(w, params: NetworkParams, consts: AccessConstants | None = None):
    """P(TBS wins | nearest TBS at ``w``) = P(no LoS inside c_m2(w), no NLoS inside c_m1(w))."""
    c = consts or access_constants(params)
    w = np.asarray(w, dtype=float)
    out = np.exp(-c.k_l * c.c_m2(w) ** 3 - c.k_n * c.c_m1(w) ** 3)
    return float(out) if out.ndim == 0 else out


def assoc_tbs_split(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, form: str = "exact") -> tuple[float, float]:
    """Ordered-event parts of the TBS association probability.

    Returns ``(A1, A2)`` with ``A1 = P(R_M > R_UAN > R_UAL)`` and
    ``A2 = P(R_M > R_UAL > R_UAN)``, each a double integral with the outer
    variable the nearest-TBS distance ``w`` and the inner variable the
    distance of the runner-up UAV-AP, lower-limited by ``c_m1(w)`` (resp.
    ``c_m2(w)``).

    ``form="published"`` evaluates the published integrands, which carry an
    extra void factor for the runner-up tier; they reproduce the published
    closed form of the equal-power special case but do not sum to the TBS
    association probability in general.
    """
    _check_form(form)
    c = access_constants(params)
    if params.lambda_ua == 0:
        return 1.0, 0.0
    if params.lambda_m == 0:
        return 0.0, 0.0
    rl = params.alpha_n / params.alpha_l  # NLoS at x beats LoS beyond x^(aN/aL)
    rn = params.alpha_l / params.alpha_n

    def inner1(w):
        lo = float(c.c_m1(w))
        if form == "exact":
            g = lambda x: np.exp(-c.k_l * x ** (3 * rl)) * c.f_uan(x)
            return integrate(g, lo, math.inf, spec, scale=c.scale_n)
        head = math.exp(-c.k_l * float(c.c_m2(w)) ** 3)
        g = lambda x: (head - np.exp(-c.k_l * x ** (3 * rl))) * c.f_uan(x)
        return integrate(g, lo, math.inf, spec, scale=c.scale_n) * math.exp(-c.k_n * lo ** 3)

    def inner2(w):
        lo = float(c.c_m2(w))
        if form == "exact":
            g = lambda x: np.exp(-c.k_n * x ** (3 * rn)) * c.f_ual(x)
            return integrate(g, lo, math.inf, spec, scale=c.scale_l)
        head = math.exp(-c.k_n * float(c.c_m1(w)) ** 3)
        g = lambda x: (head - np.exp(-c.k_n * x ** (3 * rn))) * c.f_ual(x)
        return integrate(g, lo, math.inf, spec, scale=c.scale_l) * math.exp(-c.k_l * lo ** 3)

    def outer(inner):
        def h(ws):
            return np.array([inner(w) for w in np.ravel(ws)]).reshape(np.shape(ws)) * c.f_ma(ws)

        return integrate(h, 0.0, math.inf, spec, scale=c.scale_m)

    return outer(inner1), outer(inner2)


def assoc_tbs(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "split") -> float:
    """Probability ``A_MA`` that the typical user associates with a TBS.

    ``method="split"`` sums the two ordered-event double integrals;
    ``method="closed"`` integrates the conditional void probability
    ``assoc_tbs_given`` against the nearest-TBS law (one dimension).
    """
    if params.lambda_ua == 0:
        return 1.0
    if params.lambda_m == 0:
        return 0.0
    if method == "split":
        a1, a2 = assoc_tbs_split(params, spec)
        return a1 + a2
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    c = access_constants(params)
    g = lambda w: assoc_tbs_given(w, params, c) * c.f_ma(w)
    return integrate(g, 0.0, math.inf, spec, scale=c.scale_m)


def assoc_tbs_special_closed_form(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC) -> tuple[float, float]:
    """Published closed forms of the two TBS ordered events for equal powers and exponents.

    ``A1 = W'_L / (W'_L + W'_N) * int exp(-(2/3) pi lambda (W'_L + 2 W'_N) w^3) f(w) dw``
    and symmetrically for ``A2``. Valid only when ``K_U P_UA = K_M P_M`` and
    ``alpha_n = alpha_l``.
    """
    a_m, a_u = params.k_m * params.p_m, params.k_u * params.p_ua
    if not (math.isclose(a_m, a_u, rel_tol=1e-12) and params.alpha_n == params.alpha_l):
        raise DomainError("closed form requires equal received-power coefficients and exponents")
    w_l = los_weight(params.env)
    w_n = 1.0 - w_l
    c = access_constants(params)

    def part(wa, wb):
        rate = _TWO_THIRDS_PI * params.lambda_ua * (wa + 2.0 * wb)
        g = lambda w: np.exp(-rate * w ** 3) * c.f_ma(w)
        return wa / (wa + wb) * integrate(g, 0.0, math.inf, spec, scale=c.scale_m)

    return part(w_l, w_n), part(w_n, w_l)


# ---------------------------------------------------------------------------
# LoS UAV-AP association


def assoc_los_uav_split(d, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, form: str = "exact"):
    """``(A1(d), A2(d))`` with ``A1 = P(R_UAL > R_UAN > R_MA | d)``, ``A2 = P(R_UAL > R_MA > R_UAN | d)``.

    ``A1`` integrates over the nearest-TBS distance beyond ``c_l1(d)``;
    ``A2`` over the nearest-NLoS distance beyond ``d^(aL/aN)``.
    """
    _check_form(form)
    c = access_constants(params)
    d_arr = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(d_arr <= 0):
        raise DomainError("serving distance must be positive")
    g_n = 1.0 / c.alpha_n
    ratio = (c.a_u / c.a_m) ** g_n
    out1 = np.empty_like(d_arr)
    out2 = np.empty_like(d_arr)
    for i, di in enumerate(d_arr):
        tbs_void = math.exp(-c.pi_lm * float(c.c_l1(di)) ** 2)
        nlos_edge = di ** (c.alpha_l / c.alpha_n)
        nlos_void = math.exp(-c.k_n * nlos_edge ** 3)
        # A1: NLoS between d^(aL/aN) and ratio * w
        if c.pi_lm > 0:
            g1 = lambda w: np.maximum(nlos_void - np.exp(-c.k_n * (ratio * w) ** 3), 0.0) * c.f_ma(w)
            a1 = integrate(g1, float(c.c_l1(di)), math.inf, spec, scale=c.scale_m)
        else:
            a1 = 0.0
        # A2: TBS between c_l1(d) and the distance at which it would beat NLoS at x
        if c.k_n > 0:
            g2 = lambda x: np.maximum(tbs_void - np.exp(-c.pi_lm * (x / ratio) ** 2), 0.0) * c.f_uan(x)
            a2 = integrate(g2, nlos_edge, math.inf, spec, scale=c.scale_n)
        else:
            a2 = tbs_void if c.pi_lm == 0 else tbs_void
        if form == "published":
            a1 *= tbs_void
            a2 *= nlos_void
        out1[i], out2[i] = a1, a2
    if np.ndim(d) == 0:
        return float(out1[0]), float(out2[0])
    return out1, out2


def assoc_los_uav_given(d, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "closed",
                        consts: AccessConstants | None = None):
    """Conditional ``A_UAL(d)``: the LoS UAV-AP at ``d`` beats the nearest TBS and NLoS UAV-AP.

    ``method="closed"`` uses the product of void probabilities
    ``exp(-pi lambda_M c_l1(d)^2) exp(-k_N d^(3 aL/aN))``; ``"split"`` sums
    the two ordered-event integrals.
    """
    if method == "split":
        a1, a2 = assoc_los_uav_split(d, params, spec)
        return a1 + a2
    c = consts or access_constants(params)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("serving distance must be positive")
    out = np.exp(-c.pi_lm * c.c_l1(d) ** 2 - c.k_n * np.power(d, 3 * c.alpha_l / c.alpha_n))
    return float(out) if out.ndim == 0 else out


def assoc_los_uav(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "closed") -> float:
    """Deconditioned ``A_UAL = int A_UAL(x) f_UAL(x) dx``."""
    if params.lambda_ua == 0:
        return 0.0
    c = access_constants(params)
    g = lambda x: np.asarray(assoc_los_uav_given(x, params, spec, method, c)) * c.f_ual(x)
    return integrate(g, 1e-300, math.inf, spec, scale=c.scale_l)


# ---------------------------------------------------------------------------
# NLoS UAV-AP association


def assoc_nlos_uav_split(d, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, form: str = "exact"):
    """``(A1(d), A2(d))`` with ``A1 = P(R_UAN > R_MA > R_UAL | d)``, ``A2 = P(R_UAN > R_UAL > R_MA | d)``."""
    _check_form(form)
    c = access_constants(params)
    d_arr = np.atleast_1d(np.asarray(d, dtype=float))
    if np.any(d_arr <= 0):
        raise DomainError("serving distance must be positive")
    cl = (c.a_u / c.a_m) ** (1.0 / c.alpha_l)  # TBS at w beats LoS beyond cl * w^(aN/aL)
    out1 = np.empty_like(d_arr)
    out2 = np.empty_like(d_arr)
    for i, di in enumerate(d_arr):
        cn1 = float(c.c_n1(di))
        tbs_void = math.exp(-c.pi_lm * cn1 ** 2)
        los_edge = di ** (c.alpha_n / c.alpha_l)
        los_void = math.exp(-c.k_l * los_edge ** 3)
        if c.pi_lm > 0:
            g1 = lambda w: np.maximum(los_void - np.exp(-c.k_l * (cl * w ** (c.alpha_n / c.alpha_l)) ** 3), 0.0) * c.f_ma(w)
            a1 = integrate(g1, cn1, math.inf, spec, scale=c.scale_m)
        else:
            a1 = 0.0
        if c.k_l > 0:
            # LoS at x beats the TBS unless the TBS is closer than (x / cl)^(aL/aN)
            g2 = lambda x: np.maximum(tbs_void - np.exp(-c.pi_lm * (x / cl) ** (2 * c.alpha_l / c.alpha_n)), 0.0) * c.f_ual(x)
            a2 = integrate(g2, los_edge, math.inf, spec, scale=c.scale_l)
        else:
            a2 = tbs_void
        if form == "published":
            a1 *= tbs_void
            a2 *= los_void
        out1[i], out2[i] = a1, a2
    if np.ndim(d) == 0:
        return float(out1[0]), float(out2[0])
    return out1, out2


def assoc_nlos_uav_given(d, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "closed",
                         consts: AccessConstants | None = None):
    """Conditional ``A_UAN(d) = exp(-pi lambda_M c_n1(d)^2) exp(-k_L d^(3 aN/aL))`` (or by ``"split"``)."""
    if method == "split":
        a1, a2 = assoc_nlos_uav_split(d, params, spec)
        return a1 + a2
    c = consts or access_constants(params)
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise DomainError("serving distance must be positive")
    out = np.exp(-c.pi_lm * c.c_n1(d) ** 2 - c.k_l * np.power(d, 3 * c.alpha_n / c.alpha_l))
    return float(out) if out.ndim == 0 else out


def assoc_nlos_uav(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "closed") -> float:
    """Deconditioned ``A_UAN = int A_UAN(x) f_UAN(x) dx``."""
    if params.lambda_ua == 0:
        return 0.0
    c = access_constants(params)
    g = lambda x: np.asarray(assoc_nlos_uav_given(x, params, spec, method, c)) * c.f_uan(x)
    return integrate(g, 1e-300, math.inf, spec, scale=c.scale_n)


def association_report(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, method: str = "closed") -> AssociationReport:
    """All three access association probabilities, each computed independently."""
    return AssociationReport(
        assoc_tbs(params, spec, method),
        assoc_los_uav(params, spec, method),
        assoc_nlos_uav(params, spec, method),
    )


# ---------------------------------------------------------------------------
# density sweep and optimal density


@dataclass(frozen=True)
class DensitySweep:
    lambdas: np.ndarray
    reports: list
    lambda_star: float
    a_ual_star: float
    interior: bool

    @property
    def a_ual(self) -> np.ndarray:
        return np.array([r.a_ual_bar for r in self.reports])


def assoc_sweep_density(params: NetworkParams, lambda_grid, spec: QuadSpec = DEFAULT_SPEC,
                        method: str = "closed", refine: bool = True) -> DensitySweep:
    """Association reports over an ascending grid of UAV-AP densities.

    The density maximising the LoS association is located by a grid scan;
    when the best grid point is interior it is refined by golden-section
    search on ``log lambda`` inside the neighbouring grid cells.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise ValueError("lambda grid must be nonempty, positive and ascending")
    reports = [association_report(params.with_(lambda_ua=float(l)), spec, method) for l in grid]
    vals = np.array([r.a_ual_bar for r in reports])
    k = int(np.argmax(vals))
    interior = 0 < k < grid.size - 1
    lam_star, best = float(grid[k]), float(vals[k])
    if interior and refine:
        f = lambda u: assoc_los_uav(params.with_(lambda_ua=math.exp(u)), spec, method)
        u, v = golden_section_max(f, math.log(grid[k - 1]), math.log(grid[k + 1]), tol=1e-4)
        if v >= best:
            lam_star, best = math.exp(u), v
    return DensitySweep(grid, reports, lam_star, best, interior)


# ---------------------------------------------------------------------------
# fixed LoS height


@dataclass(frozen=True)
class HeightSweep:
    heights: np.ndarray
    a_m: np.ndarray
    a_ual: np.ndarray
    a_uan: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.a_m + self.a_ual + self.a_uan


def assoc_vs_height(h_l, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC) -> HeightSweep:
    """Association with the LoS UAV-AP placed at height ``h_L`` and a random orientation.

    The LoS distance is ``h_L / cos(theta)`` with ``theta`` uniform on
    ``[-pi/2, pi/2]``; the TBS and NLoS tiers keep their random nearest
    distances. The three probabilities are computed by separate integrals.
    """
    h_arr = np.atleast_1d(np.asarray(h_l, dtype=float))
    if np.any(h_arr <= 0):
        raise DomainError("heights must be positive")
    c = access_constants(params)
    ratio = (c.a_u / c.a_m) ** (1.0 / c.alpha_n)
    half = math.pi / 2

    def theta_avg(g):
        # symmetric in theta: (2 / pi) int_0^{pi/2}
        return integrate(lambda th: g(np.cos(th)), 0.0, half, spec) / half

    def los(h):
        return theta_avg(lambda ct: np.asarray(assoc_los_uav_given(h / ct, params, consts=c)))

    def nlos(h):
        def per_theta(ct):
            out = np.empty(np.shape(ct))
            for i, cti in enumerate(np.ravel(ct)):
                edge = (h / cti) ** (c.alpha_l / c.alpha_n)
                g = lambda x: np.exp(-c.pi_lm * (x / ratio) ** 2) * c.f_uan(x)
                out.flat[i] = integrate(g, 0.0, edge, spec) if c.k_n > 0 else 0.0
            return out

        return theta_avg(per_theta)

    def tbs(h):
        def per_theta(ct):
            out = np.empty(np.shape(ct))
            for i, cti in enumerate(np.ravel(ct)):
                edge = float(c.c_l1(h / cti))
                g = lambda w: np.exp(-c.k_n * c.c_m1(w) ** 3) * c.f_ma(w)
                out.flat[i] = integrate(g, 0.0, edge, spec) if c.pi_lm > 0 else 0.0
            return out

        return theta_avg(per_theta)

    return HeightSweep(
        h_arr,
        np.array([tbs(h) for h in h_arr]),
        np.array([los(h) for h in h_arr]),
        np.array([nlos(h) for h in h_arr]),
    )


# ---------------------------------------------------------------------------
# xHaul association


def assoc_ub_given_height(h, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC):
    """Probability that a UAV-AP at height ``h`` picks a UAV-BS for xHaul.

    ``A_UB(h) = int_h^inf f_MB(x | h) F_UB(c x | h) dx`` with
    ``c = (K_U P_UB / (K_M P_M))^(1/alpha_L)``. The integrand switches from
    the full-ball to the ground-clipped UAV-BS law at ``x = h / c``.
    """
    p = params
    h_arr = np.atleast_1d(np.asarray(h, dtype=float))
    if np.any(h_arr < 0):
        raise DomainError("height must be non-negative")
    if p.lambda_ub == 0:
        out = np.zeros_like(h_arr)
    elif p.lambda_m == 0:
        out = np.ones_like(h_arr)
    else:
        cr = (p.k_u * p.p_ub / (p.k_m * p.p_m)) ** (1.0 / p.alpha_l)
        scale = 1.0 / math.sqrt(math.pi * p.lambda_m)
        out = np.empty_like(h_arr)
        for i, hi in enumerate(h_arr):
            g = lambda x: np.asarray(geo.pdf_xhaul_tbs(x, hi, p.lambda_m)) * np.asarray(
                geo.cdf_xhaul_uavbs(cr * x, hi, p.lambda_ub))
            ell = hi / cr
            out[i] = integrate(g, hi, math.inf, spec, scale=scale, points=[ell] if ell > hi else None)
    return float(out[0]) if np.ndim(h) == 0 else out


def assoc_xhaul(d_a: float, theta: float, params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC) -> XhaulAssociation:
    """xHaul association of the tagged UAV-AP at access distance ``d_a`` and angle ``theta``."""
    if not d_a > 0:
        raise DomainError("access distance must be positive")
    if not -math.pi / 2 < theta < math.pi / 2:
        raise DomainError("theta must lie in (-pi/2, pi/2)")
    return XhaulAssociation(float(assoc_ub_given_height(d_a * math.cos(theta), params, spec)))


def assoc_xhaul_deconditioned(params: NetworkParams, spec: QuadSpec = DEFAULT_SPEC, theta_law: str = "exact",
                              n_heights: int = 40) -> XhaulAssociation:
    """xHaul association of a typical UAV-AP that serves the typical user.

    ``A_UB(h)`` is averaged over the tagged UAV-AP's height ``h = d cos(theta)``,
    with ``d`` drawn from the association-weighted LoS and NLoS serving-distance
    laws and ``theta`` from ``theta_law``.
    """
    c = access_constants(params)
    if params.lambda_ua == 0:
        raise DomainError("no UAV-AP tier to tag")
    k_min = min(k for k in (c.k_l, c.k_n) if k > 0)
    x_max = (60.0 / k_min) ** (1.0 / 3.0)
    hs = x_max * np.linspace(0.0, 1.0, n_heights + 1) ** 2
    a_h = np.asarray(assoc_ub_given_height(hs, params, spec))

    def part(los):
        ct, wt = theta_average_weights(theta_law, los, params)
        given = assoc_los_uav_given if los else assoc_nlos_uav_given
        f = c.f_ual if los else c.f_uan
        avg = lambda x: np.interp(np.asarray(x)[..., None] * ct, hs, a_h) @ wt
        num = integrate(lambda x: given(x, params, consts=c) * avg(x) * f(x), 1e-300, x_max, spec)
        den = integrate(lambda x: given(x, params, consts=c) * f(x), 1e-300, x_max, spec)
        return num, den

    num_l, den_l = part(True) if c.k_l > 0 else (0.0, 0.0)
    num_n, den_n = part(False) if c.k_n > 0 else (0.0, 0.0)
    return XhaulAssociation(float((num_l + num_n) / (den_l + den_n)))
