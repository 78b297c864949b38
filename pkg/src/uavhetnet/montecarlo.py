"""Monte-Carlo oracle: finite-window realisations of the three point processes.

Realisations are simulated in fixed-size batches with padded arrays. Each
batch draws from its own Philox stream spawned from one ``SeedSequence``,
so estimates depend only on the seed, the parameters and the realisation
count, never on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import Tier, los_probability, sinr_thresholds
from .content import CachePolicy, _access_bandwidth
from .params import NetworkParams, ServiceParams

__all__ = [
    "WindowTooSmall",
    "SimEstimate",
    "NetworkRealization",
    "Windows",
    "default_windows",
    "sample_realization",
    "associate",
    "sample_nearest_distances",
    "estimate_association",
    "CoverageEstimate",
    "estimate_coverage",
    "estimate_conditional_coverage",
    "estimate_xhaul_association",
    "estimate_success",
]

BATCH = 1000


class WindowTooSmall(RuntimeError):
    """A realisation had no access candidate inside the simulation window."""


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    std_err: float
    n: int

    @classmethod
    def from_hits(cls, hits, n: int) -> "SimEstimate":
        mean = np.asarray(hits, dtype=float) / n
        se = np.sqrt(mean * (1.0 - mean) / n)
        if mean.ndim == 0:
            return cls(float(mean), float(se), n)
        return cls(mean, se, n)


@dataclass(frozen=True)
class NetworkRealization:
    tbs: np.ndarray
    uav_ap: np.ndarray
    uav_ap_los: np.ndarray
    uav_bs: np.ndarray
    window_radius: float
    uav_radius: float
    ub_radius: float


@dataclass(frozen=True)
class Windows:
    """Disk radius of the TBS window and half-ball radii of the aerial windows [m]."""

    tbs: float
    uav_ap: float
    uav_bs: float


def _half_ball_radius(lam: float, floor: float) -> float:
    # expected count of at least 750 in the half ball
    if lam <= 0:
        return floor
    return max(floor, (750.0 / (math.pi * lam)) ** (1.0 / 3.0))


def default_windows(params: NetworkParams, margin: float = 0.0) -> Windows:
    """Windows large enough for association, and containing the interference ball.

    ``margin`` enlarges the aerial windows for receivers away from the origin
    (the tagged UAV-AP in xHaul simulations).
    """
    R = params.interference_radius
    tbs = 20.0 / math.sqrt(math.pi * params.lambda_m) if params.lambda_m > 0 else R
    tbs = max(tbs, R + margin)
    return Windows(tbs, _half_ball_radius(params.lambda_ua, R + margin), _half_ball_radius(params.lambda_ub, R + margin))


def _children(seed, n: int, batch: int):
    sizes = [batch] * (n // batch) + ([n % batch] if n % batch else [])
    ss = np.random.SeedSequence(seed)
    return list(zip(sizes, ss.spawn(len(sizes))))


def _rng(child) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(child))


def _run(fn, seed, n: int, threads: int, batch: int = BATCH):
    jobs = _children(seed, n, batch)
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda j: fn(j[0], _rng(j[1])), jobs))
    return [fn(size, _rng(child)) for size, child in jobs]


# ---------------------------------------------------------------------------
# sampling


def _disk(rng, lam, radius, B):
    """Padded uniform points of a PPP on a disk: ``xy`` (B, N, 2) and validity mask."""
    n = rng.poisson(lam * math.pi * radius ** 2, B)
    nmax = max(int(n.max(initial=0)), 1)
    r = radius * np.sqrt(rng.random((B, nmax)))
    phi = 2.0 * math.pi * rng.random((B, nmax))
    xy = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
    mask = np.arange(nmax)[None, :] < n[:, None]
    return xy, mask


def _half_ball(rng, lam, radius, B):
    """Padded uniform points of a PPP on the upper half-ball: ``xyz`` (B, N, 3) and mask."""
    n = rng.poisson(lam * (2.0 / 3.0) * math.pi * radius ** 3, B)
    nmax = max(int(n.max(initial=0)), 1)
    r = radius * np.cbrt(rng.random((B, nmax)))
    ct = rng.random((B, nmax))  # cos of the polar angle, uniform on the upper hemisphere
    st = np.sqrt(1.0 - ct * ct)
    phi = 2.0 * math.pi * rng.random((B, nmax))
    xyz = np.stack([r * st * np.cos(phi), r * st * np.sin(phi), r * ct], axis=-1)
    mask = np.arange(nmax)[None, :] < n[:, None]
    return xyz, mask


def _los_tags(rng, xyz, env):
    r = np.linalg.norm(xyz, axis=-1)
    ct = np.divide(xyz[..., 2], r, out=np.ones_like(r), where=r > 0)
    theta = np.arccos(np.clip(ct, 0.0, 1.0))
    return rng.random(r.shape) < los_probability(theta, env)


def sample_realization(params: NetworkParams, window_radius: float, rng: np.random.Generator,
                       uav_radius: float | None = None, ub_radius: float | None = None) -> NetworkRealization:
    """One realisation: TBSs on a disk, UAV-APs and UAV-BSs on upper half-balls.

    UAV-APs carry a LoS tag drawn with the probability of their polar angle.
    """
    if not window_radius > 0:
        raise ValueError("window radius must be positive")
    ua = window_radius if uav_radius is None else uav_radius
    ub = window_radius if ub_radius is None else ub_radius
    xy, mm = _disk(rng, params.lambda_m, window_radius, 1)
    xyz, mu = _half_ball(rng, params.lambda_ua, ua, 1)
    los = _los_tags(rng, xyz, params.env)
    bs, mb = _half_ball(rng, params.lambda_ub, ub, 1)
    return NetworkRealization(xy[0][mm[0]], xyz[0][mu[0]], los[0][mu[0]], bs[0][mb[0]], window_radius, ua, ub)


def associate(real: NetworkRealization, params: NetworkParams, radius: float | None = None) -> int:
    """RSSI winner at the origin: 0 TBS, 1 LoS UAV-AP, 2 NLoS UAV-AP, -1 none.

    With ``radius`` only nodes within that distance of the origin compete.
    """
    lim = math.inf if radius is None else radius
    d_m = np.linalg.norm(real.tbs, axis=-1) if real.tbs.size else np.empty(0)
    d_u = np.linalg.norm(real.uav_ap, axis=-1) if real.uav_ap.size else np.empty(0)
    pick = lambda d: d[d <= lim].min(initial=math.inf)
    w, xl, xn = pick(d_m), pick(d_u[real.uav_ap_los]), pick(d_u[~real.uav_ap_los])
    if not (math.isfinite(w) or math.isfinite(xl) or math.isfinite(xn)):
        return -1
    a_m, a_u = params.k_m * params.p_m, params.k_u * params.p_ua
    with np.errstate(divide="ignore"):
        pw = [a_m * w ** -params.alpha_n, a_u * xl ** -params.alpha_l, a_u * xn ** -params.alpha_n]
    return int(np.argmax(pw))


# ---------------------------------------------------------------------------
# access simulation


def _masked_min(d, mask):
    dd = np.where(mask, d, np.inf)
    idx = np.argmin(dd, axis=1)
    return dd[np.arange(d.shape[0]), idx], idx


def _gain(rng, shape_m, size):
    """Unit-mean Gamma power gains with per-entry integer shape (1 = exponential)."""
    return rng.gamma(shape_m, 1.0 / shape_m, size)


def _access_batch(p: NetworkParams, win: Windows, rng, B: int, noise_w: float, need_fading: bool = True):
    m = p.nakagami_m
    a_m, a_u = p.k_m * p.p_m, p.k_u * p.p_ua
    R = p.interference_radius
    xy, mm = _disk(rng, p.lambda_m, win.tbs, B)
    xyz, mu = _half_ball(rng, p.lambda_ua, win.uav_ap, B)
    los = _los_tags(rng, xyz, p.env)
    d_m = np.linalg.norm(xy, axis=-1)
    d_u = np.linalg.norm(xyz, axis=-1)
    w, i_m = _masked_min(d_m, mm)
    xl, i_l = _masked_min(d_u, mu & los)
    xn, i_n = _masked_min(d_u, mu & ~los)
    with np.errstate(divide="ignore"):
        pw = np.stack([a_m * w ** -p.alpha_n, a_u * xl ** -p.alpha_l, a_u * xn ** -p.alpha_n], axis=1)
    if np.any(~np.isfinite(w) & ~np.isfinite(xl) & ~np.isfinite(xn)):
        raise WindowTooSmall("a realisation has no access candidate; enlarge the window")
    winner = np.argmax(pw, axis=1)
    out = dict(winner=winner, d_ma=w, d_ual=xl, d_uan=xn, xy=xy, mm=mm, xyz=xyz, mu=mu, los=los)
    if not need_fading:
        return out
    rows = np.arange(B)
    g_m = rng.standard_exponential(d_m.shape)
    g_u = _gain(rng, np.where(los, m, 1), d_u.shape)
    alpha_u = np.where(los, p.alpha_l, p.alpha_n)
    with np.errstate(divide="ignore"):
        r_m = np.where(mm, a_m * g_m * d_m ** -p.alpha_n, 0.0)
        r_u = np.where(mu, a_u * g_u * d_u ** -alpha_u, 0.0)
    serve_m = np.zeros_like(mm)
    serve_u = np.zeros_like(mu)
    serve_m[rows[winner == 0], i_m[winner == 0]] = True
    serve_u[rows[winner == 1], i_l[winner == 1]] = True
    serve_u[rows[winner == 2], i_n[winner == 2]] = True
    sig = (r_m * serve_m).sum(axis=1) + (r_u * serve_u).sum(axis=1)
    interf = (np.where((d_m <= R) & ~serve_m, r_m, 0.0).sum(axis=1)
              + np.where((d_u <= R) & ~serve_u, r_u, 0.0).sum(axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        out["sinr"] = np.nan_to_num(sig / (interf + noise_w), nan=0.0)
    serve_idx = np.where(winner == 1, i_l, i_n)
    out["tagged"] = xyz[rows, serve_idx]  # meaningful only for UAV-served rows
    return out


def _xhaul_batch(p: NetworkParams, win: Windows, rng, acc: dict, noise_w: float):
    """xHaul association and SINR of each realisation's serving UAV-AP."""
    m = p.nakagami_m
    a_m, a_b = p.k_m * p.p_m, p.k_u * p.p_ub
    R = p.interference_radius
    B = acc["winner"].size
    P = acc["tagged"]  # (B, 3)
    bs, mb = _half_ball(rng, p.lambda_ub, win.uav_bs, B)
    xy, mm = acc["xy"], acc["mm"]
    d_m = np.sqrt(((xy - P[:, None, :2]) ** 2).sum(-1) + P[:, None, 2] ** 2)
    d_b = np.linalg.norm(bs - P[:, None, :], axis=-1)
    x, i_m = _masked_min(d_m, mm)
    y, i_b = _masked_min(d_b, mb)
    with np.errstate(divide="ignore"):
        ub_wins = a_b * y ** -p.alpha_l > a_m * x ** -p.alpha_l
    rows = np.arange(B)
    g_m = rng.standard_exponential(d_m.shape)
    g_b = _gain(rng, m, d_b.shape)
    with np.errstate(divide="ignore"):
        r_m = np.where(mm, a_m * g_m * d_m ** -p.alpha_l, 0.0)
        r_b = np.where(mb, a_b * g_b * d_b ** -p.alpha_l, 0.0)
    serve_m = np.zeros_like(mm)
    serve_b = np.zeros_like(mb)
    serve_m[rows[~ub_wins], i_m[~ub_wins]] = True
    serve_b[rows[ub_wins], i_b[ub_wins]] = True
    sig = (r_m * serve_m).sum(axis=1) + (r_b * serve_b).sum(axis=1)
    interf = (np.where((d_m <= R) & ~serve_m, r_m, 0.0).sum(axis=1)
              + np.where((d_b <= R) & ~serve_b, r_b, 0.0).sum(axis=1))
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = sig / (interf + noise_w)
    return dict(ub_wins=ub_wins, sinr=np.nan_to_num(sinr, nan=0.0), d_mb=x, d_ub=y)


def _batch_size(p: NetworkParams, win: Windows) -> int:
    count = (p.lambda_m * math.pi * win.tbs ** 2 + p.lambda_ua * (2 / 3) * math.pi * win.uav_ap ** 3
             + p.lambda_ub * (2 / 3) * math.pi * win.uav_bs ** 3)
    return int(max(16, min(BATCH, 2_000_000 // max(count, 1.0))))


# ---------------------------------------------------------------------------
# estimators


def estimate_association(params: NetworkParams, n: int, seed=0, windows: Windows | None = None,
                         threads: int = 1) -> tuple[SimEstimate, SimEstimate, SimEstimate]:
    """RSSI association frequencies ``(TBS, LoS UAV-AP, NLoS UAV-AP)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    win = windows or default_windows(params)

    def job(B, rng):
        w = _access_batch(params, win, rng, B, 0.0, need_fading=False)["winner"]
        return np.bincount(w, minlength=3)

    counts = np.sum(_run(job, seed, n, threads, _batch_size(params, win)), axis=0)
    return tuple(SimEstimate.from_hits(c, n) for c in counts)


def sample_nearest_distances(params: NetworkParams, n: int, seed=0, h: float = 100.0,
                             windows: Windows | None = None) -> dict:
    """Nearest-candidate distances from ``n`` realisations.

    ``d_ma``, ``d_ual``, ``d_uan`` from the ground user at the origin;
    ``d_mb`` and ``d_ub`` from an aerial receiver at ``(0, 0, h)``.
    """
    win = windows or default_windows(params, margin=h)

    def job(B, rng):
        acc = _access_batch(params, win, rng, B, 0.0, need_fading=False)
        bs, mb = _half_ball(rng, params.lambda_ub, win.uav_bs, B)
        d_mb = np.sqrt((acc["xy"] ** 2).sum(-1) + h * h)
        d_ub = np.linalg.norm(bs - np.array([0.0, 0.0, h]), axis=-1)
        return dict(d_ma=acc["d_ma"], d_ual=acc["d_ual"], d_uan=acc["d_uan"],
                    d_mb=_masked_min(d_mb, acc["mm"])[0], d_ub=_masked_min(d_ub, mb)[0])

    parts = _run(job, seed, n, 1, _batch_size(params, win))
    return {k: np.concatenate([q[k] for q in parts]) for k in parts[0]}


@dataclass(frozen=True)
class CoverageEstimate:
    """Access coverage (overall and per serving tier) and xHaul coverage of UAV-served users.

    ``tbs``, ``los``, ``nlos`` are joint probabilities P(tier, covered);
    ``xhaul`` is P(xHaul covered | UAV-AP served).
    """

    overall: SimEstimate
    tbs: SimEstimate
    los: SimEstimate
    nlos: SimEstimate
    xhaul: SimEstimate | None


def estimate_coverage(params: NetworkParams, t_a, t_b=None, n: int = 10_000, seed=0,
                      bandwidth_access: float | None = None, bandwidth_xhaul: float | None = None,
                      windows: Windows | None = None, threads: int = 1) -> CoverageEstimate:
    """SINR coverage at the typical user (and at its serving UAV-AP for ``t_b``).

    ``t_a`` may be an array of thresholds; all share the same realisations.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t_a = np.atleast_1d(np.asarray(t_a, dtype=float))
    nz_a = params.noise_power(params.bandwidth_hz if bandwidth_access is None else bandwidth_access)
    nz_x = params.noise_power(params.bandwidth_hz if bandwidth_xhaul is None else bandwidth_xhaul)
    win = windows or default_windows(params, margin=params.interference_radius)

    def job(B, rng):
        acc = _access_batch(params, win, rng, B, nz_a)
        cov = acc["sinr"][:, None] > t_a[None, :]
        res = [cov.sum(0)] + [(cov & (acc["winner"] == k)[:, None]).sum(0) for k in range(3)]
        if t_b is not None:
            xh = _xhaul_batch(params, win, rng, acc, nz_x)
            uav = acc["winner"] > 0
            res += [np.array([(uav & (xh["sinr"] > t_b)).sum()]), np.array([uav.sum()])]
        return res

    parts = _run(job, seed, n, threads, _batch_size(params, win))
    sums = [np.sum([q[i] for q in parts], axis=0) for i in range(len(parts[0]))]
    squeeze = lambda e: SimEstimate(float(e.mean[0]), float(e.std_err[0]), n) if t_a.size == 1 else e
    est = [squeeze(SimEstimate.from_hits(s, n)) for s in sums[:4]]
    xh = None
    if t_b is not None:
        n_uav = int(sums[5][0])
        xh = SimEstimate.from_hits(sums[4][0], max(n_uav, 1))
        xh = SimEstimate(xh.mean, xh.std_err, n_uav)
    return CoverageEstimate(*est, xh)


def estimate_xhaul_association(params: NetworkParams, n: int, seed=0, windows: Windows | None = None,
                               d_a: float | None = None, theta: float | None = None) -> SimEstimate:
    """Frequency with which the xHaul of a UAV-AP picks a UAV-BS.

    With ``d_a`` and ``theta`` the UAV-AP sits at height ``d_a cos(theta)``;
    otherwise it is the serving UAV-AP of each realisation.
    """
    win = windows or default_windows(params, margin=params.interference_radius)

    def job(B, rng):
        acc = _access_batch(params, win, rng, B, 0.0, need_fading=False)
        uav = acc["winner"] > 0
        if d_a is not None:
            h = d_a * math.cos(theta or 0.0)
            acc["tagged"] = np.tile([d_a * math.sin(abs(theta or 0.0)), 0.0, h], (B, 1))
            uav = np.ones(B, dtype=bool)
        else:
            rows = np.arange(B)
            idx = np.where(acc["winner"] == 1, _masked_min(np.linalg.norm(acc["xyz"], axis=-1), acc["mu"] & acc["los"])[1],
                           _masked_min(np.linalg.norm(acc["xyz"], axis=-1), acc["mu"] & ~acc["los"])[1])
            acc["tagged"] = acc["xyz"][rows, idx]
        xh = _xhaul_batch(params, win, rng, acc, 0.0)
        return np.array([(xh["ub_wins"] & uav).sum(), uav.sum()])

    hits, total = np.sum(_run(job, seed, n, 1, _batch_size(params, win)), axis=0)
    e = SimEstimate.from_hits(hits, max(int(total), 1))
    return SimEstimate(e.mean, e.std_err, int(total))


def estimate_conditional_coverage(params: NetworkParams, tier: Tier, d: float, t: float, n: int = 10_000,
                                  seed=0, h: float = 0.0, bandwidth_hz: float | None = None) -> SimEstimate:
    """Coverage given the serving link class and distance, with explicit fading and angles.

    Interferers are drawn from each tier's process restricted to the region
    allowed by RSSI association (no competing node stronger than the server),
    within the interference radius of the receiver. For xHaul tiers the
    receiver sits at height ``h``.
    """
    p = params
    R = p.interference_radius
    m = p.nakagami_m
    noise = p.noise_power(p.bandwidth_hz if bandwidth_hz is None else bandwidth_hz)
    a_m, a_u, a_b = p.k_m * p.p_m, p.k_u * p.p_ua, p.k_u * p.p_ub
    aL, aN = p.alpha_l, p.alpha_n

    def job(B, rng):
        if tier in (Tier.TBS_ACCESS, Tier.UAV_LOS_ACCESS, Tier.UAV_NLOS_ACCESS):
            a_s, alpha_s, m_s = {Tier.TBS_ACCESS: (a_m, aN, 1), Tier.UAV_LOS_ACCESS: (a_u, aL, m),
                                 Tier.UAV_NLOS_ACCESS: (a_u, aN, 1)}[tier]
            s_pow = a_s * d ** -alpha_s
            xy, mm = _disk(rng, p.lambda_m, R, B)
            xyz, mu = _half_ball(rng, p.lambda_ua, R, B)
            los = _los_tags(rng, xyz, p.env)
            dm = np.linalg.norm(xy, axis=-1)
            du = np.linalg.norm(xyz, axis=-1)
            with np.errstate(divide="ignore"):
                pm = a_m * dm ** -aN
                pu = a_u * du ** -np.where(los, aL, aN)
            # the server is the strongest node: competitors must be weaker (equal-tier ties excluded)
            keep_m = mm & (pm < s_pow)
            keep_u = mu & (pu < s_pow)
            g_m = rng.standard_exponential(dm.shape)
            g_u = _gain(rng, np.where(los, m, 1), du.shape)
            interf = np.where(keep_m, pm * g_m, 0.0).sum(1) + np.where(keep_u, pu * g_u, 0.0).sum(1)
        else:
            a_s, m_s = (a_m, 1) if tier is Tier.TBS_XHAUL else (a_b, m)
            s_pow = a_s * d ** -aL
            xy, mm = _disk(rng, p.lambda_m, R, B)
            bs, mb = _half_ball(rng, p.lambda_ub, R + h, B)
            dm = np.sqrt((xy ** 2).sum(-1) + h * h)
            db = np.linalg.norm(bs - np.array([0.0, 0.0, h]), axis=-1)
            with np.errstate(divide="ignore"):
                pm = a_m * dm ** -aL
                pb = a_b * db ** -aL
            keep_m = mm & (pm < s_pow) & (dm <= R)
            keep_b = mb & (pb < s_pow) & (db <= R)
            g_m = rng.standard_exponential(dm.shape)
            g_b = _gain(rng, m, db.shape)
            interf = np.where(keep_m, pm * g_m, 0.0).sum(1) + np.where(keep_b, pb * g_b, 0.0).sum(1)
        g_s = _gain(rng, m_s, B)
        return int((g_s * s_pow > t * (interf + noise)).sum())

    hits = sum(_run(job, seed, n, 1, 2000))
    return SimEstimate.from_hits(hits, n)


def estimate_success(params: NetworkParams, svc: ServiceParams, policy: CachePolicy, n: int = 10_000, seed=0,
                     windows: Windows | None = None, threads: int = 1) -> SimEstimate:
    """End-to-end delivery success with drawn requests, cache contents and fading.

    The requested file follows the popularity law; the serving UAV-AP holds
    it with its caching probability. A miss needs both access and xHaul
    coverage; TBS-served users need access coverage only.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t_a, t_b = sinr_thresholds(svc, params.bandwidth_hz)
    nz_a = params.noise_power(_access_bandwidth(svc, params))
    nz_x = params.noise_power((1.0 - svc.beta) * params.bandwidth_hz)
    win = windows or default_windows(params, margin=params.interference_radius)
    a, b = policy.popularity, policy.placement

    def job(B, rng):
        acc = _access_batch(params, win, rng, B, nz_a)
        xh = _xhaul_batch(params, win, rng, acc, nz_x)
        req = rng.choice(a.size, size=B, p=a)
        hit = rng.random(B) < b[req]
        ok_a = acc["sinr"] > t_a
        ok_x = xh["sinr"] > t_b
        uav = acc["winner"] > 0
        ok = np.where(uav, ok_a & (hit | ok_x), ok_a)
        return int(ok.sum())

    hits = sum(_run(job, seed, n, threads, _batch_size(params, win)))
    return SimEstimate.from_hits(hits, n)
