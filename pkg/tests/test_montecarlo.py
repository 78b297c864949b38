import math

import numpy as np
import pytest
from scipy import stats

from uavhetnet import geometry as geo
from uavhetnet.association import association_report, assoc_xhaul_deconditioned
from uavhetnet.channel import los_weight
from uavhetnet.content import CachePolicy, success_probability
from uavhetnet.coverage import cov_overall_access
from uavhetnet.montecarlo import (SimEstimate, Windows, WindowTooSmall, associate, default_windows,
                                  estimate_association, estimate_coverage, estimate_success,
                                  estimate_xhaul_association, sample_nearest_distances, sample_realization)
from uavhetnet.params import NetworkParams, ServiceParams

P = NetworkParams()
S = ServiceParams()


def _rng(seed):
    return np.random.Generator(np.random.Philox(seed))


def test_poisson_counts_tbs():
    p = P.with_(lambda_ua=0.0, lambda_ub=0.0)
    rng = _rng(1)
    counts = np.array([sample_realization(p, 5000.0, rng).tbs.shape[0] for _ in range(10_000)])
    assert abs(counts.mean() - math.pi * 25e6 * 1e-6) < 1.0
    # chi-square goodness of fit against Poisson(78.54), tails pooled
    mu = math.pi * 25.0
    edges = np.arange(60, 99)
    obs = np.array([(counts < 60).sum()] + [(counts == k).sum() for k in edges[:-1]] + [(counts >= 98).sum()])
    pmf = np.concatenate([[stats.poisson.cdf(59, mu)], stats.poisson.pmf(edges[:-1], mu), [stats.poisson.sf(97, mu)]])
    assert stats.chisquare(obs, pmf * counts.size).pvalue > 0.01


def test_poisson_counts_uav_and_empty_tiers():
    p = P.with_(lambda_m=0.0, lambda_ub=0.0)
    rng = _rng(2)
    reals = [sample_realization(p, 500.0, rng) for _ in range(10_000)]
    counts = np.array([r.uav_ap.shape[0] for r in reals])
    assert abs(counts.mean() - (2 / 3) * math.pi * 1.25e8 * 1e-5) < 20
    assert all(r.tbs.shape[0] == 0 and r.uav_bs.shape[0] == 0 for r in reals[:100])
    assert all(np.all(r.uav_ap[:, 2] >= 0) for r in reals[:100])
    # LoS tags thin the uniform half-ball by the angle-averaged weight
    los = np.concatenate([r.uav_ap_los for r in reals[:200]])
    assert abs(los.mean() - los_weight(P.env)) < 4 * math.sqrt(0.25 / los.size)
    with pytest.raises(ValueError):
        sample_realization(p, 0.0, rng)


def test_association_estimates():
    est = estimate_association(P, 20_000, seed=3)
    assert sum(e.mean for e in est) == pytest.approx(1.0, abs=1e-12)
    rep = association_report(P)
    for e, a in zip(est, (rep.a_ma, rep.a_ual_bar, rep.a_uan_bar)):
        assert abs(e.mean - a) < 0.01
        assert e.std_err == pytest.approx(math.sqrt(e.mean * (1 - e.mean) / e.n))
    only_tbs = estimate_association(P.with_(lambda_ua=0.0), 2000, seed=4)
    assert only_tbs[0].mean == 1.0


def test_window_too_small():
    p = P.with_(lambda_m=0.0, lambda_ua=1e-9)
    with pytest.raises(WindowTooSmall):
        estimate_association(p, 100, seed=5, windows=Windows(10.0, 10.0, 10.0))


def test_window_robustness_common_numbers():
    # associate in doubled windows, then again with only the default windows' points
    win = default_windows(P)
    rng = _rng(6)
    n, changed = 2000, 0
    for _ in range(n):
        real = sample_realization(P, 2 * win.tbs, rng, uav_radius=2 * win.uav_ap, ub_radius=1.0)
        inner = real.__class__(real.tbs[np.linalg.norm(real.tbs, axis=1) <= win.tbs],
                               real.uav_ap[np.linalg.norm(real.uav_ap, axis=1) <= win.uav_ap],
                               real.uav_ap_los[np.linalg.norm(real.uav_ap, axis=1) <= win.uav_ap],
                               real.uav_bs, win.tbs, win.uav_ap, 1.0)
        changed += associate(real, P) != associate(inner, P)
    a = association_report(P).a_ual_bar
    assert changed / n < math.sqrt(a * (1 - a) / n)


def test_nearest_distance_laws():
    d = sample_nearest_distances(P, 10_000, seed=8, h=100.0)
    w_l = los_weight(P.env)
    checks = {
        "d_ma": lambda x: geo.cdf_nearest_tbs(x, P.lambda_m),
        "d_ual": lambda x: geo.cdf_nearest_uav(x, P.lambda_ua, w_l),
        "d_uan": lambda x: geo.cdf_nearest_uav(x, P.lambda_ua, 1 - w_l),
        "d_mb": lambda x: geo.cdf_xhaul_tbs(x, 100.0, P.lambda_m),
        "d_ub": lambda x: geo.cdf_xhaul_uavbs(x, 100.0, P.lambda_ub),
    }
    for name, cdf in checks.items():
        assert stats.kstest(d[name], cdf).statistic < 0.02, name


def test_rayleigh_single_tier_closed_form():
    # interference-limited single ground tier with nearest association and alpha = 4:
    # P(SIR > 1) = 1 / (1 + pi / 4)
    p = P.with_(lambda_ua=0.0, lambda_ub=0.0, noise_w=1e-40, interference_radius=10_000.0)
    est = estimate_coverage(p, 1.0, n=20_000, seed=9).overall
    assert abs(est.mean - 1 / (1 + math.pi / 4)) < 4 * est.std_err
    assert cov_overall_access(1.0, p) == pytest.approx(1 / (1 + math.pi / 4), abs=2e-3)


def test_coverage_estimates():
    est = estimate_coverage(P, [1e-9, 0.1, 1.0], t_b=2.0, n=10_000, seed=10)
    assert est.overall.mean[0] == 1.0
    assert np.all(np.diff(est.overall.mean) <= 0)
    total = est.tbs.mean + est.los.mean + est.nlos.mean
    np.testing.assert_allclose(total, est.overall.mean, atol=1e-12)
    assert 0.0 <= est.xhaul.mean <= 1.0
    for t, m in zip([0.1, 1.0], est.overall.mean[1:]):
        assert abs(cov_overall_access(t, P) - m) < 0.02


def test_xhaul_association_estimate():
    e = estimate_xhaul_association(P, 20_000, seed=11)
    assert abs(e.mean - assoc_xhaul_deconditioned(P).a_ub) < 0.01
    assert estimate_xhaul_association(P.with_(lambda_ub=0.0), 1000, seed=11).mean == 0.0


def test_success_estimates():
    pol = CachePolicy()
    est = estimate_success(P, S, pol, 20_000, seed=12)
    assert abs(est.mean - success_probability(S, P, pol).p_suc) < 0.03
    # beta = 1 with an empty cache: UAV-served users always miss and have no xHaul
    starved = estimate_success(P, S.with_(beta=1.0), CachePolicy(cache_size=0), 5000, seed=13)
    tbs_share = estimate_association(P, 5000, seed=13)[0]
    assert starved.mean <= tbs_share.mean + 4 * tbs_share.std_err + 1e-3
    # full cache: xHaul never needed, success equals access coverage
    full = estimate_success(P, S, CachePolicy(cache_size=1000), 5000, seed=14)
    cov = estimate_coverage(P, 2 ** 0.11 - 1, n=5000, seed=14, bandwidth_access=1e7).overall
    assert abs(full.mean - cov.mean) < 4 * math.hypot(full.std_err, cov.std_err)


def test_determinism_and_threads():
    a = estimate_association(P, 3000, seed=15)
    b = estimate_association(P, 3000, seed=15, threads=3)
    assert a == b
    c1 = estimate_coverage(P, [0.1, 1.0], n=3000, seed=16)
    c2 = estimate_coverage(P, [0.1, 1.0], n=3000, seed=16, threads=2)
    np.testing.assert_array_equal(c1.overall.mean, c2.overall.mean)
    assert estimate_success(P, S, CachePolicy(), 2000, 17) == estimate_success(P, S, CachePolicy(), 2000, 17)


def test_sim_estimate():
    e = SimEstimate.from_hits(25, 100)
    assert e.mean == 0.25 and e.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
    with pytest.raises(ValueError):
        estimate_association(P, 0)
