import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from uavhetnet.channel import (DomainError, Fading, Tier, alzer_eta, fading_cdf, link_budget, los_probability,
                               los_weight, nlos_weight, received_power_mean, sample_fading, sinr_thresholds)
from uavhetnet.params import ENVIRONMENTS, NetworkParams, ServiceParams, environment

URBAN = environment("urban")


def test_los_probability_endpoints():
    assert los_probability(0.0, URBAN) == pytest.approx(0.999975, abs=1e-6)
    assert los_probability(math.pi / 2, URBAN) == pytest.approx(0.0219, abs=1e-4)
    with pytest.raises(DomainError):
        los_probability(-0.1, URBAN)
    with pytest.raises(DomainError):
        los_probability(2.0, URBAN)


@given(st.sampled_from(list(ENVIRONMENTS.values())), st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_los_probability_monotone_in_angle(env, a, b):
    lo, hi = sorted((a, b))
    pl, ph = los_probability(lo, env), los_probability(hi, env)
    assert 0.0 <= ph <= pl <= 1.0


def test_los_weights():
    for env in ENVIRONMENTS.values():
        assert los_weight(env) + nlos_weight(env) == 1.0
    frozen = {"suburban": 0.8504418211977236, "urban": 0.6026060086493868,
              "dense-urban": 0.5084227106147706, "high-rise": 0.16060364852507014}
    for name, val in frozen.items():
        assert los_weight(environment(name)) == pytest.approx(val, abs=1e-9)
    assert los_weight(environment("suburban")) > los_weight(environment("high-rise"))


def test_link_budget_mapping():
    p = NetworkParams()
    expect = {
        Tier.TBS_ACCESS: (p.k_m, p.p_m, p.alpha_n, Fading.RAYLEIGH),
        Tier.UAV_LOS_ACCESS: (p.k_u, p.p_ua, p.alpha_l, Fading.NAKAGAMI),
        Tier.UAV_NLOS_ACCESS: (p.k_u, p.p_ua, p.alpha_n, Fading.RAYLEIGH),
        Tier.TBS_XHAUL: (p.k_m, p.p_m, p.alpha_l, Fading.RAYLEIGH),
        Tier.UAVBS_XHAUL: (p.k_u, p.p_ub, p.alpha_l, Fading.NAKAGAMI),
    }
    for tier, (k, pw, a, fad) in expect.items():
        lb = link_budget(tier, p)
        assert (lb.k, lb.power_w, lb.alpha, lb.fading) == (k, pw, a, fad)
    assert link_budget(Tier.UAV_LOS_ACCESS, p).shape == 3
    assert link_budget(Tier.TBS_ACCESS, p).shape == 1


def test_received_power():
    p = NetworkParams()
    lb = link_budget(Tier.TBS_ACCESS, p)
    assert received_power_mean(lb, 1.0) == pytest.approx(lb.k * lb.power_w)
    assert received_power_mean(lb, 100.0) == pytest.approx(p.k_m * 39.810717055 * 100.0 ** -4, rel=1e-9)
    los = link_budget(Tier.UAV_LOS_ACCESS, p)
    assert received_power_mean(los, 20.0) == pytest.approx(received_power_mean(los, 10.0) / 4)
    with pytest.raises(DomainError):
        received_power_mean(lb, 0.0)


def test_fading_moments():
    rng = np.random.Generator(np.random.Philox(7))
    g1 = sample_fading(1, rng, 10 ** 6)
    g3 = sample_fading(3, rng, 10 ** 6)
    assert g1.mean() == pytest.approx(1.0, abs=0.005)
    assert g3.mean() == pytest.approx(1.0, abs=0.005)
    assert g3.var() == pytest.approx(1 / 3, abs=0.01)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_fading_ks(m):
    rng = np.random.Generator(np.random.Philox(m))
    x = sample_fading(m, rng, 10 ** 5)
    assert stats.kstest(x, lambda v: fading_cdf(v, m)).pvalue > 0.001


def test_nakagami_one_is_exponential():
    rng = np.random.Generator(np.random.Philox(11))
    x = sample_fading(1, rng, 10 ** 5)
    assert stats.kstest(x, "expon").pvalue > 0.001
    v = np.linspace(0, 5, 11)
    np.testing.assert_allclose(fading_cdf(v, 1), 1 - np.exp(-v), atol=1e-14)


def test_thresholds():
    t_a, t_b = sinr_thresholds(ServiceParams(), 1e8)
    assert t_a == pytest.approx(2 ** 0.11 - 1, rel=1e-12)
    assert t_a == pytest.approx(0.0793, abs=1e-4)
    assert t_b == pytest.approx(2.0314, abs=1e-4)
    assert sinr_thresholds(ServiceParams(beta=1.0), 1e8)[1] == math.inf
    assert sinr_thresholds(ServiceParams(beta=0.0), 1e8)[0] == math.inf


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_thresholds_monotone_in_beta(b1, b2):
    lo, hi = sorted((b1, b2))
    ta_lo, tb_lo = sinr_thresholds(ServiceParams(beta=lo), 1e8)
    ta_hi, tb_hi = sinr_thresholds(ServiceParams(beta=hi), 1e8)
    assert ta_hi <= ta_lo and tb_hi >= tb_lo


def test_alzer_eta():
    assert alzer_eta(1) == 1.0
    assert alzer_eta(3) == pytest.approx(3 * 6 ** (-1 / 3), rel=1e-14)
