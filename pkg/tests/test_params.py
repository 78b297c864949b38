import math

import pytest
from hypothesis import given, strategies as st

from uavhetnet.params import (ENVIRONMENTS, Config, ConfigError, NetworkParams, ServiceParams, dbm_to_watts,
                              environment, paper_defaults, parse_config, watts_to_dbm)


def test_dbm_conversions():
    assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-15)
    assert dbm_to_watts(46.0) == pytest.approx(39.810717055, rel=1e-9)
    assert dbm_to_watts(27.0) == pytest.approx(0.501187234, rel=1e-9)


@given(st.floats(-150, 80))
def test_dbm_roundtrip(p):
    assert watts_to_dbm(dbm_to_watts(p)) == pytest.approx(p, abs=1e-9)


def test_environment_presets():
    pairs = {name: (env.eta, env.mu) for name, env in ENVIRONMENTS.items()}
    assert pairs["suburban"] == (4.88, 0.43)
    assert pairs["urban"] == (9.61, 0.16)
    assert pairs["dense-urban"] == (11.95, 0.136)
    assert pairs["high-rise"] == (24.23, 0.08)
    assert environment("highrise") is environment("high-rise")
    with pytest.raises(ConfigError):
        environment("rural")


def test_defaults():
    p, s = paper_defaults()
    assert p.alpha_l == 2 and p.alpha_n == 4
    assert p.lambda_m == 1e-6 and p.lambda_ua == 1e-5 and p.lambda_ub == 1e-7
    assert p.p_ub == dbm_to_watts(33.0)
    assert p.env.name == "urban"
    assert s.n_users == 5 and s.beta == 0.5
    lam_c = 299792458.0 / 2e9
    assert p.k_u == p.k_m == pytest.approx((lam_c / (4 * math.pi)) ** 2, rel=1e-12)


@pytest.mark.parametrize("bad", [dict(alpha_l=1.5), dict(alpha_n=1.9), dict(nakagami_m=0), dict(lambda_m=-1.0),
                                 dict(bandwidth_hz=0.0)])
def test_network_validation(bad):
    with pytest.raises(ValueError):
        NetworkParams(**bad)


@pytest.mark.parametrize("bad", [dict(beta=1.5), dict(n_users=0), dict(rate_access_bps=0.0)])
def test_service_validation(bad):
    with pytest.raises(ValueError):
        ServiceParams(**bad)


def test_parse_config_roundtrip():
    cfg = parse_config("""
[network]
lambda_ua = 2e-5
p_m_dbm = 40
[environment]
name = suburban
[service]
n_users = 8
[cache]
cache_size = 400
gamma = 0.5
""")
    assert cfg.network.lambda_ua == 2e-5
    assert cfg.network.p_m == pytest.approx(10.0)
    assert cfg.network.env.name == "suburban"
    assert cfg.service.n_users == 8
    assert cfg.cache == {"cache_size": 400, "gamma": 0.5}
    snap = cfg.snapshot()
    assert snap["network"]["env"]["eta"] == 4.88


@pytest.mark.parametrize("text", ["[bogus]\nx=1", "[network]\nfoo = 1", "[network]\nlambda_m = abc",
                                  "[cache]\ncache_size = 1.5", "not an ini"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_defaults():
    assert Config().network == NetworkParams()
