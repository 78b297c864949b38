import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavhetnet import geometry as geo
from uavhetnet.channel import DomainError
from uavhetnet.params import NetworkParams
from uavhetnet.quadrature import integrate


def test_tbs_law():
    assert geo.cdf_nearest_tbs(0.0, 1e-6) == 0.0
    # 1 - exp(-pi 1e-6 2.5e5)
    assert geo.cdf_nearest_tbs(500.0, 1e-6) == pytest.approx(0.544061872, abs=1e-8)
    assert integrate(lambda x: geo.pdf_nearest_tbs(x, 1e-6), 0, math.inf, scale=500.0) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        geo.cdf_nearest_tbs(-1.0, 1e-6)


def test_uav_law():
    # 1 - exp(-(2/3) pi 1e-5 0.5 1.25e5); the rounded value 0.7304 is off in the fourth digit
    assert geo.cdf_nearest_uav(50.0, 1e-5, 0.5) == pytest.approx(0.7299091619, abs=1e-9)
    val = integrate(lambda x: geo.pdf_nearest_uav(x, 1e-5, 0.6), 0, math.inf, scale=40.0)
    assert val == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        geo.pdf_nearest_uav(1.0, 1e-5, 0.0)


def test_xhaul_tbs_law():
    h = 80.0
    assert geo.cdf_xhaul_tbs(h, h, 1e-6) == 0.0
    assert geo.pdf_xhaul_tbs(h - 1.0, h, 1e-6) == 0.0
    val = integrate(lambda x: geo.pdf_xhaul_tbs(x, h, 1e-6), h, math.inf, scale=500.0)
    assert val == pytest.approx(1.0, abs=1e-6)
    x = np.linspace(0, 3000, 31)
    np.testing.assert_array_equal(geo.pdf_xhaul_tbs(x, 0.0, 1e-6), geo.pdf_nearest_tbs(x, 1e-6))


def test_xhaul_uavbs_law():
    h = 100.0
    val = integrate(lambda x: geo.pdf_xhaul_uavbs(x, h, 1e-7), 0, math.inf, scale=300.0, points=[h])
    assert val == pytest.approx(1.0, abs=1e-6)
    left = geo.pdf_xhaul_uavbs(h * (1 - 1e-15), h, 1e-7)
    right = geo.pdf_xhaul_uavbs(h * (1 + 1e-15), h, 1e-7)
    assert abs(left - right) < 1e-12
    x = np.linspace(0, 400, 9)
    full = 1 - np.exp(-(4 / 3) * math.pi * 1e-7 * x ** 3)
    np.testing.assert_allclose(geo.cdf_xhaul_uavbs(x, 1e9, 1e-7), full, atol=1e-15)


def test_clipped_volume():
    assert geo.clipped_ball_volume(1.0, 2.0) == pytest.approx(4 / 3 * math.pi)
    assert geo.clipped_ball_volume(1.0, 0.0) == pytest.approx(2 / 3 * math.pi)
    # continuity at x = h
    assert geo.clipped_ball_volume(5.0, 5.0) == pytest.approx(4 / 3 * math.pi * 125)


@given(st.floats(0, 5000), st.floats(0, 5000), st.floats(0, 300))
def test_cdfs_monotone_bounded(a, b, h):
    lo, hi = sorted((a, b))
    for cdf in (lambda x: geo.cdf_nearest_tbs(x, 1e-6), lambda x: geo.cdf_nearest_uav(x, 1e-5, 0.6),
                lambda x: geo.cdf_xhaul_tbs(x, h, 1e-6), lambda x: geo.cdf_xhaul_uavbs(x, h, 1e-7)):
        assert 0.0 <= cdf(lo) <= cdf(hi) <= 1.0


@pytest.mark.parametrize("law", geo.THETA_LAWS)
@pytest.mark.parametrize("los", [True, False])
def test_theta_weights_normalised(law, los):
    ct, w = geo.theta_average_weights(law, los, NetworkParams())
    assert w.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all((ct >= 0) & (ct <= 1))
