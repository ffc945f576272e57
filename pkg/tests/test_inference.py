import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rkhs_ksample import InvalidAlpha, StatisticBreakdown, decide, std_normal_cdf
from rkhs_ksample.inference import METHOD, std_normal_sf

# 40-digit mpmath quadrature of the standard normal density, frozen
PHI_MINUS_1 = 0.1586552539314570514147674543679620775221
PHI_2 = 0.9772498680518207927997173628334665625282


def breakdown(n_t_hat, n=100):
    return StatisticBreakdown((), 0.0, 1.0, 0.2, n_t_hat / n, n_t_hat, n, (50, 50))


def test_cdf_values():
    assert std_normal_cdf(0.0) == 0.5
    assert abs(std_normal_cdf(1.6448536269514722) - 0.95) <= 1e-9
    assert abs(std_normal_cdf(-1.0) - PHI_MINUS_1) <= 1e-12
    assert abs(std_normal_cdf(2.0) - PHI_2) <= 1e-12


@given(st.floats(-30, 30))
def test_cdf_sf_complement(z):
    assert abs(std_normal_cdf(z) + std_normal_sf(z) - 1.0) <= 1e-15
    assert abs(std_normal_cdf(z) - std_normal_sf(-z)) <= 1e-16


def test_decide_zero():
    r = decide(breakdown(0.0), 0.05)
    assert r.p_value == 0.5 and not r.reject
    assert r.method == METHOD == "asymptotic-normal-one-sided"


def test_decide_boundary_is_rejection():
    r = decide(breakdown(1.6448536269514722), 0.05)
    assert r.p_value == pytest.approx(0.05, abs=1e-9)
    assert r.reject


def test_decide_negative():
    r = decide(breakdown(-2.0), 0.05)
    assert abs(r.p_value - PHI_2) <= 1e-12
    assert not r.reject


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 2.0, math.nan])
def test_invalid_alpha(alpha):
    with pytest.raises(InvalidAlpha):
        decide(breakdown(1.0), alpha)


@given(st.floats(-8, 8), st.floats(0.01, 0.5))
def test_p_value_strictly_decreasing(z, dz):
    assert decide(breakdown(z + dz)).p_value < decide(breakdown(z)).p_value


@given(st.floats(-10, 10), st.floats(0.001, 0.999))
def test_reject_iff_p_below_alpha(z, alpha):
    r = decide(breakdown(z), alpha)
    assert r.reject == (r.p_value <= alpha + 1e-12)
    assert 0.0 <= r.p_value <= 1.0
    assert decide(breakdown(z), alpha) == r
