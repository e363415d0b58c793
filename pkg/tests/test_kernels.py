import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothnp.kernels import (
    KERNEL_NAMES,
    BandwidthRule,
    a11_zero_kernel,
    bandwidth,
    epanechnikov,
    fourth_order_transform,
    get_kernel,
    kernel_moment,
    tabulated_kernel,
)


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_mass_symmetry_and_cdf_limits(name):
    k = get_kernel(name)
    assert kernel_moment(k, 0, 0) == pytest.approx(1.0, abs=1e-12)
    assert kernel_moment(k, 0, 1) == pytest.approx(0.0, abs=1e-14)
    assert k.cdf(-1.0) == 0.0 and k.cdf(-5.0) == 0.0
    assert k.cdf(1.0) == 1.0 and k.cdf(7.0) == 1.0
    assert k.cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    t = np.linspace(-1, 1, 41)
    assert np.allclose(k.cdf(t) + k.cdf(-t), 1.0, atol=1e-14)


@pytest.mark.parametrize("name", KERNEL_NAMES)
def test_a11_equals_a21(name):
    k = get_kernel(name)
    assert abs(kernel_moment(k, 1, 1) - kernel_moment(k, 2, 1)) < 1e-9


@pytest.mark.parametrize("name", KERNEL_NAMES)
@pytest.mark.parametrize("ij", [(0, 2), (1, 1), (1, 3), (2, 2), (0, 4)])
def test_exact_moments_agree_with_quadrature(name, ij):
    k = get_kernel(name)
    assert kernel_moment(k, *ij) == pytest.approx(
        kernel_moment(k, *ij, method="quadrature"), abs=1e-12)


def test_epanechnikov_closed_forms():
    k = epanechnikov()
    assert kernel_moment(k, 0, 2) == pytest.approx(0.2, abs=1e-14)
    # K(t) = (2 + 3t - t^3) / 4
    t = np.linspace(-1, 1, 11)
    assert np.allclose(k.cdf(t), (2 + 3 * t - t ** 3) / 4, atol=1e-15)
    assert kernel_moment(k, 1, 1) == pytest.approx(9 / 70, abs=1e-14)


def test_a11_zero_kernel():
    k = a11_zero_kernel()
    assert abs(kernel_moment(k, 1, 1)) < 1e-10
    assert not k.is_nonnegative()
    r = math.sqrt(105)
    assert k.density(0.0) == pytest.approx((r - 3) / 4)


def test_fourth_order_transform_of_epanechnikov():
    k4 = fourth_order_transform(epanechnikov())
    assert k4.name == "epanechnikov4" and k4.order == 4
    assert abs(kernel_moment(k4, 0, 0) - 1.0) < 1e-10
    assert abs(kernel_moment(k4, 0, 2)) < 1e-10
    assert kernel_moment(k4, 0, 4) == pytest.approx(-1 / 21, abs=1e-12)
    u = np.linspace(-1, 1, 21)
    assert np.allclose(k4.density(u), 3 / 32 * (15 - 35 * u ** 2) * (1 - u ** 2), atol=1e-14)


def test_fourth_order_transform_rejects_order_four():
    with pytest.raises(ValueError):
        fourth_order_transform(get_kernel("epanechnikov4"))


def test_kernel_validation():
    from numpy.polynomial import Polynomial
    from smoothnp.kernels import Kernel
    with pytest.raises(ValueError, match="integrates"):
        Kernel("bad", (-1.0, 1.0), (Polynomial([1.0]),))
    with pytest.raises(ValueError, match="symmetric"):
        Kernel("skew", (-1.0, 0.0, 1.0), (Polynomial([0.25]), Polynomial([0.75])))
    with pytest.raises(ValueError):
        Kernel("support", (-1.0, 2.0), (Polynomial([1 / 3]),))


def test_tabulated_kernel_triangular():
    k = tabulated_kernel("triangle", [-1, 0, 1], [0, 1, 0])
    assert kernel_moment(k, 0, 2) == pytest.approx(1 / 6, abs=1e-14)
    with pytest.raises(ValueError):
        tabulated_kernel("tri4", [-1, 0, 1], [0, 1, 0], order=4)
    with pytest.raises(ValueError):
        tabulated_kernel("short", [0.0], [1.0])


def test_moment_index_checks():
    k = epanechnikov()
    with pytest.raises(ValueError):
        kernel_moment(k, 7, 0)
    with pytest.raises(ValueError):
        kernel_moment(k, 0, 1, method="simpson")
    assert set(k.moment_table()) >= {"A_1_1", "A_0_2", "A_2_4"}


@given(st.floats(-3, 3))
def test_cdf_table_matches_cdf(t):
    from smoothnp import _backend
    for name in KERNEL_NAMES:
        k = get_kernel(name)
        b, c = k.cdf_table()
        got = _backend.kernel_cdf(np.array([t]), b, c)[0]
        assert got == pytest.approx(k.cdf(t), abs=1e-14)


def test_get_kernel_aliases_and_unknown():
    assert get_kernel("A11_zero") is get_kernel("a11zero")
    with pytest.raises(ValueError):
        get_kernel("gaussian")


def test_bandwidth_rules():
    assert bandwidth(BandwidthRule(), 30) == pytest.approx(30 ** (-1 / 3) / math.log(30))
    assert bandwidth(BandwidthRule(), 30) == pytest.approx(0.0946225, abs=1e-7)
    assert bandwidth(BandwidthRule.parse("fixed:0.2"), 10) == 0.2
    assert bandwidth(BandwidthRule.parse("power:2,0.3"), 100) == pytest.approx(2 * 100 ** -0.3)
    for text in ("azzalini-log", "fixed:0.2", "power:2.0,0.3"):
        assert BandwidthRule.parse(BandwidthRule.parse(text).describe()) == BandwidthRule.parse(text)
    with pytest.raises(ValueError):
        BandwidthRule("power_law", c=1.0, d=0.2)
    with pytest.raises(ValueError):
        BandwidthRule("fixed", h=-1.0)
    with pytest.raises(ValueError):
        BandwidthRule.parse("silverman")
    with pytest.raises(ValueError):
        bandwidth(BandwidthRule(), 1)
