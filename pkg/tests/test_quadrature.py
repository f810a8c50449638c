import math

import numpy as np
import pytest

from polynonlocal.geometry import polygon_area, regular_polygon
from polynonlocal.quadrature import QuadratureSpec, ball_rule, fan_rule, gauss_jacobi01, gauss_legendre01


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(order=1)
    assert QuadratureSpec().order == 16


def test_legendre_exactness():
    x, w = gauss_legendre01(5)
    for p in range(10):
        assert np.sum(w * x ** p) == pytest.approx(1 / (p + 1), rel=1e-13)


@pytest.mark.parametrize("power", [-0.5, 0.0, 1.0, 2.5])
def test_jacobi_exactness(power):
    x, w = gauss_jacobi01(6, power)
    for p in range(12):
        assert np.sum(w * x ** p) == pytest.approx(1 / (p + 1 + power), rel=1e-12)
    with pytest.raises(ValueError):
        gauss_jacobi01(4, -1.0)


def test_rules_read_only():
    x, _ = gauss_legendre01(4)
    with pytest.raises(ValueError):
        x[0] = 1.0


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_fan_area_and_moment(n):
    z = regular_polygon((0, 0), 0.8, n, 0.2).offsets
    p, w = fan_rule(z, 8)
    assert np.sum(w) == pytest.approx(polygon_area(regular_polygon((0, 0), 0.8, n, 0.2)), rel=1e-13)
    # polar moment of a regular polygon: n a^4 (t + t^3/3) / 2, apothem a, t = tan(pi/n)
    a, t = 0.8 * math.cos(math.pi / n), math.tan(math.pi / n)
    assert np.sum(w * (p ** 2).sum(1)) == pytest.approx(n * a ** 4 * (t + t ** 3 / 3) / 2, rel=1e-12)


def test_fan_singular_weight():
    # int_square |z|^-1 dz for the square |x|+|y|<=1: 4 * int_0^{pi/2} 1/(cos t + sin t) dt
    z = regular_polygon((0, 0), 1, 4).offsets
    p, w = fan_rule(z, 12, power=-1.0)
    ref = 4 * math.sqrt(2) * math.log(1 + math.sqrt(2))
    assert np.sum(w) == pytest.approx(ref, rel=1e-8)


def test_fan_subset_of_triangles():
    z = regular_polygon((0, 0), 1, 8).offsets
    _, w = fan_rule(z, 6, triangles=np.arange(4))
    _, w_all = fan_rule(z, 6)
    assert np.sum(w) == pytest.approx(np.sum(w_all) / 2, rel=1e-14)


@pytest.mark.parametrize("power", [0.0, -1.0, 2.0])
def test_ball_rule(power):
    p, w = ball_rule(0.3, 8, power)
    area = 2 * math.pi * 0.3 ** (power + 2) / (power + 2)
    r = np.hypot(p[:, 0], p[:, 1])
    assert np.sum(w) == pytest.approx(area, rel=1e-13)
    assert np.sum(w * p[:, 0] ** 2 / r ** 2) == pytest.approx(area / 2, rel=1e-13)
    ph, wh = ball_rule(0.3, 8, power, half=True)
    assert np.sum(wh) == pytest.approx(area / 2, rel=1e-13)
    assert np.all(ph[:, 1] >= -1e-15)
