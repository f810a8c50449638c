"""Tensor Gauss rules for polygons and disks centred at a singular point.

All rules integrate ``|z|**power * H(z)`` for smooth ``H``: the radial
factor is absorbed exactly by a Gauss-Jacobi rule, so kernels with an
``r**-s`` singularity at the centre keep spectral accuracy.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = ["QuadratureSpec", "gauss_legendre01", "gauss_jacobi01", "fan_rule", "ball_rule"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Points per direction and whether to pair ``z`` with ``-z``."""

    order: int = 16
    symmetric_pairing: bool = True

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ValueError(f"quadrature order must be an integer >= 2, got {self.order}")


def _frozen(*arrays):
    for a in arrays:
        a.flags.writeable = False
    return arrays


@lru_cache(maxsize=None)
def gauss_legendre01(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return _frozen((x + 1.0) / 2.0, w / 2.0)


@lru_cache(maxsize=None)
def gauss_jacobi01(order, power):
    """Nodes and weights for ``int_0^1 u**power g(u) du`` (``power > -1``)."""
    if not power > -1.0:
        raise ValueError(f"Gauss-Jacobi weight u**{power} is not integrable")
    x, w = special.roots_jacobi(order, 0.0, power)
    return _frozen((1.0 + x) / 2.0, w / 2.0 ** (power + 1.0))


def fan_rule(offsets, order, power=0.0, triangles=None):
    """Rule for ``int_P |z|**power H(z) dz`` over a polygon star-shaped about 0.

    The polygon (vertex offsets from its centre, counter-clockwise) is split
    into the fan of triangles ``(0, v_k, v_{k+1})``. Each triangle is the
    image of the unit square under ``(u, v) -> u * (v_k + v (v_{k+1} - v_k))``,
    whose Jacobian ``u * |v_k x v_{k+1}|`` joins ``u**power`` in the Jacobi
    weight.

    Returns
    -------
    points : ndarray, shape (m, 2)
    weights : ndarray, shape (m,)
    """
    a = np.asarray(offsets, dtype=float)
    b = np.roll(a, -1, axis=0)
    if triangles is not None:
        a, b = a[triangles], b[triangles]
    jac = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    u, wu = gauss_jacobi01(order, 1.0 + power)
    v, wv = gauss_legendre01(order)
    edge = a[:, None, :] + v[None, :, None] * (b - a)[:, None, :]  # (T, nv, 2)
    radial = np.hypot(edge[..., 0], edge[..., 1]) ** power
    points = u[None, :, None, None] * edge[:, None, :, :]
    weights = jac[:, None, None] * wu[None, :, None] * (wv[None, :] * radial)[:, None, :]
    return points.reshape(-1, 2), weights.reshape(-1)


def ball_rule(radius, order, power=0.0, half=False):
    """Polar rule for ``int_B |z|**power H(z) dz`` over the disk of ``radius``.

    The angular direction uses the periodic trapezoid rule with ``4 * order``
    nodes on the full circle; ``half=True`` keeps the upper half-plane
    ``0 <= theta < pi`` (exact for integrands even under ``z -> -z``).
    """
    u, wu = gauss_jacobi01(order, 1.0 + power)
    n_theta = 4 * order
    if half:
        n_theta //= 2
        theta = np.pi * np.arange(n_theta) / n_theta
        w_theta = np.pi / n_theta
    else:
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        w_theta = 2.0 * np.pi / n_theta
    r = radius * u
    points = r[:, None, None] * np.stack([np.cos(theta), np.sin(theta)], axis=-1)[None]
    weights = np.broadcast_to((radius ** (power + 2.0) * wu * w_theta)[:, None], points.shape[:2])
    return points.reshape(-1, 2), np.ascontiguousarray(weights).reshape(-1)
