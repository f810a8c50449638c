"""Radial interaction kernels supported on the unit ball.

Every kernel has the form ``gamma(t) = profile(t) * t**(-s)`` on ``[0, 1)``
with a smooth ``profile`` and is zero for ``t >= 1``. The normalization
constants make the per-coordinate second moment over the unit ball equal
to one in dimension ``d``.
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np
from scipy import integrate

from .quadrature import gauss_jacobi01

__all__ = [
    "Family",
    "Kernel",
    "make_kernel",
    "gamma",
    "gamma_rescaled",
    "second_moment",
    "sphere_area",
]

MOMENT_ORDER = 40


class Family(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    GAUSSIAN = "gaussian"
    SINGULAR = "singular"


def sphere_area(d):
    """Surface area of the unit sphere in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class Kernel:
    family: Family
    d: int
    s: float
    norm_const: float
    w_d: float

    def profile(self, t):
        """Smooth factor of the kernel, ``gamma(t) * t**s`` on [0, 1)."""
        t = np.asarray(t, dtype=float)
        if self.family is Family.LINEAR:
            return self.norm_const * (1.0 - t)
        if self.family is Family.GAUSSIAN:
            return self.norm_const * np.exp(-t * t)
        return np.full_like(t, self.norm_const)


def _gaussian_moment(d):
    # C_e = int_0^1 tau^(d+1) exp(-tau^2) dtau
    val, _ = integrate.quad(
        lambda tau: tau ** (d + 1) * math.exp(-tau * tau), 0.0, 1.0,
        epsabs=1e-14, epsrel=1e-14, limit=200,
    )
    return val


def make_kernel(family, d=2, s=None):
    """Build a normalized kernel of the given family in dimension ``d``.

    Parameters
    ----------
    family : Family or str
        One of ``constant``, ``linear``, ``gaussian``, ``singular``.
    d : int
        Spatial dimension.
    s : float, optional
        Singularity exponent, required for (and only used by) the singular
        family. Must satisfy ``s < d + 2`` so the second moment is finite.
    """
    family = Family(family)
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    d = int(d)
    w_d = sphere_area(d)
    if family is Family.SINGULAR:
        if s is None:
            raise ValueError("the singular kernel needs an exponent s")
        s = float(s)
        if not s < d + 2:
            raise ValueError(f"singular kernel needs s < d + 2 = {d + 2}, got {s}")
        c = d * (d + 2 - s) / w_d
    else:
        if s not in (None, 0, 0.0):
            raise ValueError(f"s is only meaningful for the singular family, got {s}")
        s = 0.0
        if family is Family.CONSTANT:
            c = d * (d + 2) / w_d
        elif family is Family.LINEAR:
            c = d * (d + 2) * (d + 3) / w_d
        else:
            c = d / (_gaussian_moment(d) * w_d)
    return Kernel(family, d, s, c, w_d)


def gamma(k, t):
    """Evaluate the kernel at dimensionless radius ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("kernel radius must be nonnegative")
    inside = t < 1.0
    if k.s != 0.0:
        if np.any(inside & (t == 0.0)):
            raise ValueError("singular kernel evaluated at t = 0")
        safe = np.where(inside, t, 1.0)
        val = np.where(inside, k.profile(safe) * safe ** (-k.s), 0.0)
    else:
        val = np.where(inside, k.profile(t), 0.0)
    return val[()] if val.ndim == 0 else val


def gamma_rescaled(k, delta, r):
    """Kernel with horizon ``delta``: ``delta**-(d+2) * gamma(r / delta)``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return gamma(k, np.asarray(r, dtype=float) / delta) * delta ** -(k.d + 2)


def second_moment(k, radius_cut=1.0):
    """Per-coordinate second moment of ``k`` over the ball of radius ``radius_cut``.

    Uses ``(w_d / d) * int_0^cut r^(d+1) gamma(r) dr`` with a Gauss-Jacobi
    rule that absorbs the power ``r^(d+1-s)`` exactly.
    """
    if not 0.0 < radius_cut <= 1.0:
        raise ValueError(f"radius_cut must lie in (0, 1], got {radius_cut}")
    p = k.d + 1 - k.s
    u, w = gauss_jacobi01(MOMENT_ORDER, p)
    radial = radius_cut ** (p + 1.0) * float(np.sum(w * k.profile(radius_cut * u)))
    return k.w_d / k.d * radial
