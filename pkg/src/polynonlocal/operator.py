"""Pointwise nonlocal diffusion operators on disks and inscribed polygons.

``L u(x) = 2 * int (u(y) - u(x)) gamma(x, y) dy`` where ``gamma`` is the
rescaled radial kernel restricted to the neighborhood of ``x``. For
polygonal neighborhoods the kernel is symmetrized over the two points so
the operator stays self-adjoint.
"""
from dataclasses import dataclass
import math
from typing import Callable, NamedTuple

import numpy as np

from . import _backend
from .geometry import (
    Strategy,
    _contains_offsets,
    as_point,
    contains,
    nocaps_polygon,
    polygon_area,
    regular_polygon,
)
from .kernels import gamma_rescaled, second_moment
from .quadrature import QuadratureSpec, ball_rule, fan_rule, gauss_jacobi01
from .solver import DEFAULT_REFINE, UnsupportedKernelError, inscribed_radius, offset_weights

__all__ = [
    "ScalarField",
    "QuadratureSpec",
    "UnsupportedKernelError",
    "EnergyNorms",
    "quadratic",
    "affine",
    "trig",
    "manufactured",
    "sine_product",
    "sigma_polygon",
    "sigma_regular_constant",
    "sigma_regular_peridynamic",
    "c_n",
    "apply_operator",
    "rescaled_apply",
    "symmetrized_gamma",
    "energy_norm_sq",
    "taylor_residual",
    "k_gamma_estimate",
]

SIGMA_ORDER = 24
CENTER_TOL = 1e-12


@dataclass(frozen=True)
class ScalarField:
    """Scalar function ``u(x1, x2)`` with optional second derivatives.

    All callables take coordinate arrays and broadcast like numpy ufuncs.
    """

    eval: Callable
    d11: Callable | None = None
    d22: Callable | None = None

    def __call__(self, x1, x2):
        return self.eval(x1, x2)

    def at(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.asarray(self.eval(pts[..., 0], pts[..., 1]), dtype=float)


def quadratic():
    """``q(x) = |x|^2``."""
    return ScalarField(
        lambda x1, x2: x1 * x1 + x2 * x2,
        d11=lambda x1, x2: 2.0 + 0.0 * x1,
        d22=lambda x1, x2: 2.0 + 0.0 * x1,
    )


def affine(a=3.0, b=-2.0, c=1.0):
    """``a x1 + b x2 + c``."""
    zero = lambda x1, x2: 0.0 * x1  # noqa: E731
    return ScalarField(lambda x1, x2: a * x1 + b * x2 + c, d11=zero, d22=zero)


def trig():
    """``sin(x1) cos(x2)``."""
    f = lambda x1, x2: np.sin(x1) * np.cos(x2)  # noqa: E731
    return ScalarField(f, d11=lambda x1, x2: -f(x1, x2), d22=lambda x1, x2: -f(x1, x2))


def manufactured():
    """Exact solution ``x1^2 x2 + x2^2`` of ``-Laplace u = -2 (x2 + 1)``."""
    return ScalarField(
        lambda x1, x2: x1 * x1 * x2 + x2 * x2,
        d11=lambda x1, x2: 2.0 * x2,
        d22=lambda x1, x2: 2.0 + 0.0 * x1,
    )


def sine_product():
    """``sin(pi x1) sin(pi x2)``, whose Dirichlet energy on the unit square is pi^2/2."""
    f = lambda x1, x2: np.sin(np.pi * x1) * np.sin(np.pi * x2)  # noqa: E731
    d = lambda x1, x2: -np.pi ** 2 * f(x1, x2)  # noqa: E731
    return ScalarField(f, d11=d, d22=d)


FIELDS = {"quadratic": quadratic, "affine": affine, "trig": trig, "manufactured": manufactured}


# --- second moments -------------------------------------------------------

def _check_count(n):
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    return int(n)


def sigma_polygon(k, p, order=SIGMA_ORDER):
    """Per-coordinate second moments ``int_P xi_i^2 gamma(|xi|) dxi``.

    ``p`` must be centred at the origin and lie in the closed unit disk.
    """
    if k.d != 2:
        raise ValueError(f"polygon moments are two-dimensional, kernel has d={k.d}")
    if np.any(np.abs(p.center) > CENTER_TOL):
        raise ValueError("polygon must be centred at the origin")
    z = p.offsets
    if np.any(np.hypot(z[:, 0], z[:, 1]) > 1.0 + CENTER_TOL):
        raise ValueError("polygon must lie in the closed unit disk")
    polygon_area(p)  # rejects degenerate and clockwise input
    pts, w = fan_rule(z, order, power=2.0 - k.s)
    r2 = pts[:, 0] ** 2 + pts[:, 1] ** 2
    base = w * k.profile(np.sqrt(r2)) / r2
    return float(np.sum(base * pts[:, 0] ** 2)), float(np.sum(base * pts[:, 1] ** 2))


def sigma_regular_constant(n):
    """Closed-form moment of the constant kernel over the regular n-gon."""
    n = _check_count(n)
    a = 2.0 * math.pi / n
    return math.sin(a) / a * (2.0 + math.cos(a)) / 3.0


def sigma_regular_peridynamic(n):
    """Closed-form moment of the ``s = 1`` kernel over the regular n-gon."""
    n = _check_count(n)
    t = math.pi / n
    sec, tan = 1.0 / math.cos(t), math.tan(t)
    sec3 = 0.5 * (sec * tan + math.log(sec + tan))
    return n / math.pi * math.cos(t) ** 3 * sec3


def c_n(n):
    """Value of the polygon-truncated constant-kernel operator on ``|x|^2``."""
    n = _check_count(n)
    a = 2.0 * math.pi / n
    return math.sin(a) / (math.pi / (2 * n)) * (2.0 + math.cos(a)) / 3.0


# --- pointwise operator ---------------------------------------------------

def _as_field(u):
    return u if isinstance(u, ScalarField) else ScalarField(u)


def _check_pointwise(k, q):
    if k.d != 2:
        raise ValueError(f"the pointwise operator is two-dimensional, kernel has d={k.d}")
    if k.s > k.d:
        raise UnsupportedKernelError(
            f"kernels more singular than s = d need a principal value, got s={k.s}"
        )
    if not isinstance(q, QuadratureSpec):
        raise TypeError("q must be a QuadratureSpec")


def _template_rule(nb, order, power, half):
    """Rule for a translation-invariant template about the origin."""
    if nb.strategy is Strategy.BALL:
        return ball_rule(nb.delta, order, power, half=half)
    tmpl = regular_polygon((0.0, 0.0), nb.delta, nb.n, nb.rotation).vertices
    tri = np.arange(nb.n // 2) if half else None
    return fan_rule(tmpl, order, power, triangles=tri)


def _radial_weight(k, delta, r, m):
    """``gamma_delta(r) / r^(m - s)``, i.e. the kernel with ``r^(m-s)`` factored out."""
    return delta ** (k.s - 4.0) * k.profile(r / delta) / r ** m


def apply_operator(u, x, k, nb, q=QuadratureSpec()):
    """Evaluate the nonlocal operator of ``nb`` at the point ``x``.

    Centrally symmetric templates (ball, even regular polygons) integrate
    ``u(x+z) + u(x-z) - 2u(x)`` over half the template when
    ``q.symmetric_pairing`` is set. Odd polygons pair over the full
    template, which equals the symmetrized-kernel integral for any
    translated template. The nocaps family is evaluated from its definition
    with a one-sided term per kernel half.
    """
    u = _as_field(u)
    x = as_point(x)
    _check_pointwise(k, q)
    if nb.strategy is Strategy.NOCAPS:
        return _apply_nocaps(u, x, k, nb, q)
    ux = float(u.at(x))
    delta = nb.delta
    if q.symmetric_pairing:
        half = nb.centrally_symmetric
        pts, w = _template_rule(nb, q.order, 2.0 - k.s, half)
        r = np.hypot(pts[:, 0], pts[:, 1])
        diff = u.at(x + pts) + u.at(x - pts) - 2.0 * ux
        total = float(np.sum(w * _radial_weight(k, delta, r, 2.0) * diff))
        return 2.0 * total if half else total
    pts, w = _template_rule(nb, q.order, 1.0 - k.s, False)
    r = np.hypot(pts[:, 0], pts[:, 1])
    ker = w * _radial_weight(k, delta, r, 1.0)
    plus = float(np.sum(ker * (u.at(x + pts) - ux)))
    minus = float(np.sum(ker * (u.at(x - pts) - ux)))
    return plus + minus


def _apply_nocaps(u, x, k, nb, q):
    delta, order = nb.delta, q.order
    ux = float(u.at(x))
    power = 1.0 - k.s
    poly = nocaps_polygon(x, delta, nb.grid_h)
    pts, w = fan_rule(poly.offsets, order, power)
    r = np.hypot(pts[:, 0], pts[:, 1])
    own = float(np.sum(w * _radial_weight(k, delta, r, 1.0) * (u.at(x + pts) - ux)))
    # second half: points y whose own polygon P(y) contains x
    pts, w = ball_rule(delta, order, power)
    r = np.hypot(pts[:, 0], pts[:, 1])
    ys = x + pts
    mask = np.array([bool(contains(nocaps_polygon(y, delta, nb.grid_h), x)) for y in ys])
    other = float(np.sum((w * _radial_weight(k, delta, r, 1.0) * (u.at(ys) - ux))[mask]))
    return own + other


def rescaled_apply(u, x, k, nb, q=QuadratureSpec()):
    """Regular-polygon operator multiplied by ``4 / c_n(n)``."""
    if nb.strategy is not Strategy.REGULAR:
        raise ValueError("the rescaled operator is defined for regular polygons")
    return 4.0 / c_n(nb.n) * apply_operator(u, x, k, nb, q)


def symmetrized_gamma(x, y, k, nb):
    """``gamma_delta(|y-x|) * (1[y in P(x)] + 1[x in P(y)]) / 2``."""
    x, y = as_point(x), as_point(y)
    r = float(np.hypot(*(y - x)))
    ker = float(gamma_rescaled(k, nb.delta, r)) if r > 0 else 0.0
    if nb.strategy is Strategy.BALL:
        return ker
    if nb.strategy is Strategy.REGULAR:
        tmpl = regular_polygon((0.0, 0.0), nb.delta, nb.n, nb.rotation).vertices
        a = bool(_contains_offsets(tmpl, y - x))
        b = bool(_contains_offsets(tmpl, x - y))
    else:
        a = bool(contains(nocaps_polygon(x, nb.delta, nb.grid_h), y))
        b = bool(contains(nocaps_polygon(y, nb.delta, nb.grid_h), x))
    return ker * (float(a) + float(b)) / 2.0


# --- energies -------------------------------------------------------------

class EnergyNorms(NamedTuple):
    polygon: float
    truncated: float
    ball: float


def energy_norm_sq(u, grid, k, nb, refine=DEFAULT_REFINE, backend=None):
    """Squared nonlocal energy of a grid function, with its two comparison norms.

    Computes ``sum_i sum_j (u_j - u_i)^2 gamma(c_i, c_j) h^4`` over ordered
    cell pairs, with ``u`` extended by zero outside the unit square. The
    same offsets and sub-cell samples serve the template kernel, the kernel
    cut to the inscribed disk and the full-ball kernel, so
    ``truncated <= polygon <= ball`` holds exactly.

    Parameters
    ----------
    u : callable or ndarray
        Either ``u(x1, x2)`` sampled at the free cell centres or an
        ``(n, n)`` array of cell values.
    grid : Grid
    """
    if k.d != 2:
        raise ValueError(f"grid energies are two-dimensional, kernel has d={k.d}")
    if k.s >= k.d:
        raise UnsupportedKernelError(
            f"cell-pair energies need an integrable kernel (s < {k.d}), got s={k.s}"
        )
    if callable(u):
        x1, x2 = grid.free_centers()
        vals = np.asarray(u(x1, x2), dtype=float) * np.ones_like(x1)
    else:
        vals = np.asarray(u, dtype=float)
        if vals.shape != (grid.n, grid.n):
            raise ValueError(f"expected values of shape {(grid.n, grid.n)}, got {vals.shape}")
    offsets, weights = offset_weights(grid.h, k, nb, refine, inscribed_radius(nb))
    pad = int(np.abs(offsets).max())
    padded = np.zeros((grid.n + 2 * pad, grid.n + 2 * pad))
    padded[pad:pad + grid.n, pad:pad + grid.n] = vals
    kern = _backend.get(backend)
    e = {key: float(kern.stencil_energy(padded, offsets, w)) for key, w in weights.items()}
    return EnergyNorms(e["polygon"], e["truncated"], e["ball"])


# --- diagnostics ----------------------------------------------------------

def _sigma_for(k, nb, x, q):
    if nb.strategy is Strategy.BALL:
        m = second_moment(k)
        return m, m
    if nb.strategy is Strategy.REGULAR:
        p = regular_polygon((0.0, 0.0), 1.0, nb.n, nb.rotation)
        return sigma_polygon(k, p, max(q.order, SIGMA_ORDER))
    # nocaps templates move with x: sigma_i = L (y_i - x_i)^2 / 2
    s1 = apply_operator(lambda a, b: (a - x[0]) ** 2 + 0.0 * b, x, k, nb, q)
    s2 = apply_operator(lambda a, b: (b - x[1]) ** 2 + 0.0 * a, x, k, nb, q)
    return 0.5 * s1, 0.5 * s2


def taylor_residual(phi, x, k, nb, q=QuadratureSpec()):
    """``|L phi(x) - sigma_1 phi_11(x) - sigma_2 phi_22(x)|``."""
    if not isinstance(phi, ScalarField) or phi.d11 is None or phi.d22 is None:
        raise ValueError("taylor_residual needs a ScalarField with d11 and d22")
    x = as_point(x)
    val = apply_operator(phi, x, k, nb, q)
    s1, s2 = _sigma_for(k, nb, x, q)
    return abs(val - s1 * float(phi.d11(*x)) - s2 * float(phi.d22(*x)))


def _ball_mass(k, delta, order):
    u, w = gauss_jacobi01(order, 1.0 - k.s)
    return 2.0 * math.pi * delta ** -2.0 * float(np.sum(w * k.profile(u)))


def _polygon_mass(k, delta, offsets, order):
    pts, w = fan_rule(offsets, order, -k.s)
    r = np.hypot(pts[:, 0], pts[:, 1])
    return float(np.sum(w * _radial_weight(k, delta, r, 0.0)))


def k_gamma_estimate(k, nb, sample_points=16, order=SIGMA_ORDER):
    """Kernel mass of the ball outside the polygon, maximized over sample points.

    Regular templates give the same value at every point. Nocaps templates
    are sampled on a uniform ``m x m`` lattice of the unit square with
    ``m = ceil(sqrt(sample_points))``.
    """
    if nb.strategy is Strategy.BALL:
        raise ValueError("the symmetric difference is empty for the ball strategy")
    if k.d != 2:
        raise ValueError(f"kernel must be two-dimensional, got d={k.d}")
    if k.s >= k.d:
        raise UnsupportedKernelError(f"kernel mass is infinite for s={k.s}")
    if int(sample_points) != sample_points or sample_points < 1:
        raise ValueError(f"sample_points must be a positive integer, got {sample_points}")
    ball = _ball_mass(k, nb.delta, order)
    if nb.strategy is Strategy.REGULAR:
        tmpl = regular_polygon((0.0, 0.0), nb.delta, nb.n, nb.rotation).vertices
        return ball - _polygon_mass(k, nb.delta, tmpl, order)
    m = math.ceil(math.sqrt(sample_points))
    c = (np.arange(m) + 0.5) / m
    best = 0.0
    for a in c:
        for b in c:
            p = nocaps_polygon((a, b), nb.delta, nb.grid_h)
            best = max(best, ball - _polygon_mass(k, nb.delta, p.offsets, order))
    return best
