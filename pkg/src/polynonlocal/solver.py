"""Volume-constrained nonlocal diffusion on the unit square.

The unknowns are piecewise constants on a uniform grid of cell size ``h``
covering ``Omega = (0, 1)^2`` plus an interaction layer of whole cells. The
kernel restricted to a translation-invariant template becomes a stencil of
integer offsets, so the operator is applied matrix-free as a convolution
and the symmetric positive definite system is solved by conjugate
gradients.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import _backend
from .geometry import Strategy, _contains_offsets, _edge_signed_distance, regular_polygon
from .kernels import gamma_rescaled

__all__ = [
    "Grid",
    "Stencil",
    "Field",
    "ConvergenceError",
    "UnsupportedKernelError",
    "build_grid",
    "build_stencil",
    "assemble_apply",
    "solve",
    "l2_error",
    "DEFAULT_REFINE",
]

logger = logging.getLogger(__name__)

DEFAULT_REFINE = 16


class UnsupportedKernelError(ValueError):
    """The kernel is too singular for the requested operation."""


class ConvergenceError(RuntimeError):
    """Conjugate gradients hit the iteration cap."""

    def __init__(self, message, residual, iterations):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class Grid:
    """Cells of size ``h``: ``n x n`` free cells in Omega, ``layer`` constrained rings."""

    h: float
    n: int
    layer: int
    delta: float

    @property
    def shape(self):
        m = self.n + 2 * self.layer
        return (m, m)

    @property
    def dof(self):
        return self.n * self.n

    def coordinates(self):
        """Cell-centre coordinates along one axis of the full grid."""
        return (np.arange(self.shape[0]) - self.layer + 0.5) * self.h

    def free_mask(self):
        mask = np.zeros(self.shape, dtype=bool)
        mask[self.layer:self.layer + self.n, self.layer:self.layer + self.n] = True
        return mask

    def free_centers(self):
        c = (np.arange(self.n) + 0.5) * self.h
        x1, x2 = np.meshgrid(c, c, indexing="ij")
        return x1, x2


@dataclass(frozen=True, eq=False)
class Stencil:
    """Integer cell offsets and bilinear-form weights ``w(offset)``."""

    offsets: np.ndarray
    weights: np.ndarray
    h: float
    delta: float

    @property
    def radius(self):
        return int(np.abs(self.offsets).max()) if len(self.offsets) else 0

    @property
    def total_weight(self):
        return float(self.weights.sum())


@dataclass(eq=False)
class Field:
    """Values on the free cells; constrained cells are implicitly zero."""

    values: np.ndarray
    grid: Grid
    iterations: int | None = None
    residual: float | None = None
    meta: dict = field(default_factory=dict)


def build_grid(h, delta):
    """Uniform grid of Omega = (0,1)^2 with a layer of ``ceil(delta/h)`` cells."""
    if not (0 < h < delta):
        raise ValueError(f"need 0 < h < delta, got h={h}, delta={delta}")
    n = round(1.0 / h)
    if abs(n * h - 1.0) > 1e-9:
        raise ValueError(f"h={h} does not tile the unit interval")
    layer = math.ceil(delta / h - 1e-9)
    return Grid(1.0 / n, n, layer, float(delta))


def _check_stencil_kernel(k):
    if k.d != 2:
        raise ValueError(f"grid operators are two-dimensional, kernel has d={k.d}")
    if k.s >= k.d:
        raise UnsupportedKernelError(
            f"cell-pair weights need an integrable kernel (s < {k.d}), got s={k.s}"
        )


def _template_offsets(nb):
    return regular_polygon((0.0, 0.0), nb.delta, nb.n, nb.rotation).vertices


def _variant_values(nb, k, z, truncate_radius):
    """Kernel times indicator for the polygon/ball and its inscribed-disk cut.

    Indicators are nested by construction: ``truncated <= polygon <= ball``
    holds pointwise in floating point, not just in exact arithmetic.
    """
    delta = nb.delta
    r = np.hypot(z[..., 0], z[..., 1])
    ker = gamma_rescaled(k, delta, r)
    ball = (r < delta).astype(float)
    if nb.strategy is Strategy.BALL:
        poly = ball
    else:
        tmpl = _template_offsets(nb)
        inside = _contains_offsets(tmpl, z).astype(float)
        if nb.centrally_symmetric:
            poly = ball * inside
        else:
            poly = ball * 0.5 * (inside + _contains_offsets(tmpl, -z))
    trunc = (r < truncate_radius) * poly
    return {"ball": ker * ball, "polygon": ker * poly, "truncated": ker * trunc}


def _boundary_distance(nb, z, truncate_radius):
    r = np.hypot(z[..., 0], z[..., 1])
    dist = np.minimum(np.abs(r - nb.delta), np.abs(r - truncate_radius))
    if nb.strategy is not Strategy.BALL:
        tmpl = _template_offsets(nb)
        dist = np.minimum(dist, np.abs(_edge_signed_distance(tmpl, z)))
        if not nb.centrally_symmetric:
            dist = np.minimum(dist, np.abs(_edge_signed_distance(tmpl, -z)))
    return dist


def inscribed_radius(nb):
    """Inradius of the template about its centre (``delta`` for the ball)."""
    if nb.strategy is Strategy.BALL:
        return nb.delta
    if nb.strategy is Strategy.REGULAR:
        return nb.delta * math.cos(math.pi / nb.n)
    raise ValueError("inscribed radius of a nocaps template depends on the point")


def offset_weights(h, k, nb, refine=DEFAULT_REFINE, truncate_radius=None):
    """Cell-offset weights ``h**4 * mean(gamma_delta * indicator)`` per variant.

    Offsets span ``[-R, R]^2`` with ``R = ceil(delta/h) + 1`` (origin excluded).
    Offsets whose centre lies within ``sqrt(2) h`` of any template boundary
    average over ``refine x refine`` sub-points of the cell; the others use
    the centre value. All variants share the same offsets and sub-points.

    Returns
    -------
    offsets : ndarray of intp, shape (K, 2)
    values : dict of ndarray, shape (K,)
        Keys ``ball``, ``polygon``, ``truncated``.
    """
    if nb.strategy is Strategy.NOCAPS:
        raise ValueError("grid stencils need a translation-invariant template")
    if int(refine) != refine or refine < 1:
        raise ValueError(f"refine must be a positive integer, got {refine}")
    refine = int(refine)
    if truncate_radius is None:
        truncate_radius = inscribed_radius(nb)
    big = math.ceil(nb.delta / h - 1e-9) + 1
    idx = np.arange(-big, big + 1)
    di, dj = np.meshgrid(idx, idx, indexing="ij")
    offsets = np.column_stack([di.ravel(), dj.ravel()])
    offsets = offsets[np.any(offsets != 0, axis=1)].astype(np.intp)
    centres = offsets * h

    near = _boundary_distance(nb, centres, truncate_radius) < math.sqrt(2.0) * h
    values = {key: v.copy() for key, v in _variant_values(nb, k, centres, truncate_radius).items()}
    if np.any(near):
        sub = ((np.arange(refine) + 0.5) / refine - 0.5) * h
        s1, s2 = np.meshgrid(sub, sub, indexing="ij")
        shifts = np.column_stack([s1.ravel(), s2.ravel()])
        pts = centres[near][:, None, :] + shifts[None, :, :]
        for key, v in _variant_values(nb, k, pts, truncate_radius).items():
            values[key][near] = v.mean(axis=1)
    # offsets are listed so that -offsets == offsets[::-1]; averaging with the
    # mirror makes w(-d) == w(d) bitwise despite the sub-point summation order
    scale = h ** 4
    return offsets, {key: scale * (0.5 * (v + v[::-1])) for key, v in values.items()}


def build_stencil(grid, k, nb, refine=DEFAULT_REFINE):
    """Stencil of ``w(offset) = 2 h^4 gamma_delta(|offset h|) 1_template(offset h)``.

    Supports the ball and even-sided regular polygons, for which the
    symmetrized kernel coincides with the template truncation.
    """
    _check_stencil_kernel(k)
    if nb.strategy is Strategy.NOCAPS:
        raise ValueError("the grid solver supports ball and regular-polygon neighborhoods")
    if nb.strategy is Strategy.REGULAR and nb.n % 2:
        raise ValueError(f"the grid solver needs an even polygon side count, got n={nb.n}")
    if abs(nb.delta - grid.delta) > 1e-12 * grid.delta:
        raise ValueError("neighborhood horizon differs from the grid's")
    offsets, values = offset_weights(grid.h, k, nb, refine)
    w = 2.0 * values["polygon"]
    keep = w > 0
    return Stencil(offsets[keep], w[keep], grid.h, grid.delta)


def _pad(values, pad, fill=None):
    n0, n1 = values.shape
    out = np.zeros((n0 + 2 * pad, n1 + 2 * pad))
    if fill is not None:
        out[...] = fill
    out[pad:pad + n0, pad:pad + n1] = values
    return out


def assemble_apply(stencil, field, backend=None):
    """Matrix-free ``(A u)_i = sum_offsets w * (u_i - u_{i+offset})``, u = 0 off Omega."""
    kern = _backend.get(backend)
    pad = max(stencil.radius, 1)
    padded = _pad(np.asarray(field.values, dtype=float), pad)
    out = np.empty(field.values.shape)
    kern.stencil_apply(padded, stencil.offsets, stencil.weights, pad, out)
    return Field(out, field.grid)


def _sample(f, grid):
    if callable(f):
        x1, x2 = grid.free_centers()
        return np.broadcast_to(np.asarray(f(x1, x2), dtype=float), (grid.n, grid.n)).copy()
    arr = np.asarray(f, dtype=float)
    if arr.shape != (grid.n, grid.n):
        raise ValueError(f"expected values of shape {(grid.n, grid.n)}, got {arr.shape}")
    return arr


def _conjugate_gradient(matvec, b, tol, maxiter):
    x = np.zeros_like(b)
    r = b.copy()
    b_norm = math.sqrt(float(np.dot(b, b)))
    if b_norm == 0.0:
        return x, 0, 0.0
    p = r.copy()
    rr = float(np.dot(r, r))
    for it in range(1, maxiter + 1):
        ap = matvec(p)
        alpha = rr / float(np.dot(p, ap))
        x += alpha * p
        r -= alpha * ap
        rr_new = float(np.dot(r, r))
        rel = math.sqrt(rr_new) / b_norm
        if rel <= tol:
            return x, it, rel
        p *= rr_new / rr
        p += r
        rr = rr_new
    raise ConvergenceError(
        f"conjugate gradients stopped after {maxiter} iterations at relative residual {rel:.3e}",
        residual=rel,
        iterations=maxiter,
    )


def solve(stencil, grid, f, tol=1e-10, constraint=None, maxiter=None, backend=None):
    """Solve ``-L u = f`` in Omega with ``u = constraint`` on the layer.

    The assembled form is scaled by ``1/h^2`` so that its rows approximate
    ``-L`` pointwise and ``f`` enters unscaled. ``constraint`` defaults to
    the homogeneous volume constraint; a callable ``g(x1, x2)`` imposes
    ``u = g`` at the centres of the constrained cells.

    Raises
    ------
    ConvergenceError
        If the relative residual is still above ``tol`` after ``maxiter``
        iterations (default ``10 * sqrt(dof)``).
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    kern = _backend.get(backend)
    n, h = grid.n, grid.h
    pad = max(stencil.radius, grid.layer, 1)
    scale = 1.0 / (h * h)
    b = _sample(f, grid)
    if constraint is not None:
        c = (np.arange(n + 2 * pad) - pad + 0.5) * h
        x1, x2 = np.meshgrid(c, c, indexing="ij")
        data = np.asarray(constraint(x1, x2), dtype=float) * np.ones_like(x1)
        data[pad:pad + n, pad:pad + n] = 0.0
        lift = np.empty((n, n))
        kern.stencil_apply(data, stencil.offsets, stencil.weights, pad, lift)
        b = b - scale * lift

    padded = np.zeros((n + 2 * pad, n + 2 * pad))
    inner = padded[pad:pad + n, pad:pad + n]
    out = np.empty((n, n))

    def matvec(v):
        inner[...] = v.reshape(n, n)
        kern.stencil_apply(padded, stencil.offsets, stencil.weights, pad, out)
        return scale * out.ravel()

    if maxiter is None:
        maxiter = 10 * math.ceil(math.sqrt(grid.dof))
    x, its, res = _conjugate_gradient(matvec, b.ravel(), tol, maxiter)
    logger.debug("cg converged in %d iterations (residual %.2e)", its, res)
    return Field(x.reshape(n, n), grid, iterations=its, residual=res)


def l2_error(u, exact):
    """Discrete L2 norm over Omega of ``u - exact`` at the cell centres."""
    diff = u.values - _sample(exact, u.grid)
    return math.sqrt(float(np.sum(diff * diff)) * u.grid.h ** 2)
