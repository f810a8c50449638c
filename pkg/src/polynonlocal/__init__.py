"""Nonlocal diffusion with polygonal interaction neighborhoods."""
from .geometry import NeighborhoodSpec, Polygon, Strategy, nocaps_polygon, regular_polygon
from .kernels import Family, Kernel, gamma, gamma_rescaled, make_kernel, second_moment
from .operator import (
    ScalarField,
    apply_operator,
    c_n,
    energy_norm_sq,
    k_gamma_estimate,
    rescaled_apply,
    sigma_polygon,
    sigma_regular_constant,
    sigma_regular_peridynamic,
    symmetrized_gamma,
    taylor_residual,
)
from .quadrature import QuadratureSpec
from .solver import ConvergenceError, build_grid, build_stencil, l2_error, solve

__version__ = "0.1.0"
