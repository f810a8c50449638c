"""Acceptance criteria, one test per check.

Frozen reference values were computed independently with mpmath (30
digits) from formulas that do not share code with the package: the polar
moment ``n cos(pi/n)^4 (t + t^3/3) / pi`` with ``t = tan(pi/n)`` for the
constant kernel and a direct quadrature of ``r^3 / 3`` over the polygon
for the ``s = 1`` kernel.
"""
import math
import time

import numpy as np
import pytest

from polynonlocal import (
    NeighborhoodSpec,
    apply_operator,
    build_grid,
    c_n,
    energy_norm_sq,
    k_gamma_estimate,
    make_kernel,
    regular_polygon,
    rescaled_apply,
    second_moment,
    sigma_polygon,
    sigma_regular_constant,
    sigma_regular_peridynamic,
    taylor_residual,
)
from polynonlocal.operator import quadratic, sine_product, trig
from polynonlocal.study import Path, StudyConfig, run_study

SIGMA_CONSTANT = {
    4: 0.42441318157838756,
    6: 0.68916111927724006,
    8: 0.81241746822726449,
    16: 0.94976901098865712,
    64: 0.99679187907181416,
}
SIGMA_PERIDYNAMIC = {
    4: 0.51668864143969306,
    6: 0.75420106509595421,
    8: 0.85499159666803954,
    16: 0.96203650731204182,
    64: 0.99759274982793204,
}
C8 = 3.249669872909058
GAP8 = 0.75033012709094202
K_GAMMA_8 = 39.873473537157572  # (4/delta^2)(1 - (n/2pi) sin(2pi/n)), n=8, delta=0.1

X = (0.3, 0.4)
CONSTANT = make_kernel("constant")
PERIDYNAMIC = make_kernel("singular", s=1)


# --- sigma ---------------------------------------------------------------

@pytest.mark.acceptance("1a sigma quadrature vs closed form <= 1e-8 (constant, peridynamic)")
@pytest.mark.parametrize("n", [4, 6, 8, 16, 64])
def test_sigma_quadrature_matches_closed_form(n):
    p = regular_polygon((0.0, 0.0), 1.0, n)
    for k, closed, ref in (
        (CONSTANT, sigma_regular_constant, SIGMA_CONSTANT),
        (PERIDYNAMIC, sigma_regular_peridynamic, SIGMA_PERIDYNAMIC),
    ):
        s1, s2 = sigma_polygon(k, p)
        assert abs(s1 - closed(n)) <= 1e-8
        assert abs(s2 - closed(n)) <= 1e-8
        assert abs(closed(n) - ref[n]) <= 1e-12


@pytest.mark.acceptance("1b sigma(4) constant kernel = 4/(3 pi) +- 1e-12")
def test_sigma4_formula():
    assert abs(sigma_regular_constant(4) - 4.0 / (3.0 * math.pi)) <= 1e-12


@pytest.mark.acceptance("1c sigma(4) Monte Carlo oracle, 1e7 samples, +- 1e-3")
def test_sigma4_monte_carlo():
    # square |x1| + |x2| <= 1 inside [-1, 1]^2; constant kernel value 4/pi
    rng = np.random.default_rng(20240601)
    total, n_total = 0.0, 10_000_000
    for _ in range(10):
        z = rng.uniform(-1.0, 1.0, size=(n_total // 10, 2))
        inside = np.abs(z[:, 0]) + np.abs(z[:, 1]) <= 1.0
        total += float(np.sum(z[inside, 0] ** 2))
    mc = 4.0 * total / n_total * 4.0 / math.pi
    assert abs(mc - 4.0 / (3.0 * math.pi)) <= 1e-3
    assert abs(mc - sigma_polygon(CONSTANT, regular_polygon((0, 0), 1.0, 4))[0]) <= 1e-3


# --- normalization -------------------------------------------------------

@pytest.mark.acceptance("2 second moment = 1 +- 1e-10, four kernels, d = 1,2,3")
@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("family,s", [("constant", None), ("linear", None),
                                      ("gaussian", None), ("singular", 1.0)])
def test_normalization(family, s, d):
    assert abs(second_moment(make_kernel(family, d, s)) - 1.0) <= 1e-10


# --- operator consistency --------------------------------------------------

@pytest.mark.acceptance("3a L(q) on the ball = 4 +- 1e-8")
@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_ball_operator_on_quadratic(delta):
    val = apply_operator(quadratic(), X, CONSTANT, NeighborhoodSpec("ball", delta))
    assert abs(val - 4.0) <= 1e-8


@pytest.mark.acceptance("3b L(q) on the 8-gon = C_8 +- 1e-8, delta independent")
@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_polygon_operator_on_quadratic(delta):
    val = apply_operator(quadratic(), X, CONSTANT, NeighborhoodSpec("regular", delta, 8))
    assert abs(val - C8) <= 1e-8
    assert abs(c_n(8) - C8) <= 1e-12


@pytest.mark.acceptance("3c gap 4 - C_8 against the derived c_n(8), +- 1e-6")
def test_gap_derived():
    assert abs((4.0 - c_n(8)) - GAP8) <= 1e-6


@pytest.mark.acceptance("3d gap 4 - C_8 against the stated literal 0.4657, +- 1e-6")
def test_gap_literal():
    # The stated literal disagrees with c_n(8) by 0.28; this check is kept
    # so the discrepancy stays visible. See the README.
    assert abs((4.0 - c_n(8)) - 0.4657) <= 1e-6


@pytest.mark.acceptance("3e rescaled operator on q = 4 +- 1e-8")
@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_rescaled(delta):
    val = rescaled_apply(quadratic(), X, CONSTANT, NeighborhoodSpec("regular", delta, 8))
    assert abs(val - 4.0) <= 1e-8


# --- Taylor residual -------------------------------------------------------

@pytest.mark.acceptance("4 Taylor residual ratio delta 0.2 -> 0.1 in [3.5, 4.5], n = 8")
def test_taylor_ratio():
    r = [taylor_residual(trig(), X, CONSTANT, NeighborhoodSpec("regular", d, 8)) for d in (0.2, 0.1)]
    assert 3.5 <= r[0] / r[1] <= 4.5


# --- energy norms ----------------------------------------------------------

@pytest.mark.acceptance("5 norm sandwich truncated <= polygon <= ball, 10 random fields, 64^2 grid")
def test_norm_sandwich():
    start = time.perf_counter()
    grid = build_grid(1 / 64, 1 / 8)
    rng = np.random.default_rng(7)
    nb = NeighborhoodSpec("regular", 1 / 8, 8)
    for _ in range(10):
        e = energy_norm_sq(rng.standard_normal((64, 64)), grid, CONSTANT, nb)
        assert e.truncated <= e.polygon <= e.ball
        assert e.truncated < e.ball
    assert time.perf_counter() - start < 60


@pytest.mark.acceptance("6 energy of sin(pi x1) sin(pi x2) within 5% of pi^2/2 (ball, n = 64)")
@pytest.mark.parametrize("nb", [NeighborhoodSpec("ball", 1 / 16), NeighborhoodSpec("regular", 1 / 16, 64)],
                         ids=["ball", "n64"])
def test_norm_limit(nb):
    start = time.perf_counter()
    e = energy_norm_sq(sine_product(), build_grid(1 / 256, 1 / 16), CONSTANT, nb)
    assert abs(e.polygon / (math.pi ** 2 / 2) - 1.0) <= 0.05
    assert time.perf_counter() - start < 120


# --- convergence diagram ---------------------------------------------------

DELTAS = [1 / 8, 1 / 16, 1 / 32]


@pytest.fixture(scope="module")
def diagram():
    start = time.perf_counter()
    reports = {
        "ball": run_study(StudyConfig(Path.BALL_BASELINE, DELTAS)),
        "fixed": run_study(StudyConfig(Path.FIXED_N, DELTAS, n=8)),
        # n = 4 ceil(delta^-1/2 / 2): 8, 8, 12
        "growing": run_study(StudyConfig(Path.GROWING_N, DELTAS, n_c=2.0, n_p=0.5, n_multiple=4)),
    }
    return reports, time.perf_counter() - start


@pytest.mark.acceptance("7a ball baseline: L2 errors strictly decreasing")
def test_ball_baseline(diagram):
    e = diagram[0]["ball"].column("l2_error")
    assert e[0] > e[1] > e[2]


@pytest.mark.acceptance("7b fixed n = 8: e3/e2 in [0.8, 1.2] and e3 > 100 cg_tol")
def test_fixed_n_plateau(diagram):
    e = diagram[0]["fixed"].column("l2_error")
    assert 0.8 <= e[2] / e[1] <= 1.2
    assert e[2] > 100 * 1e-10


@pytest.mark.acceptance("7c growing n: errors strictly decreasing and e3 < 0.5 e1")
def test_growing_n(diagram):
    rep = diagram[0]["growing"]
    assert rep.column("n") == [8, 8, 12]
    e = rep.column("l2_error")
    assert e[0] > e[1] > e[2]
    assert e[2] < 0.5 * e[0]


@pytest.mark.acceptance("7d convergence diagram runtime < 5 min")
def test_diagram_runtime(diagram):
    assert diagram[1] < 300


# --- K(gamma) --------------------------------------------------------------

@pytest.mark.acceptance("8a K(gamma) n = 8, delta = 0.1: 39.874 +- 0.1")
def test_k_gamma_value():
    assert abs(k_gamma_estimate(CONSTANT, NeighborhoodSpec("regular", 0.1, 8)) - 39.874) <= 0.1
    assert abs(K_GAMMA_8 - 39.874) <= 1e-3


@pytest.mark.acceptance("8b K(gamma) halving delta multiplies by 4 +- 2%")
def test_k_gamma_scaling():
    a = k_gamma_estimate(CONSTANT, NeighborhoodSpec("regular", 0.1, 8))
    b = k_gamma_estimate(CONSTANT, NeighborhoodSpec("regular", 0.05, 8))
    assert abs(b / a / 4.0 - 1.0) <= 0.02
