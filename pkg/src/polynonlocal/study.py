"""Convergence studies along paths in the (delta, n) plane, plus diagnostic sweeps.

Problem paths solve the manufactured problem ``u0 = x1^2 x2 + x2^2``,
``f = -2 (x2 + 1)`` for each horizon in ``delta_list`` on the grid
``h = 1 / ceil(delta^-beta)`` and tabulate the L2 error:

* ``BallBaseline``: disk neighborhoods.
* ``FixedN``: one regular polygon size ``n`` for every horizon.
* ``GrowingN``: ``n = n_multiple * ceil(n_c * delta^-n_p / n_multiple)``.

The diagnostic paths tabulate second moments (``SigmaTable``), energy
norms against their local limit (``NormLimit``) and the kernel mass lost
outside the polygon (``KGamma``).
"""
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
import csv
import json
import logging
import math
import time

import numpy as np

from .geometry import NeighborhoodSpec, Strategy, regular_polygon
from .kernels import Family, make_kernel
from .operator import (
    c_n,
    energy_norm_sq,
    k_gamma_estimate,
    manufactured,
    sigma_polygon,
    sine_product,
    sigma_regular_constant,
    sigma_regular_peridynamic,
)
from .solver import DEFAULT_REFINE, ConvergenceError, build_grid, build_stencil, l2_error, solve

__all__ = [
    "Path",
    "StudyConfig",
    "StudyReport",
    "run_study",
    "write_csv",
    "read_csv",
    "load_config",
    "n_for_delta",
    "mesh_size",
    "PROBLEM_COLUMNS",
]

logger = logging.getLogger(__name__)

MAX_DOF = 4_000_000
MAX_STENCIL_RADIUS = 64
PROBLEM_COLUMNS = ("k", "delta", "n", "h", "dof", "l2_error", "rate")


class Path(str, Enum):
    FIXED_N = "FixedN"
    GROWING_N = "GrowingN"
    BALL_BASELINE = "BallBaseline"
    SIGMA_TABLE = "SigmaTable"
    NORM_LIMIT = "NormLimit"
    K_GAMMA = "KGamma"


@dataclass
class StudyConfig:
    """Flat study description; field names double as JSON keys."""

    path: Path
    delta_list: list = field(default_factory=lambda: [1 / 8, 1 / 16, 1 / 32])
    n: int | None = None
    n_c: float = 1.0
    n_p: float = 0.5
    n_multiple: int = 2
    n_list: list = field(default_factory=lambda: [4, 6, 8, 16, 32, 64])
    beta: float = 1.5
    kernel: str = "constant"
    s: float | None = None
    quad_order: int = 16
    cg_tol: float = 1e-10
    refine: int = DEFAULT_REFINE

    def __post_init__(self):
        self.path = Path(self.path)
        self.delta_list = [float(d) for d in self.delta_list]
        self.kernel = Family(self.kernel).value
        if not self.delta_list and self.path is not Path.SIGMA_TABLE:
            raise ValueError("delta_list must not be empty")
        if any(not d > 0 for d in self.delta_list):
            raise ValueError("horizons must be positive")
        if any(b >= a for a, b in zip(self.delta_list, self.delta_list[1:])):
            raise ValueError("delta_list must be strictly decreasing")
        if not self.beta > 1:
            raise ValueError(f"beta must exceed 1, got {self.beta}")
        if self.path is Path.FIXED_N and (self.n is None or self.n < 4 or self.n % 2):
            raise ValueError(f"FixedN needs an even n >= 4, got {self.n}")
        if self.path is Path.K_GAMMA and (self.n is None or self.n < 3):
            raise ValueError(f"KGamma needs n >= 3, got {self.n}")
        if self.path is Path.GROWING_N:
            if not (self.n_c > 0 and self.n_p > 0):
                raise ValueError("GrowingN needs n_c > 0 and n_p > 0")
            if int(self.n_multiple) != self.n_multiple or self.n_multiple < 2 or self.n_multiple % 2:
                raise ValueError(f"n_multiple must be a positive even integer, got {self.n_multiple}")
        if self.path is Path.SIGMA_TABLE and (not self.n_list or min(self.n_list) < 3):
            raise ValueError("SigmaTable needs n_list entries >= 3")
        if self.quad_order < 2:
            raise ValueError(f"quad_order must be >= 2, got {self.quad_order}")
        if not self.cg_tol > 0:
            raise ValueError(f"cg_tol must be positive, got {self.cg_tol}")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "path" not in data:
            raise ValueError("config needs a 'path'")
        return cls(**data)

    def to_dict(self):
        d = asdict(self)
        d["path"] = self.path.value
        return d

    def make_kernel(self):
        return make_kernel(self.kernel, 2, self.s)


@dataclass
class StudyReport:
    """Rows ordered by ``k`` plus the config echo and wall time."""

    columns: tuple
    rows: list
    meta: dict = field(default_factory=dict)

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def format_table(self):
        def cell(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)

        body = [[cell(v) for v in row] for row in self.rows]
        widths = [max([len(c)] + [len(r[i]) for r in body]) for i, c in enumerate(self.columns)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(self.columns, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in body]
        return "\n".join(lines)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a flat JSON object")
    return StudyConfig.from_dict(data)


def mesh_size(delta, beta):
    """``h = 1 / ceil(delta^-beta)`` so the grid tiles the unit square."""
    return 1.0 / math.ceil(delta ** -beta - 1e-9)


def n_for_delta(cfg, delta):
    if cfg.path is Path.BALL_BASELINE:
        return None
    if cfg.path is Path.GROWING_N:
        m = int(cfg.n_multiple)
        return m * math.ceil(cfg.n_c * delta ** -cfg.n_p / m - 1e-9)
    return cfg.n


def _neighborhood(delta, n):
    if n is None:
        return NeighborhoodSpec(Strategy.BALL, delta)
    return NeighborhoodSpec(Strategy.REGULAR, delta, n)


def _check_size(delta, h):
    dof = round(1.0 / h) ** 2
    radius = math.ceil(delta / h - 1e-9) + 1
    if dof > MAX_DOF or radius > MAX_STENCIL_RADIUS:
        raise ValueError(
            f"delta={delta}, h={h} needs {dof} unknowns and a stencil radius of {radius} cells; "
            f"limits are {MAX_DOF} and {MAX_STENCIL_RADIUS}"
        )


def _rate(prev, cur):
    if prev is None or not prev > 0 or not cur > 0:
        return None
    return math.log2(prev / cur)


def _problem_rows(cfg):
    k = cfg.make_kernel()
    u0 = manufactured()

    def f(x1, x2):
        return -2.0 * (x2 + 1.0)

    rows, prev = [], None
    for i, delta in enumerate(cfg.delta_list):
        n = n_for_delta(cfg, delta)
        h = mesh_size(delta, cfg.beta)
        grid = build_grid(h, delta)
        stencil = build_stencil(grid, k, _neighborhood(delta, n), cfg.refine)
        try:
            sol = solve(stencil, grid, f, tol=cfg.cg_tol, constraint=u0)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"row k={i} (delta={delta}, n={n}): {exc}", exc.residual, exc.iterations
            ) from exc
        err = l2_error(sol, u0)
        rows.append((i, delta, n, grid.h, grid.dof, err, _rate(prev, err) if i else None))
        logger.info("k=%d delta=%g n=%s h=%g err=%.6e (%d cg iterations)",
                    i, delta, n, grid.h, err, sol.iterations)
        prev = err
    return PROBLEM_COLUMNS, rows


def _sigma_rows(cfg):
    k = cfg.make_kernel()
    closed = None
    if k.family is Family.CONSTANT:
        closed = sigma_regular_constant
    elif k.family is Family.SINGULAR and k.s == 1.0:
        closed = sigma_regular_peridynamic
    rows = []
    for n in cfg.n_list:
        s1, s2 = sigma_polygon(k, regular_polygon((0.0, 0.0), 1.0, n), max(cfg.quad_order, 24))
        rows.append((int(n), s1, s2, closed(n) if closed else None, c_n(n)))
    return ("n", "sigma1", "sigma2", "sigma_closed", "c_n"), rows


def _norm_rows(cfg):
    k = cfg.make_kernel()
    u = sine_product()
    rows = []
    for i, delta in enumerate(cfg.delta_list):
        n = cfg.n
        grid = build_grid(mesh_size(delta, cfg.beta), delta)
        e = energy_norm_sq(u, grid, k, _neighborhood(delta, n), cfg.refine)
        rows.append((i, delta, n, grid.h, grid.dof, e.polygon, e.truncated, e.ball, math.pi ** 2 / 2))
        logger.info("k=%d delta=%g energy=%.6f", i, delta, e.polygon)
    return ("k", "delta", "n", "h", "dof", "polygon", "truncated", "ball", "reference"), rows


def _kgamma_rows(cfg):
    k = cfg.make_kernel()
    rows, prev = [], None
    for i, delta in enumerate(cfg.delta_list):
        val = k_gamma_estimate(k, _neighborhood(delta, cfg.n), order=max(cfg.quad_order, 24))
        rows.append((i, delta, cfg.n, val, val / prev if prev else None))
        prev = val
    return ("k", "delta", "n", "k_gamma", "ratio"), rows


def run_study(cfg):
    """Run the configured path and return its report."""
    start = time.perf_counter()
    if cfg.path in (Path.BALL_BASELINE, Path.FIXED_N, Path.GROWING_N, Path.NORM_LIMIT):
        for delta in cfg.delta_list:
            _check_size(delta, mesh_size(delta, cfg.beta))
    runner = {
        Path.BALL_BASELINE: _problem_rows,
        Path.FIXED_N: _problem_rows,
        Path.GROWING_N: _problem_rows,
        Path.SIGMA_TABLE: _sigma_rows,
        Path.NORM_LIMIT: _norm_rows,
        Path.K_GAMMA: _kgamma_rows,
    }[cfg.path]
    columns, rows = runner(cfg)
    meta = {"config": cfg.to_dict(), "wall_time": time.perf_counter() - start}
    return StudyReport(tuple(columns), rows, meta)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("boolean values are not part of the report format")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(report, path):
    """Write the report with round-trip float formatting and LF endings."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(report.columns)
            for row in report.rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _parse(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_csv(path):
    """Read a report written by :func:`write_csv` (metadata is not stored)."""
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        columns = tuple(next(r))
        rows = [tuple(_parse(v) for v in row) for row in r]
    return StudyReport(columns, rows)
