"""Time the compiled and numpy stencil kernels on the acceptance-size stencils.

Run with ``python3 benchmarks/bench_backends.py``.
"""
import argparse
import timeit

import numpy as np

from polynonlocal import NeighborhoodSpec, build_grid, build_stencil, make_kernel
from polynonlocal._backend import BACKENDS


def bench(delta, h, repeat):
    grid = build_grid(h, delta)
    st = build_stencil(grid, make_kernel("constant"), NeighborhoodSpec("ball", delta))
    pad = st.radius
    rng = np.random.default_rng(0)
    padded = np.zeros((grid.n + 2 * pad,) * 2)
    padded[pad:-pad, pad:-pad] = rng.standard_normal((grid.n, grid.n))
    out = np.empty((grid.n, grid.n))
    results = {}
    for name, mod in sorted(BACKENDS.items()):
        t_apply = min(timeit.repeat(
            lambda: mod.stencil_apply(padded, st.offsets, st.weights, pad, out), number=1, repeat=repeat))
        t_energy = min(timeit.repeat(
            lambda: mod.stencil_energy(padded, st.offsets, st.weights), number=1, repeat=repeat))
        results[name] = (t_apply, t_energy, out.copy())
    return grid, st, results


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'delta':>8} {'n':>5} {'offsets':>8} {'backend':>8} {'apply [ms]':>11} {'energy [ms]':>12}")
    for delta, n in ((1 / 8, 23), (1 / 16, 64), (1 / 32, 182)):
        grid, st, res = bench(delta, 1.0 / n, args.repeat)
        for name, (ta, te, _) in res.items():
            print(f"{delta:8.5f} {n:5d} {len(st.offsets):8d} {name:>8} {1e3 * ta:11.3f} {1e3 * te:12.3f}")
        if len(res) == 2:
            a, b = (r[2] for r in res.values())
            speed = res["python"][0] / res["cython"][0]
            print(f"{'':>8} max |diff| = {np.abs(a - b).max():.2e}, apply speedup x{speed:.1f}")


if __name__ == "__main__":
    main()
