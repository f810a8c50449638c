"""Pure numpy stencil kernels (fallback for the compiled extension).

Both kernels work on dense 2D cell arrays and a translation-invariant
stencil given as integer offsets with weights.
"""
import numpy as np


def stencil_apply(padded, offsets, weights, pad, out):
    """Write ``out[i, j] = sum_k w_k * (U[c] - U[c + offset_k])`` in place.

    ``padded`` holds the cell values with ``pad`` extra cells on every side;
    ``out`` covers the interior block only.
    """
    n0, n1 = out.shape
    if len(offsets) != len(weights):
        raise ValueError("offsets and weights differ in length")
    if len(offsets) and np.abs(offsets).max() > pad:
        raise ValueError("stencil reaches beyond the padding")
    if padded.shape != (n0 + 2 * pad, n1 + 2 * pad):
        raise ValueError("padded array does not match output shape")
    centre = padded[pad:pad + n0, pad:pad + n1]
    out[...] = 0.0
    for (di, dj), w in zip(offsets, weights):
        shifted = padded[pad + di:pad + di + n0, pad + dj:pad + dj + n1]
        out += w * (centre - shifted)
    return out


def stencil_energy(values, offsets, weights):
    """Return ``sum_k w_k * sum_i (U[i + offset_k] - U[i])**2``.

    Pairs leaving the array are skipped, so callers zero-pad as needed.
    """
    if len(offsets) != len(weights):
        raise ValueError("offsets and weights differ in length")
    n0, n1 = values.shape
    total = 0.0
    for (di, dj), w in zip(offsets, weights):
        i0, i1 = max(0, -di), min(n0, n0 - di)
        j0, j1 = max(0, -dj), min(n1, n1 - dj)
        diff = values[i0 + di:i1 + di, j0 + dj:j1 + dj] - values[i0:i1, j0:j1]
        total += w * float(np.sum(diff * diff))
    return total
