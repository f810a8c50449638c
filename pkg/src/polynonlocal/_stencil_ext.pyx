"""Compiled convolution-stencil kernels.

Mirrors :mod:`polynonlocal._stencil_py`; see that module for the contract.
"""

def stencil_apply(const double[:, ::1] padded,
                  const Py_ssize_t[:, ::1] offsets,
                  const double[::1] weights,
                  Py_ssize_t pad,
                  double[:, ::1] out):
    cdef Py_ssize_t n0 = out.shape[0]
    cdef Py_ssize_t n1 = out.shape[1]
    cdef Py_ssize_t nk = weights.shape[0]
    cdef Py_ssize_t i, j, k, ii, si, sj
    cdef double w
    if offsets.shape[0] != nk:
        raise ValueError("offsets and weights differ in length")
    for k in range(nk):
        if (abs(offsets[k, 0]) > pad) or (abs(offsets[k, 1]) > pad):
            raise ValueError("stencil reaches beyond the padding")
    if padded.shape[0] != n0 + 2 * pad or padded.shape[1] != n1 + 2 * pad:
        raise ValueError("padded array does not match output shape")
    # offset loop inside each row keeps the inner j loop contiguous and
    # accumulates in the same order as the numpy backend
    with nogil:
        for i in range(n0):
            ii = i + pad
            for j in range(n1):
                out[i, j] = 0.0
            for k in range(nk):
                w = weights[k]
                si = ii + offsets[k, 0]
                sj = pad + offsets[k, 1]
                for j in range(n1):
                    out[i, j] = out[i, j] + w * (padded[ii, j + pad] - padded[si, j + sj])


def stencil_energy(const double[:, ::1] values,
                   const Py_ssize_t[:, ::1] offsets,
                   const double[::1] weights):
    cdef Py_ssize_t n0 = values.shape[0]
    cdef Py_ssize_t n1 = values.shape[1]
    cdef Py_ssize_t nk = weights.shape[0]
    cdef Py_ssize_t i, j, k, di, dj, i0, i1, j0, j1
    cdef double total = 0.0
    cdef double partial, diff
    if offsets.shape[0] != nk:
        raise ValueError("offsets and weights differ in length")
    with nogil:
        for k in range(nk):
            di = offsets[k, 0]
            dj = offsets[k, 1]
            i0 = 0 if di >= 0 else -di
            i1 = n0 - di if di >= 0 else n0
            j0 = 0 if dj >= 0 else -dj
            j1 = n1 - dj if dj >= 0 else n1
            partial = 0.0
            for i in range(i0, i1):
                for j in range(j0, j1):
                    diff = values[i + di, j + dj] - values[i, j]
                    partial = partial + diff * diff
            total = total + weights[k] * partial
    return total
