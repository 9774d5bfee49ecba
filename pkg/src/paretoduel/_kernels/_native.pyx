# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the pure-numpy kernels in ``_fallback``.

Same algorithms, same results up to floating-point summation order.
"""

from libc.math cimport exp, sqrt
from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "native"

cdef double SQRT5 = sqrt(5.0)


def matern52_cross(X, Z, lengthscales, variance):
    """Matern-5/2 ARD cross-covariance matrix between rows of X and Z."""
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] z = np.ascontiguousarray(Z, dtype=np.float64)
    cdef const double[::1] ls = np.ascontiguousarray(lengthscales, dtype=np.float64)
    cdef double var = variance
    cdef Py_ssize_t n = x.shape[0], k = z.shape[0], d = x.shape[1]
    out_arr = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, c
    cdef double r2, dx, t
    for i in range(n):
        for j in range(k):
            r2 = 0.0
            for c in range(d):
                dx = (x[i, c] - z[j, c]) / ls[c]
                r2 += dx * dx
            t = SQRT5 * sqrt(r2)
            out[i, j] = var * (1.0 + t + t * t / 3.0) * exp(-t)
    return out_arr


def matern52_grad_x(X, Z, lengthscales, variance):
    """Gradient of matern52_cross w.r.t. X, shape (n, k, d)."""
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[:, ::1] z = np.ascontiguousarray(Z, dtype=np.float64)
    cdef const double[::1] ls = np.ascontiguousarray(lengthscales, dtype=np.float64)
    cdef double var = variance
    cdef Py_ssize_t n = x.shape[0], k = z.shape[0], d = x.shape[1]
    out_arr = np.empty((n, k, d), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, c
    cdef double r2, dx, t, coef
    for i in range(n):
        for j in range(k):
            r2 = 0.0
            for c in range(d):
                dx = (x[i, c] - z[j, c]) / ls[c]
                r2 += dx * dx
            t = SQRT5 * sqrt(r2)
            coef = -(5.0 * var / 3.0) * (1.0 + t) * exp(-t)
            for c in range(d):
                out[i, j, c] = coef * (x[i, c] - z[j, c]) / (ls[c] * ls[c])
    return out_arr


def hv_exact(points, reference):
    """Exact hypervolume (maximization) of the union of boxes [reference, p]."""
    pts = np.asarray(points, dtype=np.float64) - np.asarray(
        reference, dtype=np.float64
    )
    if pts.size == 0:
        return 0.0
    pts = pts[np.all(pts > 0.0, axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    order = np.lexsort(pts.T[::-1])[::-1]
    pts = np.ascontiguousarray(pts[order])
    cdef double[:, ::1] view = pts
    cdef int n = view.shape[0], m = view.shape[1]
    cdef double* buf = <double*> malloc(n * m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef int i, j, kept
    cdef double vol
    try:
        kept = _prune_inplace(&view[0, 0], buf, n, m)
        for i in range(kept):
            for j in range(m):
                view[i, j] = buf[i * m + j]
        vol = _hv_rec(&view[0, 0], kept, m)
    finally:
        free(buf)
    return vol


cdef int _prune_inplace(double* pts, double* out, int n, int m) noexcept nogil:
    """Copy rows of pts not weakly dominated by an earlier kept row into out."""
    cdef int i, j, c, kept = 0
    cdef bint dom
    for i in range(n):
        dom = False
        for j in range(kept):
            dom = True
            for c in range(m):
                if out[j * m + c] < pts[i * m + c]:
                    dom = False
                    break
            if dom:
                break
        if not dom:
            for c in range(m):
                out[kept * m + c] = pts[i * m + c]
            kept += 1
    return kept


cdef double _hv_rec(double* pts, int n, int m) noexcept nogil:
    cdef int i, j, c, cnt, kept
    cdef double total, prod, best
    cdef double* limited
    cdef double* pruned
    cdef bint pos
    if n == 0:
        return 0.0
    if n == 1:
        prod = 1.0
        for c in range(m):
            prod *= pts[c]
        return prod
    if m == 1:
        best = pts[0]
        for i in range(1, n):
            if pts[i] > best:
                best = pts[i]
        return best
    if m == 2:
        total = pts[0] * pts[1]
        for i in range(1, n):
            total += pts[i * 2] * (pts[i * 2 + 1] - pts[(i - 1) * 2 + 1])
        return total
    total = 0.0
    # scratch for the limited set and its pruned copy; sizes here are tiny
    # (n <= a few hundred), so allocation failure is not a practical path
    limited = <double*> malloc(2 * n * m * sizeof(double))
    if limited == NULL:
        return -1.0
    pruned = limited + n * m
    for i in range(n):
        prod = 1.0
        for c in range(m):
            prod *= pts[i * m + c]
        cnt = 0
        for j in range(i + 1, n):
            pos = True
            for c in range(m):
                if pts[j * m + c] < pts[i * m + c]:
                    limited[cnt * m + c] = pts[j * m + c]
                else:
                    limited[cnt * m + c] = pts[i * m + c]
                if limited[cnt * m + c] <= 0.0:
                    pos = False
            if pos:
                cnt += 1
        if cnt > 0:
            kept = _prune_inplace(limited, pruned, cnt, m)
            total += prod - _hv_rec(pruned, kept, m)
        else:
            total += prod
    free(limited)
    return total
