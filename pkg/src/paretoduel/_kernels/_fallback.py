"""Pure-numpy implementations of the hot kernels.

These are the reference implementations; the compiled extension in
``_native.pyx`` mirrors them exactly and is preferred at import time when
available.
"""

import numpy as np

BACKEND = "fallback"

_SQRT5 = np.sqrt(5.0)


def matern52_cross(X, Z, lengthscales, variance):
    """Matern-5/2 ARD cross-covariance matrix between rows of X and Z."""
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    ls = np.asarray(lengthscales, dtype=np.float64)
    diff = (X[:, None, :] - Z[None, :, :]) / ls
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    t = _SQRT5 * np.sqrt(np.maximum(r2, 0.0))
    return variance * (1.0 + t + t * t / 3.0) * np.exp(-t)


def matern52_grad_x(X, Z, lengthscales, variance):
    """Gradient of matern52_cross w.r.t. X, shape (n, k, d).

    Uses d k / d delta_i = -(5 v / 3) (1 + t) e^{-t} delta_i / ls_i^2,
    which is smooth at coincident points.
    """
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    ls = np.asarray(lengthscales, dtype=np.float64)
    delta = X[:, None, :] - Z[None, :, :]
    scaled = delta / ls
    r2 = np.einsum("ijk,ijk->ij", scaled, scaled)
    t = _SQRT5 * np.sqrt(np.maximum(r2, 0.0))
    coef = -(5.0 * variance / 3.0) * (1.0 + t) * np.exp(-t)
    return coef[:, :, None] * delta / (ls * ls)


def hv_exact(points, reference):
    """Exact hypervolume (maximization) of the union of boxes [reference, p].

    Recursive dimension-sweep over exclusive contributions; points weakly
    dominated by another point are pruned first since they add no volume.
    """
    pts = np.asarray(points, dtype=np.float64) - np.asarray(
        reference, dtype=np.float64
    )
    if pts.size == 0:
        return 0.0
    pts = pts[np.all(pts > 0.0, axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    return _hv_recurse(_prune(pts))


def _prune(pts):
    """Drop points weakly dominated by another point (duplicates too)."""
    order = np.lexsort(pts.T[::-1])[::-1]
    pts = pts[order]
    keep = []
    for i in range(pts.shape[0]):
        p = pts[i]
        dominated = False
        for j in keep:
            if np.all(pts[j] >= p):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return pts[keep]


def _hv_recurse(pts):
    n, m = pts.shape
    if n == 0:
        return 0.0
    if n == 1:
        return float(np.prod(pts[0]))
    if m == 1:
        return float(pts[:, 0].max())
    if m == 2:
        return _hv_2d(pts)
    # exclusive-contribution sweep: points arrive sorted descending in the
    # first objective, so later points can only bite into earlier boxes
    total = 0.0
    for i in range(n):
        p = pts[i]
        rest = pts[i + 1 :]
        if rest.shape[0] == 0:
            total += float(np.prod(p))
            continue
        limited = np.minimum(rest, p)
        limited = limited[np.all(limited > 0.0, axis=1)]
        if limited.shape[0] > 0:
            limited = _prune(limited)
            total += float(np.prod(p)) - _hv_recurse(limited)
        else:
            total += float(np.prod(p))
    return total


def _hv_2d(pts):
    # sorted descending by first coordinate; nondominated => second ascending
    area = pts[0, 0] * pts[0, 1]
    for i in range(1, pts.shape[0]):
        area += pts[i, 0] * (pts[i, 1] - pts[i - 1, 1])
    return float(area)
