"""Pure-numpy implementations of the hot numerical primitives.

This module is the fallback twin of the compiled extension `_core`.
Both expose the same six functions with identical semantics; which one
the package uses is decided in `_backend` at import time.  Keep the two
in sync: any behavioural change here must be mirrored in `_core.pyx`.

All matrix arguments are float64 and C-contiguous.  Inverses handled
here are of symmetric positive definite matrices and every routine
preserves exact (bitwise) symmetry of its output.
"""

import math

import numpy as np

from .errors import NotPositiveDefinite

BACKEND_NAME = "python"


def se_cross(members, x, inv_ls):
    """Unit-amplitude squared-exponential kernel of x against each row.

    inv_ls holds the elementwise reciprocals of the lengthscales.
    """
    diff = members - x
    return np.exp(-0.5 * ((diff * diff) @ inv_ls))


def se_gram(points, inv_ls):
    """Symmetric squared-exponential Gram matrix with an exact unit diagonal."""
    diff = points[:, None, :] - points[None, :, :]
    q = (diff * diff) @ inv_ls
    return np.exp(-0.5 * q)


def quad_form(inv, v):
    """v' inv v for a symmetric matrix."""
    if v.shape[0] == 0:
        return 0.0
    return float(v @ inv @ v)


def add_point_inverse(inv, cross, self_k):
    """Grow an inverse by one point appended in the last position.

    Returns (new_inverse, w) where w is the Schur complement of the
    existing block.  If w <= 0 the update is meaningless and
    (None, w) is returned so the caller can decide how to recover.
    """
    n = inv.shape[0]
    if n == 0:
        w = float(self_k)
        if w <= 0.0:
            return None, w
        return np.array([[1.0 / w]]), w
    u = inv @ cross
    w = float(self_k - cross @ u)
    if w <= 0.0:
        return None, w
    out = np.empty((n + 1, n + 1))
    out[:n, :n] = inv + np.outer(u, u) / w
    edge = -u / w
    out[:n, n] = edge
    out[n, :n] = edge
    out[n, n] = 1.0 / w
    return out, w


def remove_point_inverse(inv, index):
    """Shrink an inverse by deleting one point.

    Returns (new_inverse, s) where s is the removed diagonal entry of
    the old inverse (the reciprocal of the removed point's Schur
    complement).  If s <= 0 returns (None, s).
    """
    n = inv.shape[0]
    s = float(inv[index, index])
    if s <= 0.0:
        return None, s
    keep = np.delete(np.arange(n), index)
    v = inv[keep, index]
    sub = inv[np.ix_(keep, keep)]
    return sub - np.outer(v, v) / s, s


def chol_logdet_inv(m):
    """Log-determinant and inverse of a symmetric positive definite matrix.

    Left-looking Cholesky on the lower triangle; raises
    NotPositiveDefinite with the offending pivot index if factorization
    breaks down.  Returns (logdet, inverse) with the inverse exactly
    symmetric.
    """
    n = m.shape[0]
    if n == 0:
        return 0.0, np.zeros((0, 0))
    L = np.tril(m)
    logdet = 0.0
    for j in range(n):
        pivot = L[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > 0.0:
            raise NotPositiveDefinite(j, pivot)
        d = math.sqrt(pivot)
        L[j, j] = d
        logdet += math.log(d)
        if j + 1 < n:
            L[j + 1 :, j] = (L[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / d
    x = np.linalg.inv(L)
    inv = x.T @ x
    inv = 0.5 * (inv + inv.T)
    return 2.0 * logdet, inv
