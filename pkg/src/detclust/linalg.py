"""Positive definite matrix caches with incremental inverse updates.

Cluster likelihoods need log-determinants of kernel Gram matrices, and
the samplers grow and shrink clusters one point at a time.  Instead of
refactorizing after every move, each cluster keeps a PDMatrixCache
holding the current inverse and log-determinant; rank-one identities
update both in O(n^2).  Floating point drift is bounded by rebuilding
from scratch after a configurable number of incremental updates.

All determinants are handled in log space throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import NotPositiveDefinite, NumericalDegeneracy

# Schur complements at or below this are treated as numerically zero.
DEGENERACY_FLOOR = 1e-12
# Relative diagonal jitter used for one retry when a Cholesky fails.
JITTER_FACTOR = 1e-8
# Incremental updates allowed before a cache is refactorized.
DEFAULT_REBUILD_INTERVAL = 64


@dataclass(frozen=True)
class PDMatrixCache:
    """Inverse and log-determinant of one symmetric positive definite matrix.

    Treated as a value: updates return a new cache and never mutate the
    stored inverse.  `updates_since_rebuild` counts incremental steps
    since the inverse was last computed from scratch.
    """

    size: int
    inverse: np.ndarray
    log_det: float
    updates_since_rebuild: int = 0


def empty_cache() -> PDMatrixCache:
    """Cache of the empty matrix: log-determinant zero by convention."""
    return PDMatrixCache(0, np.zeros((0, 0)), 0.0)


def _as_square(matrix, name="matrix") -> np.ndarray:
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def cholesky_logdet(matrix) -> tuple[float, np.ndarray]:
    """Log-determinant and inverse via Cholesky.

    The input must be symmetric; only its lower triangle is read.
    Raises NotPositiveDefinite (carrying the pivot index) when the
    matrix is not positive definite.
    """
    m = _as_square(matrix)
    return _backend.core.chol_logdet_inv(m)


def cache_from_matrix(matrix, jitter=JITTER_FACTOR) -> PDMatrixCache:
    """Factorize a Gram matrix into a fresh cache.

    On a Cholesky breakdown, retries once with `jitter * mean(diagonal)`
    added to the diagonal; if that also fails the NotPositiveDefinite
    from the retry propagates.
    """
    m = _as_square(matrix)
    try:
        log_det, inv = _backend.core.chol_logdet_inv(m)
    except NotPositiveDefinite:
        if jitter is None or m.shape[0] == 0:
            raise
        bump = jitter * float(np.mean(np.diag(m)))
        log_det, inv = _backend.core.chol_logdet_inv(m + bump * np.eye(m.shape[0]))
    return PDMatrixCache(m.shape[0], inv, log_det)


def block_det(a, b, c) -> float:
    """Determinant of the block matrix [[A, C'], [C, B]].

    Uses det(A) * det(B - C A^{-1} C'); A must be symmetric positive
    definite, B square, and C of shape (rows of B, rows of A).
    """
    am = _as_square(a, "a")
    bm = _as_square(b, "b")
    cm = np.ascontiguousarray(c, dtype=np.float64)
    if cm.ndim == 0:
        cm = cm.reshape(1, 1)
    if cm.ndim == 1:
        cm = cm.reshape(bm.shape[0], -1) if bm.shape[0] == 1 else cm.reshape(-1, am.shape[0])
    if cm.shape != (bm.shape[0], am.shape[0]):
        raise ValueError(
            f"off-diagonal block has shape {cm.shape}, expected {(bm.shape[0], am.shape[0])}"
        )
    log_det_a, inv_a = cholesky_logdet(am)
    schur = bm - cm @ inv_a @ cm.T
    return math.exp(log_det_a) * float(np.linalg.det(schur))


def schur_complement(cache: PDMatrixCache, cross: np.ndarray, self_k: float) -> float:
    """k(x,x) - cross' inverse cross: the one-point extension complement."""
    if cache.size == 0:
        return float(self_k)
    return float(self_k) - _backend.core.quad_form(cache.inverse, cross)


def inverse_add_point(cache: PDMatrixCache, cross: np.ndarray, self_k: float) -> PDMatrixCache:
    """Extend a cache by one point appended last.

    `cross` holds the kernel of the new point against the existing
    members, `self_k` its self-kernel.  Raises NumericalDegeneracy when
    the Schur complement falls at or below DEGENERACY_FLOOR; callers
    should then rebuild the affected matrix from scratch.
    """
    if cross.shape[0] != cache.size:
        raise ValueError(f"cross vector has length {cross.shape[0]}, expected {cache.size}")
    inv, w = _backend.core.add_point_inverse(cache.inverse, cross, float(self_k))
    if inv is None or w <= DEGENERACY_FLOOR:
        raise NumericalDegeneracy(w, "one-point extension")
    return PDMatrixCache(cache.size + 1, inv, cache.log_det + math.log(w),
                         cache.updates_since_rebuild + 1)


def inverse_remove_point(cache: PDMatrixCache, index: int) -> PDMatrixCache:
    """Shrink a cache by deleting the point at `index`.

    The removed point's Schur complement against the rest is the
    reciprocal of the inverse's diagonal entry s, so the log-determinant
    drops by -log(s).  Raises NumericalDegeneracy when s is not
    positive (a sign the cached inverse has drifted badly).
    """
    if not 0 <= index < cache.size:
        raise ValueError(f"index {index} out of range for size {cache.size}")
    inv, s = _backend.core.remove_point_inverse(cache.inverse, index)
    if inv is None:
        raise NumericalDegeneracy(s, "one-point removal")
    return PDMatrixCache(cache.size - 1, inv, cache.log_det + math.log(s),
                         cache.updates_since_rebuild + 1)
