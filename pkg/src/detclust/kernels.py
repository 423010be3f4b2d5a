"""Kernel families and Gram-matrix construction.

Two positive definite kernels drive the clustering model:

* squared exponential with one lengthscale per input dimension,
  k(x, y) = scale * exp(-0.5 * sum_d (x_d - y_d)^2 / l_d)
* delta, k(x, y) = scale * value if x == y exactly else 0, which makes
  every partition equally likely and is mainly useful for testing the
  samplers against known uniform distributions.

`temperature` rides along in KernelParams because the samplers treat
(kernel hyperparameters, temperature) as one block; it never enters the
kernel value itself.  `scale` is a fixed global amplitude, kept at 1.0
everywhere except in tests that exercise scale invariance; it is not a
learnable parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from . import _backend


class KernelFamily(str, Enum):
    SQUARED_EXPONENTIAL = "se"
    DELTA = "delta"


@dataclass(frozen=True)
class KernelParams:
    """Immutable kernel configuration, hashable so it can key caches."""

    family: KernelFamily
    lengthscales: tuple[float, ...] | None = None
    delta_value: float | None = None
    temperature: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        family = KernelFamily(self.family)
        object.__setattr__(self, "family", family)
        if family is KernelFamily.SQUARED_EXPONENTIAL:
            if self.lengthscales is None:
                raise ValueError("squared exponential kernel needs lengthscales")
            ls = tuple(float(v) for v in np.atleast_1d(np.asarray(self.lengthscales)))
            if len(ls) == 0:
                raise ValueError("lengthscales must be non-empty")
            if any(not math.isfinite(v) or v <= 0.0 for v in ls):
                raise ValueError(f"lengthscales must be positive and finite, got {ls}")
            object.__setattr__(self, "lengthscales", ls)
            if self.delta_value is not None:
                raise ValueError("delta_value is only valid for the delta kernel")
        else:
            if self.delta_value is None:
                raise ValueError("delta kernel needs delta_value")
            dv = float(self.delta_value)
            if not math.isfinite(dv) or dv <= 0.0:
                raise ValueError(f"delta_value must be positive and finite, got {dv}")
            object.__setattr__(self, "delta_value", dv)
            if self.lengthscales is not None:
                raise ValueError("lengthscales are only valid for the SE kernel")
        for name in ("temperature", "scale"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be positive and finite, got {v}")
            object.__setattr__(self, name, v)

    @property
    def ndim(self) -> int | None:
        """Expected input dimension, or None when the kernel does not fix one."""
        if self.family is KernelFamily.SQUARED_EXPONENTIAL:
            return len(self.lengthscales)
        return None

    @staticmethod
    def squared_exponential(lengthscales, temperature=1.0, scale=1.0) -> "KernelParams":
        return KernelParams(
            KernelFamily.SQUARED_EXPONENTIAL,
            lengthscales=tuple(np.atleast_1d(np.asarray(lengthscales, dtype=float))),
            temperature=temperature,
            scale=scale,
        )

    @staticmethod
    def delta(value, temperature=1.0, scale=1.0) -> "KernelParams":
        return KernelParams(
            KernelFamily.DELTA,
            delta_value=value,
            temperature=temperature,
            scale=scale,
        )


@lru_cache(maxsize=128)
def _inv_lengthscales(lengthscales: tuple[float, ...]) -> np.ndarray:
    out = 1.0 / np.asarray(lengthscales, dtype=np.float64)
    out.flags.writeable = False
    return out


def _as_points(a, params: KernelParams, name: str) -> np.ndarray:
    pts = np.ascontiguousarray(a, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if pts.size else pts.reshape(0, 1)
    if pts.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of points, got shape {pts.shape}")
    if params.ndim is not None and pts.shape[0] and pts.shape[1] != params.ndim:
        raise ValueError(
            f"{name} has dimension {pts.shape[1]} but the kernel expects {params.ndim}"
        )
    return pts


def self_kernel(params: KernelParams) -> float:
    """k(x, x), which is independent of x for both families."""
    if params.family is KernelFamily.SQUARED_EXPONENTIAL:
        return params.scale
    return params.scale * params.delta_value


def kernel_eval(x, y, params: KernelParams) -> float:
    """Kernel value for a single pair of points."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape:
        raise ValueError(f"point dimensions differ: {xv.shape[0]} vs {yv.shape[0]}")
    if params.family is KernelFamily.SQUARED_EXPONENTIAL:
        if xv.shape[0] != params.ndim:
            raise ValueError(
                f"points have dimension {xv.shape[0]} but the kernel expects {params.ndim}"
            )
        diff = xv - yv
        q = float((diff * diff) @ _inv_lengthscales(params.lengthscales))
        return params.scale * math.exp(-0.5 * q)
    if np.array_equal(xv, yv):
        return params.scale * params.delta_value
    return 0.0


def cross_vector(members: np.ndarray, x: np.ndarray, params: KernelParams) -> np.ndarray:
    """Kernel of one point against each row of `members`.

    Hot path for the samplers: `members` must already be a C-contiguous
    float64 matrix and `x` a matching 1-d vector.
    """
    if members.shape[0] == 0:
        return np.empty(0)
    if params.family is KernelFamily.SQUARED_EXPONENTIAL:
        out = _backend.core.se_cross(members, x, _inv_lengthscales(params.lengthscales))
        if params.scale != 1.0:
            out *= params.scale
        return out
    hits = np.all(members == x, axis=1)
    return np.where(hits, params.scale * params.delta_value, 0.0)


def gram_matrix(a, b, params: KernelParams) -> np.ndarray:
    """Gram matrix between two point sets; pass b=None for the symmetric case.

    The symmetric squared-exponential Gram has an exactly unit diagonal
    (times scale) and is exactly symmetric, which the downstream
    Cholesky and incremental-inverse code relies on.
    """
    pa = _as_points(a, params, "a")
    if b is None:
        if params.family is KernelFamily.SQUARED_EXPONENTIAL:
            out = _backend.core.se_gram(pa, _inv_lengthscales(params.lengthscales))
            if params.scale != 1.0:
                out *= params.scale
            return out
        eq = np.all(pa[:, None, :] == pa[None, :, :], axis=-1)
        return np.where(eq, params.scale * params.delta_value, 0.0)
    pb = _as_points(b, params, "b")
    if pa.shape[1] != pb.shape[1] and pa.shape[0] and pb.shape[0]:
        raise ValueError(f"point dimensions differ: {pa.shape[1]} vs {pb.shape[1]}")
    if params.family is KernelFamily.SQUARED_EXPONENTIAL:
        inv_ls = _inv_lengthscales(params.lengthscales)
        diff = pa[:, None, :] - pb[None, :, :]
        q = (diff * diff) @ inv_ls
        return params.scale * np.exp(-0.5 * q)
    eq = np.all(pa[:, None, :] == pb[None, :, :], axis=-1)
    return np.where(eq, params.scale * params.delta_value, 0.0)
