"""Partitions, label constraints, and the determinant-based likelihood.

A partition of N points is scored by the product over its clusters of
inverse Gram determinants raised to the temperature:

    log p(S) = -temperature * sum_clusters logdet K_cluster   (+ const)

so tight clusters (near-singular Gram blocks) get high mass and the
temperature sharpens or flattens the preference.  Labels enter as hard
constraints: two points labelled the same must share a cluster, two
points labelled differently must not.  Violations carry LOG_ZERO.

ClusterState is the mutable engine object: it holds one inverse-Gram
cache per cluster and supports detaching and attaching single points,
which is all the Gibbs sampler needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import NumericalDegeneracy
from .kernels import KernelParams, cross_vector, gram_matrix, self_kernel
from .linalg import (
    DEFAULT_REBUILD_INTERVAL,
    PDMatrixCache,
    cache_from_matrix,
    inverse_add_point,
    inverse_remove_point,
)

# Sentinel log-probability of an impossible outcome.
LOG_ZERO = float("-inf")

# Hard cap for exhaustive partition enumeration (Bell(12) is ~4.2e6).
MAX_ENUM_POINTS = 12


@dataclass(frozen=True)
class Partition:
    """Canonical set partition of range(n).

    The assignment must use cluster ids 0..M-1 in order of first
    occurrence (a restricted growth string), so equal partitions always
    compare and hash equal.  Use `canonicalize` to build one from an
    arbitrary labelling.
    """

    assignment: tuple[int, ...]
    num_clusters: int = field(init=False, compare=False)

    def __post_init__(self):
        assignment = tuple(int(a) for a in self.assignment)
        object.__setattr__(self, "assignment", assignment)
        next_id = 0
        for a in assignment:
            if a == next_id:
                next_id += 1
            elif not 0 <= a < next_id:
                raise ValueError(
                    "assignment is not in first-occurrence canonical form; "
                    "use canonicalize()"
                )
        object.__setattr__(self, "num_clusters", next_id)

    def __len__(self) -> int:
        return len(self.assignment)

    def clusters(self) -> list[list[int]]:
        """Member indices per cluster, in cluster id order."""
        out: list[list[int]] = [[] for _ in range(self.num_clusters)]
        for i, a in enumerate(self.assignment):
            out[a].append(i)
        return out


def canonicalize(raw: Sequence[int]) -> Partition:
    """Relabel an arbitrary cluster labelling into canonical form."""
    mapping: dict = {}
    out = []
    for label in raw:
        label = int(label)
        if label not in mapping:
            mapping[label] = len(mapping)
        out.append(mapping[label])
    return Partition(tuple(out))


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """All set partitions of range(n), in restricted-growth-string order.

    Guarded at MAX_ENUM_POINTS points since the count is the Bell
    number of n.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > MAX_ENUM_POINTS:
        raise ValueError(f"refusing to enumerate partitions of {n} > {MAX_ENUM_POINTS} points")
    if n == 0:
        yield Partition(())
        return
    prefix = [0] * n

    def grow(i: int, max_id: int) -> Iterator[Partition]:
        if i == n:
            yield Partition(tuple(prefix))
            return
        for c in range(max_id + 2):
            prefix[i] = c
            yield from grow(i + 1, max(max_id, c))

    prefix[0] = 0
    yield from grow(1, 0)


@dataclass(frozen=True, eq=False)
class LabelConstraints:
    """Must-link / cannot-link structure induced by point labels.

    `labeled_indices` are the anchored points; `group_ids` gives each
    anchor's label class (canonical ints).  Anchors of one class must
    share a cluster and anchors of different classes must be separated.
    """

    labeled_indices: tuple[int, ...]
    group_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.labeled_indices) != len(self.group_ids):
            raise ValueError("labeled_indices and group_ids must align")
        if len(set(self.labeled_indices)) != len(self.labeled_indices):
            raise ValueError("labeled_indices contains duplicates")

    @property
    def num_groups(self) -> int:
        return len(set(self.group_ids))

    def __len__(self) -> int:
        return len(self.labeled_indices)

    @staticmethod
    def none() -> "LabelConstraints":
        return LabelConstraints((), ())

    def co_assign_matrix(self) -> np.ndarray:
        """Boolean (Z, Z) matrix: True where two anchors must co-cluster."""
        g = np.asarray(self.group_ids)
        return g[:, None] == g[None, :]


def constraints_from_labels(labels: Sequence) -> LabelConstraints:
    """Build constraints from a per-point label sequence.

    None (or empty-string) entries mean the point is unconstrained.
    Distinct label values become distinct groups.
    """
    idx = []
    groups = []
    mapping: dict = {}
    for i, lab in enumerate(labels):
        if lab is None or (isinstance(lab, str) and lab == ""):
            continue
        if lab not in mapping:
            mapping[lab] = len(mapping)
        idx.append(i)
        groups.append(mapping[lab])
    return LabelConstraints(tuple(idx), tuple(groups))


def satisfies_constraints(partition: Partition, constraints: LabelConstraints) -> bool:
    """True iff same-group anchors co-cluster and different-group anchors do not."""
    if len(constraints) == 0:
        return True
    assignment = partition.assignment
    n = len(assignment)
    group_to_cluster: dict = {}
    cluster_to_group: dict = {}
    for i, g in zip(constraints.labeled_indices, constraints.group_ids):
        if not 0 <= i < n:
            raise ValueError(f"constraint index {i} out of range for {n} points")
        c = assignment[i]
        if group_to_cluster.setdefault(g, c) != c:
            return False
        if cluster_to_group.setdefault(c, g) != g:
            return False
    return True


class _Cluster:
    """One cluster: member indices, their point rows, and the Gram cache.

    `rows` and the cache stay index-aligned with `members` at all times.
    """

    __slots__ = ("members", "rows", "cache")

    def __init__(self, members: list[int], rows: np.ndarray, cache: PDMatrixCache):
        self.members = members
        self.rows = rows
        self.cache = cache


class ClusterState:
    """Mutable partition of a fixed point set, with per-cluster caches.

    Supports the two moves the samplers need, detach_point and
    attach_point, maintaining each cluster's inverse Gram matrix and
    log-determinant incrementally.  Caches are refactorized from
    scratch every `rebuild_interval` incremental updates (drift
    control) and whenever an update reports degeneracy, which is also
    counted on `degeneracy_count`.
    """

    def __init__(self, points: np.ndarray, rebuild_interval: int = DEFAULT_REBUILD_INTERVAL):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"points must be a non-empty 2-d array, got shape {pts.shape}")
        if rebuild_interval < 1:
            raise ValueError("rebuild_interval must be at least 1")
        self.points = pts
        self.clusters: list[_Cluster] = []
        self.cluster_of = np.full(pts.shape[0], -1, dtype=np.intp)
        self.rebuild_interval = int(rebuild_interval)
        self.degeneracy_count = 0

    @classmethod
    def from_assignment(
        cls,
        points: np.ndarray,
        assignment: Sequence[int],
        params: KernelParams,
        rebuild_interval: int = DEFAULT_REBUILD_INTERVAL,
    ) -> "ClusterState":
        state = cls(points, rebuild_interval)
        n = state.points.shape[0]
        if len(assignment) != n:
            raise ValueError(f"assignment length {len(assignment)} != {n} points")
        order: dict = {}
        for i, a in enumerate(assignment):
            order.setdefault(int(a), []).append(i)
        for ci, members in enumerate(order.values()):
            rows = state.points[members]
            cache = cache_from_matrix(gram_matrix(rows, None, params))
            state.clusters.append(_Cluster(list(members), rows, cache))
            state.cluster_of[members] = ci
        return state

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    @property
    def total_log_det(self) -> float:
        return sum(cl.cache.log_det for cl in self.clusters)

    def partition(self) -> Partition:
        if np.any(self.cluster_of < 0):
            raise ValueError("state has a detached point; attach it first")
        return canonicalize(self.cluster_of.tolist())

    def member_lists(self) -> list[list[int]]:
        return [list(cl.members) for cl in self.clusters]

    def _refactor(self, cl: _Cluster, params: KernelParams) -> None:
        cl.cache = cache_from_matrix(gram_matrix(cl.rows, None, params))

    def rebuild(self, params: KernelParams) -> None:
        """Refactorize every cluster cache, e.g. after a kernel change."""
        for cl in self.clusters:
            self._refactor(cl, params)

    def detach_point(self, x: int, params: KernelParams) -> None:
        """Remove point x from its cluster (dropping the cluster if singleton)."""
        ci = int(self.cluster_of[x])
        if ci < 0:
            raise ValueError(f"point {x} is already detached")
        cl = self.clusters[ci]
        if len(cl.members) == 1:
            last = len(self.clusters) - 1
            if ci != last:
                moved = self.clusters[last]
                self.clusters[ci] = moved
                self.cluster_of[moved.members] = ci
            self.clusters.pop()
        else:
            p = cl.members.index(x)
            cl.members.pop(p)
            cl.rows = np.delete(cl.rows, p, axis=0)
            try:
                cl.cache = inverse_remove_point(cl.cache, p)
                if cl.cache.updates_since_rebuild >= self.rebuild_interval:
                    self._refactor(cl, params)
            except NumericalDegeneracy:
                self.degeneracy_count += 1
                self._refactor(cl, params)
        self.cluster_of[x] = -1

    def attach_point(self, x: int, dest: int, params: KernelParams,
                     cross: np.ndarray | None = None) -> None:
        """Attach a detached point to cluster `dest`.

        `dest == num_clusters` opens a new singleton cluster.  `cross`
        may carry the precomputed kernel vector against the existing
        members (the sampler already has it from the weights pass).
        """
        if self.cluster_of[x] != -1:
            raise ValueError(f"point {x} is already assigned")
        xp = self.points[x]
        k_self = self_kernel(params)
        if dest == len(self.clusters):
            cache = PDMatrixCache(1, np.array([[1.0 / k_self]]), math.log(k_self))
            self.clusters.append(_Cluster([x], xp.reshape(1, -1).copy(), cache))
        elif 0 <= dest < len(self.clusters):
            cl = self.clusters[dest]
            if cross is None:
                cross = cross_vector(cl.rows, xp, params)
            cl.members.append(x)
            cl.rows = np.vstack([cl.rows, xp])
            try:
                cl.cache = inverse_add_point(cl.cache, cross, k_self)
                if cl.cache.updates_since_rebuild >= self.rebuild_interval:
                    self._refactor(cl, params)
            except NumericalDegeneracy:
                self.degeneracy_count += 1
                self._refactor(cl, params)
        else:
            raise ValueError(f"destination {dest} out of range")
        self.cluster_of[x] = dest


def log_likelihood(state: ClusterState, params: KernelParams,
                   constraints: LabelConstraints | None = None) -> float:
    """Unnormalized log-probability of the state's partition.

    Returns LOG_ZERO when the partition violates the constraints;
    otherwise -temperature times the summed cluster log-determinants.
    """
    if constraints is not None and len(constraints) > 0:
        if not satisfies_constraints(state.partition(), constraints):
            return LOG_ZERO
    return -params.temperature * state.total_log_det


def partition_log_det(points: np.ndarray, groups: Iterable[Sequence[int]],
                      params: KernelParams) -> float:
    """Summed cluster Gram log-determinants, computed fresh (no caches).

    Reference path used by the hyperparameter sampler and by tests; the
    incremental caches must agree with it to tight tolerance.  Grams
    driven numerically singular (long lengthscales can do this to large
    clusters) get the same one-shot jitter rescue the caches use, so a
    bold hyperparameter proposal is scored instead of crashing the run.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    total = 0.0
    for members in groups:
        rows = pts[list(members)]
        total += cache_from_matrix(gram_matrix(rows, None, params)).log_det
    return total
