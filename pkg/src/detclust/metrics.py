"""Clustering agreement metrics, the k-means baseline, and trace summaries.

ARI is the pair-counting adjusted Rand index (chance-corrected to 0,
maximum 1, negative values possible).  NMI normalizes mutual
information by the arithmetic mean of the two marginal entropies,
computed with natural logs and the 0*log(0) = 0 convention; the
variant name is exported so result files can record it.  Both metrics
accept an index subset, which is how held-out test points are scored.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .partitions import Partition, canonicalize

NMI_VARIANT = "arithmetic-mean-entropy"

KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class ContingencyTable:
    """Joint cluster-membership counts of two partitions of one point set."""

    counts: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int

    @classmethod
    def from_partitions(cls, p: Partition, q: Partition,
                        indices=None) -> "ContingencyTable":
        a, b = _aligned_labels(p, q, indices)
        _, ia = np.unique(a, return_inverse=True)
        _, ib = np.unique(b, return_inverse=True)
        counts = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
        np.add.at(counts, (ia, ib), 1)
        return cls(counts, counts.sum(axis=1), counts.sum(axis=0), int(counts.sum()))


def _aligned_labels(p: Partition, q: Partition, indices):
    a = np.asarray(p.assignment, dtype=np.int64)
    b = np.asarray(q.assignment, dtype=np.int64)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"partition sizes differ: {a.shape[0]} vs {b.shape[0]}")
    if indices is not None:
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= a.shape[0]):
            raise ValueError("index subset out of range")
        a = a[idx]
        b = b[idx]
    if a.shape[0] < 2:
        raise ValueError("agreement metrics need at least 2 points")
    return a, b


def _pairs(x: np.ndarray) -> float:
    x = x.astype(np.float64)
    return float((x * (x - 1.0)).sum() / 2.0)


def adjusted_rand_index(p: Partition, q: Partition, indices=None) -> float:
    """Hubert-Arabie adjusted Rand index, optionally on an index subset."""
    t = ContingencyTable.from_partitions(p, q, indices)
    index = _pairs(t.counts.ravel())
    sum_a = _pairs(t.row_marginals)
    sum_b = _pairs(t.col_marginals)
    total = t.n * (t.n - 1) / 2.0
    expected = sum_a * sum_b / total
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # both partitions trivial (all singletons or all one cluster),
        # which only happens when they are identical
        return 1.0
    return (index - expected) / (max_index - expected)


def normalized_mutual_information(p: Partition, q: Partition, indices=None) -> float:
    """Mutual information over the arithmetic mean of entropies, in [0, 1]."""
    t = ContingencyTable.from_partitions(p, q, indices)
    n = float(t.n)
    pr = t.row_marginals / n
    pc = t.col_marginals / n
    h_r = -sum(v * math.log(v) for v in pr if v > 0)
    h_c = -sum(v * math.log(v) for v in pc if v > 0)
    denom = 0.5 * (h_r + h_c)
    if denom == 0.0:
        # both single-cluster: identical partitions by construction
        return 1.0
    mi = 0.0
    rows, cols = np.nonzero(t.counts)
    for i, j in zip(rows, cols):
        pij = t.counts[i, j] / n
        mi += pij * math.log(pij / (pr[i] * pc[j]))
    return min(1.0, max(0.0, mi / denom))


def _kmeanspp_centers(points: np.ndarray, k: int, rng) -> np.ndarray:
    """Seed centers by distance-squared weighted sampling."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[c:] = points[rng.integers(n, size=k - c)]
            break
        probs = d2 / total
        centers[c] = points[rng.choice(n, p=probs)]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int):
    """Lloyd iterations; returns (labels, per-iteration objective values)."""
    k = centers.shape[0]
    labels = np.full(points.shape[0], -1, dtype=np.int64)
    history = []
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        for c in range(k):
            hit = new_labels == c
            if hit.any():
                centers[c] = points[hit].mean(axis=0)
            else:
                # reseed an empty cluster at the point farthest from its
                # current centroid
                far = int(d2[np.arange(len(new_labels)), new_labels].argmax())
                centers[c] = points[far]
                new_labels[far] = c
        history.append(float(((points - centers[new_labels]) ** 2).sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, history


def kmeans(points, k: int, seed: int = 0) -> Partition:
    """Lloyd's algorithm from a distance-weighted seeding; canonical result."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"points must be 2-d, got shape {pts.shape}")
    if not 1 <= k <= pts.shape[0]:
        raise ValueError(f"k={k} must be in [1, {pts.shape[0]}]")
    rng = np.random.default_rng(seed)
    centers = _kmeanspp_centers(pts, k, rng)
    labels, _ = _lloyd(pts, centers, KMEANS_MAX_ITER)
    return canonicalize(labels.tolist())


@dataclass(frozen=True)
class PosteriorSummary:
    """Digest of a posterior trace for reporting and plotting."""

    cluster_count_histogram: dict[int, float]
    co_occurrence: np.ndarray
    mean_ari: float | None = None
    mean_nmi: float | None = None


def summarize(trace, truth: Partition | None = None,
              test_indices=None) -> PosteriorSummary:
    """Histogram of cluster counts, pairwise co-clustering frequencies,
    and (when truth is given) per-sample ARI/NMI means over test_indices.
    """
    samples = trace.samples
    if not samples:
        raise ValueError("cannot summarize an empty trace")
    hist_counts = Counter(s.partition.num_clusters for s in samples)
    total = len(samples)
    histogram = {k: v / total for k, v in sorted(hist_counts.items())}
    assign = np.asarray([s.partition.assignment for s in samples], dtype=np.int64)
    n = assign.shape[1]
    co = np.empty((n, n))
    for i in range(n):
        co[i] = (assign == assign[:, i][:, None]).mean(axis=0)
    mean_ari = mean_nmi = None
    if truth is not None:
        aris = [adjusted_rand_index(s.partition, truth, test_indices) for s in samples]
        nmis = [normalized_mutual_information(s.partition, truth, test_indices)
                for s in samples]
        mean_ari = float(np.mean(aris))
        mean_nmi = float(np.mean(nmis))
    return PosteriorSummary(histogram, co, mean_ari, mean_nmi)
