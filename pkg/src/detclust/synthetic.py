"""Synthetic benchmark generators.

Three scenarios:

* OverlapPair: two labelled 2-D Gaussian clusters plus a handful of
  unlabeled points dropped near the shared boundary, deliberately not
  always closer to their own cluster's mean.  Centroid methods split
  each boundary clump down the middle; a method that scores whole-group
  cohesion can keep the clumps intact.
* MultiModal: two ground-truth clusters built from Gaussian mixtures,
  2 components and 3 components respectively, where one component of
  the second cluster is entirely unlabeled and a few points of every
  observed component are held out as additional test points.
* Blobs: plain labelled Gaussian components, one truth cluster each.

The unlabeled points ARE the test set: consumers score predictions on
exactly the rows with an empty label.  All shape parameters the
scenarios need beyond the per-component means/covariances/counts are
module constants documented below, chosen so the intended failure
modes actually occur; none are fitted to any external numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .data import DataSet
from .partitions import Partition, canonicalize

# Stream id so dataset draws never share state with the samplers.
DATA_STREAM = 0

# OverlapPair boundary clumps, in units of the inter-mean axis: each
# cluster's clump sits this far back toward its own side ...
BOUNDARY_OWN_SIDE_BIAS = 0.05
# ... offset perpendicular to the axis by this fraction (sign alternates
# per cluster; large enough that the two clumps stay mutually distant
# relative to their distance from their own cluster core) ...
BOUNDARY_PERP_OFFSET = 0.50
# ... with isotropic spread this fraction of the inter-mean distance.
# Tight enough that a clump coheres, wide enough to straddle the
# midline a centroid split would draw.
BOUNDARY_SPREAD = 0.08

# MultiModal defaults: truth cluster 0 = two left-column components,
# truth cluster 1 = two right-column components plus one top-middle
# component that is entirely unlabeled.  The vertical within-cluster
# spread exceeds the horizontal between-cluster gap, so an unsupervised
# 2-way split runs horizontally, across the true grouping.
MULTIMODAL_MEANS = ((0.0, 0.0), (0.0, 6.0), (4.0, 0.0), (4.0, 6.0), (2.5, 9.0))
MULTIMODAL_TRUTH = (0, 0, 1, 1, 1)
MULTIMODAL_SIGMA = 0.8
MULTIMODAL_COUNT = 12
MULTIMODAL_HELD_OUT = 3

OVERLAP_MEANS = ((-2.0, 0.0), (2.0, 0.0))
OVERLAP_SIGMA = 1.0
OVERLAP_COUNT = 30
OVERLAP_BOUNDARY_COUNT = 10


class Scenario(str, Enum):
    OVERLAP_PAIR = "overlap"
    MULTI_MODAL = "multimodal"
    BLOBS = "blobs"


@dataclass(frozen=True)
class SyntheticSpec:
    """Full recipe for one synthetic dataset.

    One entry per mixture component: its mean, covariance, point count,
    ground-truth cluster id, and how many of its points are left
    unlabeled (test points).  `boundary_count` extra unlabeled points
    are generated for the OverlapPair scenario only, split between the
    two clusters.
    """

    scenario: Scenario
    means: tuple
    covariances: tuple
    counts: tuple
    truth_components: tuple
    test_counts: tuple
    boundary_count: int = 0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        means = tuple(tuple(float(v) for v in m) for m in self.means)
        object.__setattr__(self, "means", means)
        covs = tuple(
            tuple(tuple(float(v) for v in row) for row in np.atleast_2d(c))
            for c in self.covariances
        )
        object.__setattr__(self, "covariances", covs)
        for name in ("counts", "truth_components", "test_counts"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        k = len(means)
        if not (len(covs) == len(self.counts) == len(self.truth_components)
                == len(self.test_counts) == k) or k == 0:
            raise ValueError("per-component fields must have equal, non-zero length")
        dim = len(means[0])
        for m, c in zip(means, covs):
            if len(m) != dim:
                raise ValueError("component means must share one dimension")
            arr = np.asarray(c)
            if arr.shape != (dim, dim) or not np.allclose(arr, arr.T):
                raise ValueError("covariances must be symmetric DxD matrices")
            try:
                np.linalg.cholesky(arr)
            except np.linalg.LinAlgError:
                raise ValueError("covariances must be positive definite") from None
        if min(self.counts) < 1:
            raise ValueError("component counts must be at least 1")
        if any(t < 0 or t > c for t, c in zip(self.test_counts, self.counts)):
            raise ValueError("test_counts must lie in [0, count] per component")
        if self.boundary_count < 0:
            raise ValueError("boundary_count must be non-negative")
        if self.boundary_count and self.scenario is not Scenario.OVERLAP_PAIR:
            raise ValueError("boundary points only apply to the overlap scenario")
        if self.scenario is Scenario.OVERLAP_PAIR:
            if sorted(set(self.truth_components)) != [0, 1]:
                raise ValueError("the overlap scenario needs exactly 2 truth clusters")

    @property
    def dim(self) -> int:
        return len(self.means[0])

    @staticmethod
    def overlap_default(seed: int = 0,
                        boundary_count: int = OVERLAP_BOUNDARY_COUNT) -> "SyntheticSpec":
        cov = (np.eye(2) * OVERLAP_SIGMA ** 2).tolist()
        return SyntheticSpec(
            Scenario.OVERLAP_PAIR,
            means=OVERLAP_MEANS,
            covariances=(cov, cov),
            counts=(OVERLAP_COUNT, OVERLAP_COUNT),
            truth_components=(0, 1),
            test_counts=(0, 0),
            boundary_count=boundary_count,
            seed=seed,
        )

    @staticmethod
    def multimodal_default(seed: int = 0) -> "SyntheticSpec":
        cov = (np.eye(2) * MULTIMODAL_SIGMA ** 2).tolist()
        counts = (MULTIMODAL_COUNT,) * 5
        held = MULTIMODAL_HELD_OUT
        return SyntheticSpec(
            Scenario.MULTI_MODAL,
            means=MULTIMODAL_MEANS,
            covariances=(cov,) * 5,
            counts=counts,
            truth_components=MULTIMODAL_TRUTH,
            test_counts=(held, held, held, held, MULTIMODAL_COUNT),
            seed=seed,
        )

    @staticmethod
    def blobs(means, counts, spread: float = 1.0, test_counts=None,
              seed: int = 0) -> "SyntheticSpec":
        means = tuple(tuple(m) for m in means)
        dim = len(means[0])
        cov = (np.eye(dim) * spread ** 2).tolist()
        if test_counts is None:
            test_counts = (0,) * len(means)
        return SyntheticSpec(
            Scenario.BLOBS,
            means=means,
            covariances=(cov,) * len(means),
            counts=tuple(counts),
            truth_components=tuple(range(len(means))),
            test_counts=tuple(test_counts),
            seed=seed,
        )


def _boundary_points(spec: SyntheticSpec, cluster: int, count: int, rng) -> np.ndarray:
    """Clump of near-boundary points belonging to `cluster` (0 or 1)."""
    m0 = np.asarray(spec.means[spec.truth_components.index(0)])
    m1 = np.asarray(spec.means[spec.truth_components.index(1)])
    gap = m1 - m0
    length = float(np.linalg.norm(gap))
    axis = gap / length
    perp = np.zeros_like(axis)
    perp[:2] = (-axis[1], axis[0])
    side = -1.0 if cluster == 0 else 1.0
    center = ((m0 + m1) / 2.0
              + side * BOUNDARY_OWN_SIDE_BIAS * length * axis
              + side * BOUNDARY_PERP_OFFSET * length * perp)
    return center + BOUNDARY_SPREAD * length * rng.standard_normal((count, len(axis)))


def generate_synthetic(spec: SyntheticSpec) -> tuple[DataSet, Partition]:
    """Draw the dataset and its ground-truth partition.

    Deterministic given spec.seed.  Unlabeled rows (empty label) are the
    test points; the truth partition covers every row.
    """
    rng = np.random.default_rng((spec.seed, DATA_STREAM))
    rows = []
    labels = []
    truth = []
    for mean, cov, count, cluster, held in zip(
            spec.means, spec.covariances, spec.counts,
            spec.truth_components, spec.test_counts):
        pts = rng.multivariate_normal(np.asarray(mean), np.asarray(cov), size=count)
        hidden = set(rng.choice(count, size=held, replace=False).tolist())
        for i in range(count):
            rows.append(pts[i])
            truth.append(cluster)
            labels.append(None if i in hidden else f"c{cluster}")
    if spec.boundary_count:
        first = spec.boundary_count - spec.boundary_count // 2
        for cluster, count in ((0, first), (1, spec.boundary_count // 2)):
            for row in _boundary_points(spec, cluster, count, rng):
                rows.append(row)
                truth.append(cluster)
                labels.append(None)
    dataset = DataSet.from_points(np.asarray(rows), labels)
    return dataset, canonicalize(truth)
