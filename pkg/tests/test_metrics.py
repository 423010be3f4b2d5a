import math

import numpy as np
import pytest

from detclust.kernels import KernelParams
from detclust.metrics import (
    ContingencyTable,
    PosteriorSummary,
    adjusted_rand_index,
    kmeans,
    normalized_mutual_information,
    summarize,
    _lloyd,
)
from detclust.partitions import Partition, canonicalize
from detclust.sampler import PosteriorTrace, TraceSample

from oracles import contingency_nmi, pair_count_ari


CROSSED_A = Partition((0, 0, 1, 1))
CROSSED_B = Partition((0, 1, 0, 1))


class TestContingencyTable:
    def test_counts(self):
        t = ContingencyTable.from_partitions(CROSSED_A, CROSSED_B)
        assert t.counts.tolist() == [[1, 1], [1, 1]]
        assert t.row_marginals.tolist() == [2, 2]
        assert t.n == 4

    def test_subset(self):
        t = ContingencyTable.from_partitions(CROSSED_A, CROSSED_B,
                                             indices=[0, 1, 2])
        assert t.n == 3

    def test_errors(self):
        with pytest.raises(ValueError):
            ContingencyTable.from_partitions(Partition((0, 1)), Partition((0, 1, 2)))
        with pytest.raises(ValueError):
            ContingencyTable.from_partitions(CROSSED_A, CROSSED_B, indices=[0])
        with pytest.raises(ValueError):
            ContingencyTable.from_partitions(CROSSED_A, CROSSED_B, indices=[0, 9])


class TestAdjustedRandIndex:
    def test_crossed_pair_is_minus_half(self):
        assert adjusted_rand_index(CROSSED_A, CROSSED_B) == pytest.approx(-0.5)

    def test_identical_is_one(self):
        for p in (Partition((0, 1, 0, 2, 1)), Partition((0,) * 5),
                  Partition(tuple(range(5)))):
            assert adjusted_rand_index(p, p) == 1.0

    def test_symmetric(self):
        p = canonicalize([0, 0, 1, 2, 2, 1, 0])
        q = canonicalize([0, 1, 1, 2, 0, 2, 0])
        assert adjusted_rand_index(p, q) == adjusted_rand_index(q, p)

    def test_relabeling_invariant(self):
        p = canonicalize([0, 0, 1, 1, 2, 2])
        q = canonicalize([2, 2, 0, 0, 1, 1])
        assert adjusted_rand_index(p, q) == pytest.approx(1.0)

    def test_matches_pair_count_oracle(self):
        rng = np.random.default_rng(70)
        for _ in range(60):
            n = int(rng.integers(3, 12))
            p = canonicalize(rng.integers(0, 4, size=n).tolist())
            q = canonicalize(rng.integers(0, 4, size=n).tolist())
            assert adjusted_rand_index(p, q) == pytest.approx(
                pair_count_ari(p.assignment, q.assignment), abs=1e-12)

    def test_random_labels_average_near_zero(self):
        rng = np.random.default_rng(71)
        truth = canonicalize(rng.integers(0, 3, size=30).tolist())
        vals = []
        for _ in range(2000):
            guess = canonicalize(rng.integers(0, 3, size=30).tolist())
            vals.append(adjusted_rand_index(truth, guess))
        assert abs(np.mean(vals)) < 0.02

    def test_subset_restriction(self):
        p = canonicalize([0, 0, 1, 1, 0, 1])
        q = canonicalize([0, 0, 1, 1, 1, 0])
        # on the first four points the partitions agree exactly
        assert adjusted_rand_index(p, q, indices=[0, 1, 2, 3]) == pytest.approx(1.0)
        assert adjusted_rand_index(p, q) < 1.0


class TestNormalizedMutualInformation:
    def test_crossed_pair_is_zero(self):
        assert normalized_mutual_information(CROSSED_A, CROSSED_B) == 0.0

    def test_identical_is_one(self):
        for p in (Partition((0, 1, 0, 2, 1)), Partition((0,) * 4),
                  Partition(tuple(range(4)))):
            assert normalized_mutual_information(p, p) == pytest.approx(1.0)

    def test_symmetric(self):
        p = canonicalize([0, 0, 1, 2, 2, 1])
        q = canonicalize([0, 1, 1, 2, 0, 2])
        assert (normalized_mutual_information(p, q)
                == normalized_mutual_information(q, p))

    def test_matches_contingency_oracle(self):
        rng = np.random.default_rng(72)
        for _ in range(60):
            n = int(rng.integers(3, 12))
            p = canonicalize(rng.integers(0, 4, size=n).tolist())
            q = canonicalize(rng.integers(0, 4, size=n).tolist())
            assert normalized_mutual_information(p, q) == pytest.approx(
                contingency_nmi(p.assignment, q.assignment), abs=1e-12)

    def test_bounds(self):
        rng = np.random.default_rng(73)
        for _ in range(100):
            n = int(rng.integers(2, 10))
            p = canonicalize(rng.integers(0, 5, size=n).tolist())
            q = canonicalize(rng.integers(0, 5, size=n).tolist())
            v = normalized_mutual_information(p, q)
            assert 0.0 <= v <= 1.0


class TestKMeans:
    def test_k_equals_n_is_singletons(self):
        pts = np.random.default_rng(74).normal(size=(6, 2))
        assert kmeans(pts, 6, seed=0) == Partition(tuple(range(6)))

    def test_k_one_is_single_cluster(self):
        pts = np.random.default_rng(75).normal(size=(6, 2))
        assert kmeans(pts, 1, seed=0) == Partition((0,) * 6)

    def test_recovers_separated_blobs(self):
        rng = np.random.default_rng(76)
        truth = Partition((0,) * 20 + (1,) * 20 + (2,) * 20)
        hits = 0
        for trial in range(100):
            pts = np.concatenate([
                rng.normal(size=(20, 2)) * 0.3 + center
                for center in ([0, 0], [10, 0], [0, 10])])
            result = kmeans(pts, 3, seed=trial)
            if adjusted_rand_index(result, truth) == pytest.approx(1.0):
                hits += 1
        assert hits >= 95

    def test_objective_never_increases(self):
        rng = np.random.default_rng(77)
        pts = rng.normal(size=(40, 3))
        centers = pts[rng.choice(40, size=4, replace=False)].copy()
        _, history = _lloyd(pts, centers, 300)
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_deterministic_per_seed(self):
        pts = np.random.default_rng(78).normal(size=(25, 2))
        assert kmeans(pts, 4, seed=3) == kmeans(pts, 4, seed=3)

    def test_duplicate_points_fill_remaining_centers(self):
        pts = np.zeros((5, 2))
        p = kmeans(pts, 3, seed=0)
        assert len(p) == 5

    def test_validation(self):
        pts = np.zeros((4, 2))
        with pytest.raises(ValueError):
            kmeans(pts, 0)
        with pytest.raises(ValueError):
            kmeans(pts, 5)
        with pytest.raises(ValueError):
            kmeans(np.zeros(4), 2)


def _trace(partitions, lls=None):
    params = KernelParams.delta(1.0)
    t = PosteriorTrace()
    for i, p in enumerate(partitions):
        ll = 0.0 if lls is None else lls[i]
        t.samples.append(TraceSample(i + 1, canonicalize(list(p)), params, ll))
    return t


class TestSummarize:
    def test_histogram_and_co_occurrence(self):
        t = _trace([(0, 0, 1), (0, 0, 1), (0, 1, 2), (0, 0, 0)])
        s = summarize(t)
        assert s.cluster_count_histogram == {1: 0.25, 2: 0.5, 3: 0.25}
        assert s.co_occurrence[0, 1] == pytest.approx(0.75)
        assert s.co_occurrence[0, 2] == pytest.approx(0.25)
        assert s.co_occurrence[1, 2] == pytest.approx(0.25)
        assert np.allclose(np.diag(s.co_occurrence), 1.0)
        assert np.allclose(s.co_occurrence, s.co_occurrence.T)
        assert s.mean_ari is None and s.mean_nmi is None

    def test_truth_scoring(self):
        truth = canonicalize([0, 0, 1, 1])
        t = _trace([(0, 0, 1, 1), (0, 1, 0, 1)])
        s = summarize(t, truth=truth)
        assert s.mean_ari == pytest.approx(0.5 * (1.0 + -0.5))
        assert s.mean_nmi == pytest.approx(0.5 * (1.0 + 0.0))

    def test_test_index_restriction(self):
        truth = canonicalize([0, 0, 1, 1, 0])
        # sample agrees with truth except on point 4, which the test
        # subset excludes
        t = _trace([(0, 0, 1, 1, 1)])
        s = summarize(t, truth=truth, test_indices=[0, 1, 2, 3])
        assert s.mean_ari == pytest.approx(1.0)

    def test_empty_trace_raises(self):
        with pytest.raises(ValueError):
            summarize(PosteriorTrace())

    def test_summary_is_frozen(self):
        s = PosteriorSummary({1: 1.0}, np.ones((1, 1)))
        with pytest.raises(AttributeError):
            s.mean_ari = 0.5
