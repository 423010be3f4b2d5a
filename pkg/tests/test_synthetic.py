import numpy as np
import pytest

from detclust.partitions import satisfies_constraints, constraints_from_labels
from detclust.synthetic import (
    MULTIMODAL_COUNT,
    OVERLAP_BOUNDARY_COUNT,
    OVERLAP_COUNT,
    Scenario,
    SyntheticSpec,
    generate_synthetic,
)


class TestSpecValidation:
    def test_defaults_construct(self):
        SyntheticSpec.overlap_default()
        SyntheticSpec.multimodal_default()
        SyntheticSpec.blobs([[0.0, 0.0], [5.0, 5.0]], [10, 10])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            SyntheticSpec(Scenario.BLOBS, means=((0.0,),), covariances=(((1.0,),),),
                          counts=(5, 5), truth_components=(0,), test_counts=(0,))

    def test_bad_covariance(self):
        with pytest.raises(ValueError, match="positive definite"):
            SyntheticSpec(Scenario.BLOBS, means=((0.0, 0.0),),
                          covariances=((((-1.0, 0.0), (0.0, 1.0))),),
                          counts=(5,), truth_components=(0,), test_counts=(0,))

    def test_test_counts_bounded(self):
        with pytest.raises(ValueError, match="test_counts"):
            SyntheticSpec(Scenario.BLOBS, means=((0.0,),), covariances=(((1.0,),),),
                          counts=(5,), truth_components=(0,), test_counts=(6,))

    def test_boundary_only_for_overlap(self):
        with pytest.raises(ValueError, match="overlap"):
            SyntheticSpec(Scenario.BLOBS, means=((0.0,),), covariances=(((1.0,),),),
                          counts=(5,), truth_components=(0,), test_counts=(0,),
                          boundary_count=4)


class TestOverlapScenario:
    def test_shape_and_labels(self):
        ds, truth = generate_synthetic(SyntheticSpec.overlap_default(seed=3))
        n = 2 * OVERLAP_COUNT + OVERLAP_BOUNDARY_COUNT
        assert ds.n_original == n
        assert len(truth) == n
        assert truth.num_clusters == 2
        # core points all labeled, boundary points all unlabeled
        labels = [ds.labels[u] for u in ds.source_rows]
        assert all(lab is not None for lab in labels[:2 * OVERLAP_COUNT])
        assert all(lab is None for lab in labels[2 * OVERLAP_COUNT:])

    def test_boundary_points_split_between_clusters(self):
        ds, truth = generate_synthetic(SyntheticSpec.overlap_default(seed=3))
        tail = truth.assignment[2 * OVERLAP_COUNT:]
        assert sorted(set(tail)) == [0, 1]

    def test_boundary_points_sit_between_means(self):
        spec = SyntheticSpec.overlap_default(seed=5)
        ds, _ = generate_synthetic(spec)
        pts = np.asarray([ds.points[u] for u in ds.source_rows])
        boundary = pts[2 * OVERLAP_COUNT:]
        # between the +-2 means on the x axis, clear of both centers
        assert np.all(np.abs(boundary[:, 0]) < 1.5)

    def test_truth_consistent_with_labels(self):
        ds, truth = generate_synthetic(SyntheticSpec.overlap_default(seed=7))
        constraints = constraints_from_labels(ds.labels)
        compact = [truth.assignment[[r for r, u2 in enumerate(ds.source_rows)
                                     if u2 == u][0]] for u in range(ds.n)]
        from detclust.partitions import canonicalize
        assert satisfies_constraints(canonicalize(compact), constraints)

    def test_zero_boundary_is_plain_blobs(self):
        ds, truth = generate_synthetic(
            SyntheticSpec.overlap_default(seed=3, boundary_count=0))
        assert ds.n_original == 2 * OVERLAP_COUNT
        assert all(lab is not None for lab in ds.labels)


class TestMultiModalScenario:
    def test_shape_and_truth(self):
        ds, truth = generate_synthetic(SyntheticSpec.multimodal_default(seed=1))
        assert ds.n_original == 5 * MULTIMODAL_COUNT
        assert truth.num_clusters == 2
        # components 0,1 form cluster 0; 2,3,4 form cluster 1
        a = truth.assignment
        c = MULTIMODAL_COUNT
        assert len(set(a[:2 * c])) == 1
        assert len(set(a[2 * c:])) == 1
        assert a[0] != a[2 * c]

    def test_hidden_component_fully_unlabeled(self):
        ds, _ = generate_synthetic(SyntheticSpec.multimodal_default(seed=1))
        labels = [ds.labels[u] for u in ds.source_rows]
        c = MULTIMODAL_COUNT
        last = labels[4 * c:]
        assert all(lab is None for lab in last)
        # first four components hide exactly 3 each
        for comp in range(4):
            chunk = labels[comp * c:(comp + 1) * c]
            assert sum(lab is None for lab in chunk) == 3

    def test_labels_name_truth_cluster(self):
        ds, truth = generate_synthetic(SyntheticSpec.multimodal_default(seed=2))
        labels = [ds.labels[u] for u in ds.source_rows]
        for lab, t in zip(labels, truth.assignment):
            if lab is not None:
                assert lab == f"c{t}"


class TestDeterminism:
    @pytest.mark.parametrize("spec_fn", [SyntheticSpec.overlap_default,
                                         SyntheticSpec.multimodal_default])
    def test_same_seed_bit_identical(self, spec_fn):
        a, ta = generate_synthetic(spec_fn(seed=11))
        b, tb = generate_synthetic(spec_fn(seed=11))
        assert np.array_equal(a.points, b.points)
        assert a.labels == b.labels
        assert ta == tb

    def test_different_seed_differs(self):
        a, _ = generate_synthetic(SyntheticSpec.overlap_default(seed=1))
        b, _ = generate_synthetic(SyntheticSpec.overlap_default(seed=2))
        assert not np.array_equal(a.points, b.points)


class TestBlobs:
    def test_counts_and_test_points(self):
        spec = SyntheticSpec.blobs([[0.0, 0.0], [8.0, 8.0]], [6, 4],
                                   spread=0.5, test_counts=[2, 1], seed=9)
        ds, truth = generate_synthetic(spec)
        assert ds.n_original == 10
        assert truth.assignment == (0,) * 6 + (1,) * 4
        labels = [ds.labels[u] for u in ds.source_rows]
        assert sum(lab is None for lab in labels[:6]) == 2
        assert sum(lab is None for lab in labels[6:]) == 1
