import numpy as np
import pytest

from detclust.data import (
    DataSet,
    load_csv,
    read_indices,
    read_partition_csv,
    save_dataset_csv,
    write_indices,
    write_partition_csv,
)
from detclust.partitions import Partition, canonicalize


class TestDataSet:
    def test_basic(self):
        ds = DataSet.from_points([[0.0, 1.0], [2.0, 3.0]], ["a", None])
        assert ds.n == ds.n_original == 2
        assert ds.dim == 2
        assert ds.labels == ("a", None)
        assert ds.labeled_indices == (0,)
        assert ds.source_rows == (0, 1)

    def test_one_dimensional_input_becomes_column(self):
        ds = DataSet.from_points([1.0, 2.0, 3.0])
        assert ds.points.shape == (3, 1)

    def test_empty_label_means_unlabeled(self):
        ds = DataSet.from_points([[0.0], [1.0]], ["", "b"])
        assert ds.labels == (None, "b")

    def test_duplicate_rows_merge(self):
        pts = [[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]
        ds = DataSet.from_points(pts, [None, "b", "a"])
        assert ds.n == 2
        assert ds.n_original == 3
        assert ds.source_rows == (0, 1, 0)
        # the duplicate's label lands on the representative
        assert ds.labels == ("a", "b")

    def test_conflicting_duplicate_labels_raise(self):
        pts = [[0.0, 0.0], [0.0, 0.0]]
        with pytest.raises(ValueError, match="rows 0 and 1"):
            DataSet.from_points(pts, ["a", "b"])

    def test_agreeing_duplicate_labels_fine(self):
        ds = DataSet.from_points([[0.0], [0.0]], ["a", "a"])
        assert ds.n == 1 and ds.labels == ("a",)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="row 1"):
            DataSet.from_points([[0.0], [np.nan]])
        with pytest.raises(ValueError, match="row 0"):
            DataSet.from_points([[np.inf], [0.0]])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            DataSet.from_points(np.zeros((0, 2)))

    def test_label_count_mismatch(self):
        with pytest.raises(ValueError):
            DataSet.from_points([[0.0], [1.0]], ["a"])

    def test_expand_assignment(self):
        ds = DataSet.from_points([[0.0], [1.0], [0.0], [2.0]])
        assert ds.source_rows == (0, 1, 0, 2)
        assert ds.expand_assignment((0, 1, 1)) == (0, 1, 0, 1)
        assert ds.expand_partition(Partition((0, 1, 1))) == canonicalize([0, 1, 0, 1])
        with pytest.raises(ValueError):
            ds.expand_assignment((0, 1))

    def test_nearly_equal_rows_stay_distinct(self):
        ds = DataSet.from_points([[0.0], [1e-300]])
        assert ds.n == 2


class TestCsv(object):
    def _write(self, tmp_path, text, name="d.csv"):
        p = tmp_path / name
        p.write_text(text)
        return p

    def test_round_trip_exact(self, tmp_path):
        pts = np.random.default_rng(80).normal(size=(7, 3))
        labels = ["a", None, "b", None, "a", "", "c"]
        ds = DataSet.from_points(pts, labels)
        path = tmp_path / "out.csv"
        save_dataset_csv(ds, path)
        back = load_csv(path)
        # repr round-trips float64 exactly
        assert np.array_equal(back.points, ds.points)
        assert back.labels == ds.labels
        assert back.source_rows == ds.source_rows

    def test_load_basic(self, tmp_path):
        p = self._write(tmp_path, "x0,x1,label\n0.5,1.5,a\n2.5,3.5,\n")
        ds = load_csv(p)
        assert ds.points.tolist() == [[0.5, 1.5], [2.5, 3.5]]
        assert ds.labels == ("a", None)

    def test_ignore_columns(self, tmp_path):
        p = self._write(tmp_path, "x,truth,label\n1.0,9,a\n2.0,8,\n")
        ds = load_csv(p, ignore_columns=("truth",))
        assert ds.points.tolist() == [[1.0], [2.0]]

    def test_missing_label_column_means_unlabeled(self, tmp_path):
        p = self._write(tmp_path, "x0,x1\n1.0,2.0\n")
        ds = load_csv(p)
        assert ds.labels == (None,)

    def test_bad_cell_names_row_and_column(self, tmp_path):
        p = self._write(tmp_path, "x0,x1,label\n1.0,oops,a\n")
        with pytest.raises(ValueError, match=r"row 2, column 'x1'"):
            load_csv(p)

    def test_inconsistent_row_length(self, tmp_path):
        p = self._write(tmp_path, "x0,x1,label\n1.0,2.0,a\n3.0,b\n")
        with pytest.raises(ValueError, match="row 3"):
            load_csv(p)

    def test_empty_file(self, tmp_path):
        with pytest.raises(ValueError, match="empty"):
            load_csv(self._write(tmp_path, ""))

    def test_header_only(self, tmp_path):
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(self._write(tmp_path, "x0,label\n"))

    def test_no_feature_columns(self, tmp_path):
        with pytest.raises(ValueError, match="no feature columns"):
            load_csv(self._write(tmp_path, "label\na\n"))


class TestPartitionCsv:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "part.csv"
        write_partition_csv(p, [0, 0, 1, 2, 1])
        assert read_partition_csv(p) == Partition((0, 0, 1, 2, 1))

    def test_canonicalizes_on_read(self, tmp_path):
        p = tmp_path / "part.csv"
        write_partition_csv(p, [5, 5, 3])
        assert read_partition_csv(p) == Partition((0, 0, 1))

    def test_errors(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong\n1\n")
        with pytest.raises(ValueError):
            read_partition_csv(bad)
        bad.write_text("cluster\nx\n")
        with pytest.raises(ValueError, match="row 2"):
            read_partition_csv(bad)
        bad.write_text("cluster\n")
        with pytest.raises(ValueError, match="no assignments"):
            read_partition_csv(bad)


class TestIndices:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "idx.txt"
        write_indices(p, [3, 1, 4])
        assert read_indices(p) == (3, 1, 4)

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "idx.txt"
        p.write_text("1\n\n2\n")
        assert read_indices(p) == (1, 2)

    def test_bad_line(self, tmp_path):
        p = tmp_path / "idx.txt"
        p.write_text("1\nnope\n")
        with pytest.raises(ValueError, match="line 2"):
            read_indices(p)
