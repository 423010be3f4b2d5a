"""Datasets, CSV ingestion, and the small file formats the CLI speaks.

Identical feature rows are merged before inference (the Gram matrix of
a cluster containing two equal rows is singular) and re-expanded on
output; `source_rows` maps each original row to its representative.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .partitions import Partition, canonicalize


@dataclass(frozen=True)
class DataSet:
    """Deduplicated points plus per-point labels and the expansion map.

    `points` holds the unique rows in first-occurrence order, `labels`
    one optional string per unique row, and `source_rows[i]` the unique
    index backing original row i.
    """

    points: np.ndarray
    labels: tuple
    source_rows: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def n_original(self) -> int:
        return len(self.source_rows)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def labeled_indices(self) -> tuple[int, ...]:
        return tuple(i for i, lab in enumerate(self.labels) if lab is not None)

    @classmethod
    def from_points(cls, points, labels=None) -> "DataSet":
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError(f"points must be a non-empty 2-d array, got shape {pts.shape}")
        bad = np.flatnonzero(~np.isfinite(pts).all(axis=1))
        if bad.size:
            raise ValueError(f"row {bad[0]} contains a non-finite feature value")
        n = pts.shape[0]
        if labels is None:
            labels = [None] * n
        labels = [None if lab is None or lab == "" else str(lab) for lab in labels]
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} rows")
        seen: dict[bytes, int] = {}
        keep: list[int] = []
        merged: list = []
        source: list[int] = []
        for i in range(n):
            key = pts[i].tobytes()
            u = seen.get(key)
            if u is None:
                u = len(keep)
                seen[key] = u
                keep.append(i)
                merged.append(labels[i])
            elif labels[i] is not None:
                if merged[u] is None:
                    merged[u] = labels[i]
                elif merged[u] != labels[i]:
                    raise ValueError(
                        f"duplicate rows {keep[u]} and {i} carry conflicting labels "
                        f"{merged[u]!r} vs {labels[i]!r}"
                    )
            source.append(u)
        unique = np.ascontiguousarray(pts[keep])
        return cls(unique, tuple(merged), tuple(source))

    def expand_assignment(self, assignment) -> tuple[int, ...]:
        """Map a unique-row assignment back onto the original rows."""
        if len(assignment) != self.n:
            raise ValueError(f"assignment length {len(assignment)} != {self.n} unique rows")
        return tuple(int(assignment[u]) for u in self.source_rows)

    def expand_partition(self, partition: Partition) -> Partition:
        return canonicalize(self.expand_assignment(partition.assignment))


def load_csv(path, label_column: str = "label", ignore_columns=()) -> DataSet:
    """Read a header-ful CSV of feature columns plus an optional label column.

    Every column other than `label_column` and `ignore_columns` is
    parsed as a float feature; empty label cells mean unlabeled.
    """
    skip = set(ignore_columns)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        feature_cols = [
            (j, name) for j, name in enumerate(header)
            if name != label_column and name not in skip
        ]
        if not feature_cols:
            raise ValueError(f"{path}: no feature columns in header {header}")
        label_col = header.index(label_column) if label_column in header else None
        rows = []
        labels = []
        for r, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise ValueError(
                    f"{path}: row {r} has {len(rec)} fields, header has {len(header)}"
                )
            vals = []
            for j, name in feature_cols:
                try:
                    vals.append(float(rec[j]))
                except ValueError:
                    raise ValueError(
                        f"{path}: row {r}, column {name!r}: {rec[j]!r} is not a number"
                    ) from None
            rows.append(vals)
            labels.append(rec[label_col] if label_col is not None else None)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return DataSet.from_points(np.asarray(rows), labels)


def save_dataset_csv(dataset: DataSet, path, feature_names=None) -> None:
    """Write the dataset (original rows restored) with a trailing label column."""
    d = dataset.dim
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(d)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(feature_names) + ["label"])
        for u in dataset.source_rows:
            lab = dataset.labels[u]
            # repr of the builtin float round-trips float64 exactly
            writer.writerow([repr(float(v)) for v in dataset.points[u]] + [lab or ""])


def write_partition_csv(path, assignment) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cluster"])
        for a in assignment:
            writer.writerow([int(a)])


def read_partition_csv(path) -> Partition:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or "cluster" not in header:
            raise ValueError(f"{path}: expected a header with a 'cluster' column")
        col = header.index("cluster")
        raw = []
        for r, rec in enumerate(reader, start=2):
            try:
                raw.append(int(rec[col]))
            except (ValueError, IndexError):
                raise ValueError(f"{path}: row {r}: bad cluster id") from None
    if not raw:
        raise ValueError(f"{path}: no assignments")
    return canonicalize(raw)


def write_indices(path, indices) -> None:
    with open(path, "w") as fh:
        for i in indices:
            fh.write(f"{int(i)}\n")


def read_indices(path) -> tuple[int, ...]:
    out = []
    with open(path) as fh:
        for r, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ValueError(f"{path}: line {r}: {line!r} is not an index") from None
    return tuple(out)
