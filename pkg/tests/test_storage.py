"""Tests for dataset persistence."""

import json

import numpy as np
import pytest

from rdlab.data.models import Batch, Dataset, LabelSource, Split
from rdlab.data.storage import COLUMNS, load_dataset, metadata_path, save_dataset
from rdlab.errors import MalformedFileError


def _single_source_dataset(rows: int) -> Dataset:
    rng = np.random.default_rng(9)
    c0 = rng.uniform(50, 100, rows)
    L = rng.uniform(0.01, 0.05, rows)
    features = np.column_stack([
        c0, L, rng.uniform(-1, 1, rows) * L, rng.uniform(0, 2e8, rows), rng.uniform(1e-8, 1e-6, rows), rng.uniform(1e-10, 1e-8, rows)
    ])
    labels = c0 * rng.uniform(0, 1, rows)
    return Dataset(batches=[Batch(features, labels, LabelSource.FINITE_DIFFERENCE)], splits={Split.TRAIN: [0]})


def test_round_trip(tmp_path, small_dataset):
    """save -> load gives back every field."""
    path = tmp_path / "dataset.csv"
    sidecar = save_dataset(small_dataset, path)
    assert sidecar == metadata_path(path)
    assert sidecar.name == "dataset.meta.json"

    loaded = load_dataset(path)
    assert loaded.batches == small_dataset.batches
    assert loaded.splits == small_dataset.splits
    assert loaded.norm == small_dataset.norm
    assert loaded.ranges == small_dataset.ranges
    assert loaded.seed == small_dataset.seed
    assert loaded.points_per_spec == small_dataset.points_per_spec


def test_header(tmp_path, small_dataset):
    """c0,L,x,t,k,de,c,source."""
    path = tmp_path / "dataset.csv"
    save_dataset(small_dataset, path)
    assert path.read_text().splitlines()[0] == ",".join(COLUMNS) == "c0,L,x,t,k,de,c,source"


def test_truncated_file(tmp_path, small_dataset):
    """A file cut mid-row is reported as malformed."""
    path = tmp_path / "dataset.csv"
    save_dataset(small_dataset, path)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(MalformedFileError):
        load_dataset(path)


def test_bad_value_reports_line(tmp_path):
    """The offending line number is carried on the error."""
    path = tmp_path / "data.csv"
    save_dataset(_single_source_dataset(5), path)
    lines = path.read_text().splitlines()
    fields = lines[3].split(",")
    fields[4] = "fast"
    lines[3] = ",".join(fields)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(MalformedFileError) as info:
        load_dataset(path)
    assert info.value.line == 4


def test_wrong_header(tmp_path):
    """Header mismatch is line 1."""
    path = tmp_path / "data.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(MalformedFileError) as info:
        load_dataset(path)
    assert info.value.line == 1


def test_empty_file(tmp_path):
    """An empty file is malformed."""
    path = tmp_path / "data.csv"
    path.write_text("")
    with pytest.raises(MalformedFileError):
        load_dataset(path)


def test_file_without_sidecar_is_one_batch(tmp_path):
    """3000 rows and no metadata load as a single training batch."""
    path = tmp_path / "plain.csv"
    save_dataset(_single_source_dataset(3000), path)
    metadata_path(path).unlink()
    loaded = load_dataset(path)
    assert len(loaded.batches) == 1
    assert len(loaded.batches[0]) == 3000
    assert loaded.splits[Split.TRAIN] == [0]
    assert loaded.norm is None


def test_sidecar_row_count_mismatch(tmp_path, small_dataset):
    """Metadata promising more rows than the CSV holds is rejected."""
    path = tmp_path / "dataset.csv"
    sidecar = save_dataset(small_dataset, path)
    meta = json.loads(sidecar.read_text())
    meta["batch_size"] = 11
    sidecar.write_text(json.dumps(meta))
    with pytest.raises(MalformedFileError):
        load_dataset(path)


def test_sidecar_with_overlapping_splits(tmp_path, small_dataset):
    """Splits must be disjoint."""
    path = tmp_path / "dataset.csv"
    sidecar = save_dataset(small_dataset, path)
    meta = json.loads(sidecar.read_text())
    meta["splits"]["test"] = [0]
    sidecar.write_text(json.dumps(meta))
    with pytest.raises(MalformedFileError):
        load_dataset(path)
