"""CSV persistence for datasets with a JSON metadata sidecar."""

import logging
import re
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError, model_validator

from .models import FEATURE_NAMES, Batch, Dataset, LabelSource, NormStats, ParameterRanges, Split
from ..errors import MalformedFileError

logger = logging.getLogger(__name__)

DATASET_FORMAT_VERSION = 1
COLUMNS = list(FEATURE_NAMES) + ["c", "source"]
FLOAT_FORMAT = "%.17g"


class DatasetMetadata(BaseModel):
    """Contents of the `.meta.json` sidecar."""

    format_version: int = DATASET_FORMAT_VERSION
    seed: Optional[int] = None
    batch_size: int = Field(..., ge=1)
    n_batches: int = Field(..., ge=1)
    points_per_spec: int = Field(100, ge=1)
    ranges: ParameterRanges = Field(default_factory=ParameterRanges)
    splits: Dict[Split, List[int]]
    norm: Optional[NormStats] = None

    @model_validator(mode="after")
    def _check_splits(self) -> "DatasetMetadata":
        indices = sorted(i for split in self.splits.values() for i in split)
        if indices != list(range(self.n_batches)):
            raise ValueError("splits must be disjoint and cover every batch exactly once")
        return self


def metadata_path(path: Path) -> Path:
    """Sidecar path: same stem, `.meta.json` suffix."""
    return path.with_suffix(".meta.json")


def save_dataset(dataset: Dataset, path: Path) -> Path:
    """Write `dataset` to `path` (CSV) and its metadata sidecar.

    Returns:
        Path of the sidecar file
    """
    if not dataset.batches:
        raise ValueError("Cannot save a dataset without batches")
    features = np.vstack([b.features for b in dataset.batches])
    labels = np.concatenate([b.labels for b in dataset.batches])
    sources = np.concatenate([[b.source.value] * len(b) for b in dataset.batches])

    frame = pd.DataFrame(features, columns=list(FEATURE_NAMES))
    frame["c"] = labels
    frame["source"] = sources

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    meta = DatasetMetadata(
        seed=dataset.seed,
        batch_size=dataset.batch_size,
        n_batches=len(dataset.batches),
        points_per_spec=dataset.points_per_spec,
        ranges=dataset.ranges,
        splits=dataset.splits,
        norm=dataset.norm,
    )
    sidecar = metadata_path(path)
    sidecar.write_text(meta.model_dump_json(indent=2) + "\n")
    logger.info(f"Dataset saved to {path} ({len(frame)} rows, {len(dataset.batches)} batches)")
    return sidecar


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise MalformedFileError(str(path), "file is empty", line=1)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise MalformedFileError(str(path), str(e), line=int(match.group(1)) if match else None)

    if list(frame.columns) != COLUMNS:
        raise MalformedFileError(str(path), f"expected header {','.join(COLUMNS)}", line=1)
    if frame.empty:
        raise MalformedFileError(str(path), "no data rows", line=2)
    return frame


def _parse_float_column(frame: pd.DataFrame, column: str, path: Path) -> np.ndarray:
    try:
        values = frame[column].astype(float).to_numpy()
    except ValueError:
        values = pd.to_numeric(frame[column], errors="coerce").to_numpy()
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        row = int(bad[0])
        # Header is line 1.
        raise MalformedFileError(str(path), f"bad value {frame[column].iloc[row]!r} in column '{column}'", line=row + 2)
    return values


def _load_metadata(path: Path, n_rows: int) -> DatasetMetadata:
    sidecar = metadata_path(path)
    if not sidecar.exists():
        logger.warning(f"No metadata sidecar at {sidecar}; loading as a single training batch")
        return DatasetMetadata(batch_size=n_rows, n_batches=1, splits={Split.TRAIN: [0]})
    try:
        meta = DatasetMetadata.model_validate_json(sidecar.read_text())
    except ValidationError as e:
        raise MalformedFileError(str(sidecar), str(e))
    if meta.format_version != DATASET_FORMAT_VERSION:
        raise MalformedFileError(str(sidecar), f"unsupported format_version {meta.format_version}")
    if meta.batch_size * meta.n_batches != n_rows:
        raise MalformedFileError(
            str(path),
            f"{n_rows} rows do not fill {meta.n_batches} batches of {meta.batch_size}",
            line=n_rows + 1,
        )
    return meta


def load_dataset(path: Path) -> Dataset:
    """Read a dataset written by save_dataset.

    Raises:
        MalformedFileError: on parse failure, with the offending line when known
    """
    path = Path(path)
    frame = _read_frame(path)
    columns = {name: _parse_float_column(frame, name, path) for name in FEATURE_NAMES + ("c",)}
    try:
        sources = [LabelSource(v) for v in frame["source"]]
    except ValueError:
        valid = {s.value for s in LabelSource}
        row = next(i for i, v in enumerate(frame["source"]) if v not in valid)
        raise MalformedFileError(str(path), f"unknown label source {frame['source'].iloc[row]!r}", line=row + 2)

    meta = _load_metadata(path, len(frame))
    features = np.column_stack([columns[name] for name in FEATURE_NAMES])
    labels = columns["c"]

    batches = []
    for b in range(meta.n_batches):
        lo, hi = b * meta.batch_size, (b + 1) * meta.batch_size
        batch_sources = set(sources[lo:hi])
        if len(batch_sources) != 1:
            raise MalformedFileError(str(path), f"batch {b} mixes label sources", line=lo + 2)
        batches.append(Batch(features=features[lo:hi], labels=labels[lo:hi], source=batch_sources.pop()))

    logger.info(f"Loaded {len(frame)} rows in {meta.n_batches} batch(es) from {path}")
    return Dataset(
        batches=batches,
        splits={split: list(meta.splits.get(split, [])) for split in Split},
        norm=meta.norm,
        ranges=meta.ranges,
        seed=meta.seed,
        points_per_spec=meta.points_per_spec,
    )
