"""Batch-wise dataset generation."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from .labeling import LabelSettings, SpecGroup, label_groups
from .models import Batch, Dataset, LabelSource, NormMode, ParameterRanges, Split
from .normalization import DEFAULT_LOG_FEATURES, compute_norm_stats
from .sampling import batch_rng, sample_point, sample_spec_fields
from ..analytic.models import ProblemSpec

logger = logging.getLogger(__name__)

DEFAULT_SOURCES: Dict[Split, LabelSource] = {
    Split.TRAIN: LabelSource.FINITE_DIFFERENCE,
    Split.VALIDATION: LabelSource.FINITE_DIFFERENCE,
    Split.TEST: LabelSource.ANALYTIC_SERIES,
}


class GenerationSettings(BaseModel):
    """Everything that determines a generated dataset."""

    seed: int = 0
    n_batches: int = Field(1000, ge=1)
    batch_size: int = Field(3000, ge=1)
    points_per_spec: int = Field(100, ge=1)
    ranges: ParameterRanges = Field(default_factory=ParameterRanges)
    validation_fraction: float = Field(0.05, ge=0, lt=1)
    test_fraction: float = Field(0.05, ge=0, lt=1)
    label: LabelSettings = Field(default_factory=LabelSettings)
    norm_mode: NormMode = NormMode.STANDARD
    log_features: List[str] = Field(default_factory=lambda: list(DEFAULT_LOG_FEATURES))


def assign_splits(
    n_batches: int, validation_fraction: float = 0.05, test_fraction: float = 0.05
) -> Dict[Split, List[int]]:
    """Contiguous 90/5/5-style split at batch granularity.

    Validation and test each get at least one batch once there are enough
    batches for train to keep one (2 for validation, 3 for test).
    """
    n_val = max(1, int(math.floor(validation_fraction * n_batches))) if n_batches >= 2 and validation_fraction > 0 else 0
    n_test = max(1, int(math.floor(test_fraction * n_batches))) if n_batches >= 3 and test_fraction > 0 else 0
    n_train = n_batches - n_val - n_test
    return {
        Split.TRAIN: list(range(n_train)),
        Split.VALIDATION: list(range(n_train, n_train + n_val)),
        Split.TEST: list(range(n_train + n_val, n_batches)),
    }


def generate_batch(index: int, source: LabelSource, settings: GenerationSettings) -> Batch:
    """Sample and label batch `index`; depends only on (seed, index)."""
    rng = batch_rng(settings.seed, index)
    groups: List[SpecGroup] = []
    remaining = settings.batch_size
    while remaining > 0:
        count = min(settings.points_per_spec, remaining)
        c0, half_thickness, k, de = sample_spec_fields(rng, settings.ranges)
        spec = ProblemSpec(de=de, k=k, c0=c0, half_thickness=half_thickness)
        points = [sample_point(rng, settings.ranges, half_thickness) for _ in range(count)]
        xs, ts = (np.array(v) for v in zip(*points))
        groups.append(SpecGroup(spec=spec, xs=xs, ts=ts))
        remaining -= count

    labels = label_groups(groups, source, settings.label)
    features = np.vstack([
        np.column_stack([
            np.full(len(g.xs), g.spec.c0),
            np.full(len(g.xs), g.spec.half_thickness),
            g.xs,
            g.ts,
            np.full(len(g.xs), g.spec.k),
            np.full(len(g.xs), g.spec.de),
        ])
        for g in groups
    ])
    logger.debug(f"Batch {index}: {len(groups)} spec group(s) labeled by {source.value}")
    return Batch(features=features, labels=np.concatenate(labels), source=source)


def _batch_task(args: Tuple[int, LabelSource, GenerationSettings]) -> Batch:
    return generate_batch(*args)


def generate(
    settings: GenerationSettings,
    sources: Optional[Dict[Split, LabelSource]] = None,
    jobs: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> Dataset:
    """Generate n_batches labeled batches and split them 90/5/5.

    Args:
        settings: Seed, sizes, ranges and solver settings
        sources: Label source per split (FD for train/validation, series for test by default)
        jobs: Worker processes; results are identical to a sequential run
        progress: Called with the batch index after each batch completes

    Returns:
        Dataset with normalization statistics from the training split
    """
    sources = {**DEFAULT_SOURCES, **(sources or {})}
    splits = assign_splits(settings.n_batches, settings.validation_fraction, settings.test_fraction)
    split_of = {i: split for split, indices in splits.items() for i in indices}
    tasks = [(i, sources[split_of[i]], settings) for i in range(settings.n_batches)]

    logger.info(
        f"Generating {settings.n_batches} batch(es) of {settings.batch_size} samples "
        f"(seed {settings.seed}, jobs {jobs})"
    )
    batches: List[Batch] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for batch in pool.map(_batch_task, tasks):
                batches.append(batch)
                if progress:
                    progress(len(batches) - 1)
    else:
        for task in tasks:
            batches.append(_batch_task(task))
            if progress:
                progress(task[0])

    dataset = Dataset(
        batches=batches,
        splits=splits,
        ranges=settings.ranges,
        seed=settings.seed,
        points_per_spec=settings.points_per_spec,
    )
    train_features, _ = dataset.split_arrays(Split.TRAIN)
    if len(train_features):
        dataset.norm = compute_norm_stats(train_features, settings.norm_mode, settings.log_features)
    logger.info(f"Generated {sum(len(b) for b in batches)} samples")
    return dataset
