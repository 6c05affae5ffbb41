"""Data models for the dataset pipeline."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

FEATURE_NAMES: Tuple[str, ...] = ("c0", "L", "x", "t", "k", "de")
LABEL_SLACK = 1e-6


class LabelSource(str, Enum):
    """Which solver produced a label."""
    FINITE_DIFFERENCE = "finite_difference"
    ANALYTIC_SERIES = "analytic_series"


class NormMode(str, Enum):
    """Feature normalization flavour."""
    SECOND_MOMENT = "second_moment"  # (x - mu) / mean(x^2)
    STANDARD = "standard"  # (x - mu) / std


class Split(str, Enum):
    """Dataset partitions."""
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


class ParameterRanges(BaseModel):
    """Sampling bounds for the six features; t is given in years."""

    model_config = ConfigDict(frozen=True)

    c0: Tuple[float, float] = Field((0.0, 200.0), description="Boundary concentration, mol/m^3")
    half_thickness: Tuple[float, float] = Field((0.0, 0.05), description="L, m (lower bound exclusive)")
    t_years: Tuple[float, float] = Field((0.0, 7.0), description="Time, years")
    k: Tuple[float, float] = Field((1e-10, 1e-1), description="Reaction rate, 1/s")
    de: Tuple[float, float] = Field((1e-13, 1e-1), description="Diffusion coefficient, m^2/s")

    @model_validator(mode="after")
    def _check_bounds(self) -> "ParameterRanges":
        for name in ("c0", "half_thickness", "t_years", "k", "de"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"Range for {name} must satisfy lo < hi, got ({lo}, {hi})")
        if self.c0[0] < 0 or self.half_thickness[0] < 0 or self.t_years[0] < 0:
            raise ValueError("c0, half_thickness and t ranges must be non-negative")
        if self.k[0] <= 0 or self.de[0] <= 0:
            raise ValueError("k and de ranges must be strictly positive for log sampling")
        return self

    @classmethod
    def desk_scale(cls) -> "ParameterRanges":
        """Narrow ranges used for desktop-sized training runs."""
        return cls(c0=(50.0, 100.0), k=(1e-8, 1e-6), de=(1e-10, 1e-8))

    @classmethod
    def damkohler_scale(cls) -> "ParameterRanges":
        """Reaction-dominated ranges around k = 2e-4, L = 0.05 with Da from about 10 to 5e8."""
        return cls(c0=(50.0, 100.0), half_thickness=(0.03, 0.07), k=(1e-5, 1e-3), de=(1e-14, 1e-9))


class NormStats(BaseModel):
    """Per-feature normalization statistics, computed on the training split."""

    mu: List[float]
    sigma_sq: List[float]
    mode: NormMode = NormMode.STANDARD
    log_features: List[str] = Field(default_factory=lambda: ["k", "de"])

    @model_validator(mode="after")
    def _check_shapes(self) -> "NormStats":
        if len(self.mu) != len(FEATURE_NAMES) or len(self.sigma_sq) != len(FEATURE_NAMES):
            raise ValueError(f"Expected {len(FEATURE_NAMES)} statistics per field")
        if any(s <= 0 for s in self.sigma_sq):
            raise ValueError("sigma_sq must be positive for every feature")
        unknown = set(self.log_features) - set(FEATURE_NAMES)
        if unknown:
            raise ValueError(f"Unknown log features: {sorted(unknown)}")
        return self


@dataclass(frozen=True)
class Sample:
    """One labeled feature tuple (c0, L, x, t, k, de) in SI units."""
    features: Tuple[float, float, float, float, float, float]
    label: float  # mol/m^3
    label_source: LabelSource

    def __post_init__(self) -> None:
        c0, L, x = self.features[0], self.features[1], self.features[2]
        if abs(x) > L * (1.0 + 1e-12):
            raise ValueError(f"Sample position {x} outside [-{L}, {L}]")
        if not 0.0 <= self.label <= c0 * (1.0 + LABEL_SLACK):
            raise ValueError(f"Label {self.label} outside [0, {c0}]")


@dataclass(eq=False)
class Batch:
    """Fixed-size block of samples stored column-wise."""
    features: np.ndarray  # (n, 6)
    labels: np.ndarray  # (n,)
    source: LabelSource

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Batch):
            return NotImplemented
        return (
            self.source == other.source
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    def samples(self) -> Iterator[Sample]:
        for row, label in zip(self.features, self.labels):
            yield Sample(tuple(float(v) for v in row), float(label), self.source)


@dataclass
class Dataset:
    """Batches plus their split assignment and normalization statistics."""
    batches: List[Batch]
    splits: Dict[Split, List[int]]
    norm: Optional[NormStats] = None
    ranges: ParameterRanges = field(default_factory=ParameterRanges)
    seed: Optional[int] = None
    points_per_spec: int = 100

    @property
    def batch_size(self) -> int:
        return len(self.batches[0]) if self.batches else 0

    def split_arrays(self, split: Split) -> Tuple[np.ndarray, np.ndarray]:
        """Stack features and labels of all batches in a split."""
        indices = self.splits.get(split, [])
        if not indices:
            return np.empty((0, len(FEATURE_NAMES))), np.empty(0)
        features = np.vstack([self.batches[i].features for i in indices])
        labels = np.concatenate([self.batches[i].labels for i in indices])
        return features, labels

    def subset(self, n_train: int, n_validation: int) -> "Dataset":
        """Leading train/validation batches plus the full test split."""
        chosen = {
            Split.TRAIN: self.splits.get(Split.TRAIN, [])[:n_train],
            Split.VALIDATION: self.splits.get(Split.VALIDATION, [])[:n_validation],
            Split.TEST: self.splits.get(Split.TEST, []),
        }
        batches: List[Batch] = []
        splits: Dict[Split, List[int]] = {}
        for split, indices in chosen.items():
            splits[split] = list(range(len(batches), len(batches) + len(indices)))
            batches.extend(self.batches[i] for i in indices)
        return Dataset(
            batches=batches,
            splits=splits,
            norm=None,
            ranges=self.ranges,
            seed=self.seed,
            points_per_spec=self.points_per_spec,
        )
