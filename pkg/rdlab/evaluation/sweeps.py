"""Experiment harnesses: batch-count, coefficient and Damkohler sweeps.

Each harness returns a DataFrame whose columns mirror the corresponding
results table; write_sweep stores it as CSV plus a JSON sidecar.
"""

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from .dimensionless import DEFAULT_THRESHOLDS, damkohler, fit_to_ranges, rescale_query
from .metrics import evaluate, evaluate_dataset
from .models import RegimeThresholds
from ..analytic.models import SECONDS_PER_YEAR, ProblemSpec, SeriesOptions, SpaceTimePoint
from ..analytic.series import concentration
from ..data.generator import GenerationSettings, assign_splits, generate
from ..data.models import Dataset, ParameterRanges, Split
from ..data.normalization import compute_norm_stats
from ..surrogate.base import ConcentrationModel
from ..surrogate.checkpoint import Checkpoint
from ..surrogate.models import NetworkConfig
from ..surrogate.predictor import NetworkModel
from ..surrogate.training import train

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# Reaction-rate and diffusivity columns of the coefficient-sensitivity table.
COEFFICIENT_BASE = ProblemSpec(de=2.6e-9, k=2.125e-7, c0=75.5, half_thickness=0.05)
K_SWEEP_VALUES = (2.125e-2, 2.125e-5, 2.125e-7, 2.125e-10, 2.125e-13)
DE_SWEEP_VALUES = (2.6e-5, 2.6e-7, 2.6e-10, 2.6e-12, 2.6e-15)

# Reaction-dominated block: c0 = 75.5, L = 0.05, k = 2e-4.
DAMKOHLER_BASE = ProblemSpec(de=2e-12, k=2e-4, c0=75.5, half_thickness=0.05)
DAMKOHLER_DE_VALUES = (2e-14, 2e-13, 2e-12, 2e-11, 2e-10)

BATCH_SWEEP_COUNTS = (10, 30, 100)


class LatticeSettings(BaseModel):
    """Test lattice laid over one problem: nx positions by nt times."""

    nx: int = Field(21, ge=2)
    nt: int = Field(15, ge=2)
    t_years_max: float = Field(7.0, gt=0)
    series_max_terms: int = Field(20000, ge=1)
    edges: Optional[bool] = Field(
        None,
        description="Include the wall columns and the t = 0 row; unset leaves the choice to the sweep",
    )


def threshold_column(theta: float) -> str:
    return f"thr_{theta:g}"


def _parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def lattice(spec: ProblemSpec, settings: LatticeSettings = LatticeSettings()):
    """Raw features and analytic labels on the nx-by-nt test lattice.

    Without edges the nx positions sit strictly between the walls and the nt
    times strictly after t = 0, so no query lands on boundary or initial data.
    """
    L = spec.half_thickness
    horizon = settings.t_years_max * SECONDS_PER_YEAR
    opts = SeriesOptions(max_terms=settings.series_max_terms)
    if settings.edges is False:
        xs = np.linspace(-L, L, settings.nx + 2)[1:-1]
        ts = np.linspace(0.0, horizon, settings.nt + 1)[1:]
    else:
        xs = np.linspace(-L, L, settings.nx)
        ts = np.linspace(0.0, horizon, settings.nt)
    rows, labels = [], []
    for t in ts:
        for x in xs:
            rows.append((spec.c0, L, x, t, spec.k, spec.de))
            labels.append(concentration(spec, SpaceTimePoint(float(x), float(t)), opts))
    return np.array(rows), np.array(labels)


def _similar_features(features: np.ndarray, spec: ProblemSpec, horizon: float, ranges: ParameterRanges) -> np.ndarray:
    """Move every query row to the one similar problem inside `ranges`."""
    s, a = fit_to_ranges(spec, horizon, ranges)
    scaled, _ = rescale_query(spec, SpaceTimePoint(0.0, 0.0), s, a)
    out = np.array(features, dtype=float, copy=True)
    out[:, 1] = scaled.half_thickness
    out[:, 2] *= s
    out[:, 3] *= a
    out[:, 4] = scaled.k
    out[:, 5] = scaled.de
    return out


def _evaluate_spec(
    spec: ProblemSpec,
    model: ConcentrationModel,
    thetas: Sequence[float],
    settings: LatticeSettings,
    similarity: Optional[ParameterRanges],
    regimes: RegimeThresholds,
) -> Dict[str, Any]:
    features, labels = lattice(spec, settings)
    if similarity is not None:
        features = _similar_features(features, spec, settings.t_years_max * SECONDS_PER_YEAR, similarity)
    report = evaluate(model, features, labels, thetas)
    regime = damkohler(spec, regimes)
    row: Dict[str, Any] = {"k": spec.k, "de": spec.de, "da": regime.da, "regime": regime.regime.value, "mse": report.mse}
    for theta in thetas:
        row[threshold_column(theta)] = report.threshold_accuracy[float(theta)]
    return row


def coefficient_sweep(
    model: ConcentrationModel,
    field: str,
    values: Optional[Iterable[float]] = None,
    base: ProblemSpec = COEFFICIENT_BASE,
    thetas: Sequence[float] = (2.0, 1.0, 0.5),
    settings: LatticeSettings = LatticeSettings(),
    similarity: Optional[ParameterRanges] = None,
    regimes: RegimeThresholds = DEFAULT_THRESHOLDS,
    jobs: int = 1,
) -> pd.DataFrame:
    """Accuracy of `model` as k or de varies with the other fields held at `base`.

    Args:
        model: Model under test
        field: "k" or "de"
        values: Values of the varied field (defaults to the table's five)
        base: Spec supplying the fixed fields
        thetas: Thresholds, mol/m^3
        settings: Test lattice
        similarity: When given, queries are moved into these ranges first
        regimes: Da cut-offs for the regime column
        jobs: Worker processes across values

    Returns:
        One row per value, in input order
    """
    if field not in ("k", "de"):
        raise ValueError(f"field must be 'k' or 'de', got {field!r}")
    if values is None:
        values = K_SWEEP_VALUES if field == "k" else DE_SWEEP_VALUES
    values = [float(v) for v in values]
    if not values or any(v <= 0 for v in values):
        raise ValueError("Sweep values must be positive and non-empty")

    specs = [base.model_copy(update={field: v}) for v in values]
    logger.info(f"Sweeping {field} over {len(specs)} value(s)")
    rows = _parallel_map(
        partial(
            _evaluate_spec, model=model, thetas=list(thetas), settings=settings, similarity=similarity, regimes=regimes
        ),
        specs,
        jobs,
    )
    frame = pd.DataFrame(rows)
    return frame[[field, "da", "regime", "mse"] + [threshold_column(t) for t in thetas]]


def damkohler_sweep(
    model: ConcentrationModel,
    de_values: Iterable[float] = DAMKOHLER_DE_VALUES,
    base: ProblemSpec = DAMKOHLER_BASE,
    thetas: Sequence[float] = (0.5, 1.0, 2.0),
    settings: LatticeSettings = LatticeSettings(),
    similarity: Optional[ParameterRanges] = None,
    regimes: RegimeThresholds = DEFAULT_THRESHOLDS,
    jobs: int = 1,
) -> pd.DataFrame:
    """Accuracy across de at fixed c0, L and k; rows sorted by Da descending.

    Unless `settings.edges` is set, the lattice leaves out the walls and t = 0,
    where C is fixed by the boundary and initial data.
    """
    if settings.edges is None:
        settings = settings.model_copy(update={"edges": False})
    frame = coefficient_sweep(model, "de", de_values, base, thetas, settings, similarity, regimes, jobs)
    return frame.sort_values("da", ascending=False, kind="stable").reset_index(drop=True)


def _train_count(count: int, full: Dataset, settings: GenerationSettings, config: NetworkConfig, thetas: Sequence[float]) -> Dict[str, Any]:
    splits = assign_splits(count, settings.validation_fraction, settings.test_fraction)
    subset = full.subset(len(splits[Split.TRAIN]), len(splits[Split.VALIDATION]))
    train_features, _ = subset.split_arrays(Split.TRAIN)
    subset.norm = compute_norm_stats(train_features, settings.norm_mode, settings.log_features)

    params, report = train(subset, config)
    model = NetworkModel(Checkpoint(params=params, config=config, norm=subset.norm))
    reports = evaluate_dataset(model, subset, thetas)
    test = reports[Split.TEST]
    row: Dict[str, Any] = {
        "batches": count,
        "train_mse": reports[Split.TRAIN].mse,
        "val_mse": reports[Split.VALIDATION].mse,
        "test_mse": test.mse,
    }
    for theta in thetas:
        row[threshold_column(theta)] = test.threshold_accuracy[float(theta)]
    logger.info(f"{count} batches: test MSE {test.mse:.4g} after {report.epochs_run} epoch(s)")
    return row


def batch_sweep(
    settings: GenerationSettings,
    counts: Sequence[int] = BATCH_SWEEP_COUNTS,
    config: NetworkConfig = NetworkConfig(),
    thetas: Sequence[float] = (2.0, 1.0),
    jobs: int = 1,
) -> pd.DataFrame:
    """Train one model per batch count on nested subsets of one dataset.

    The dataset is generated once with max(counts) batches. Every count takes
    the leading train and validation batches of its own split and is tested
    on the shared test split.
    """
    counts = [int(c) for c in counts]
    if not counts or any(b <= a for a, b in zip(counts, counts[1:])):
        raise ValueError(f"Batch counts must be non-empty and strictly ascending, got {counts}")
    if counts[0] < 2 or counts[-1] < 3:
        raise ValueError("Each count needs a validation batch and the largest needs a test batch")

    full = generate(settings.model_copy(update={"n_batches": counts[-1]}), jobs=jobs)
    rows = _parallel_map(
        partial(_train_count, full=full, settings=settings, config=config, thetas=list(thetas)),
        counts,
        jobs,
    )
    return pd.DataFrame(rows)


def file_sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_sweep(frame: pd.DataFrame, path: Path, metadata: Dict[str, Any]) -> Path:
    """Write the table as CSV (percentages to two decimals) and a `.json` sidecar.

    Returns:
        Path of the sidecar
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = frame.copy()
    thr = [c for c in out.columns if c.startswith("thr_")]
    out[thr] = out[thr].round(2)
    out.to_csv(path, index=False)
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(metadata, indent=2, default=str) + "\n")
    logger.info(f"Sweep table written to {path}")
    return sidecar
