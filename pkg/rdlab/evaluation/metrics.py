"""Error metrics over predicted and reference concentrations."""

import logging
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .models import EvalReport
from ..data.models import Dataset, Split
from ..errors import EmptyInputError
from ..surrogate.base import ConcentrationModel

logger = logging.getLogger(__name__)

DEFAULT_THETAS = (0.5, 1.0, 2.0)


def _pair(predictions: Sequence[float], targets: Sequence[float]):
    y_hat = np.asarray(predictions, dtype=float).ravel()
    y = np.asarray(targets, dtype=float).ravel()
    if y_hat.size == 0 or y.size == 0:
        raise EmptyInputError("Metrics need at least one prediction")
    if y_hat.shape != y.shape:
        raise ValueError(f"Got {y_hat.size} predictions for {y.size} targets")
    return y_hat, y


def mse(predictions: Sequence[float], targets: Sequence[float]) -> float:
    """Mean squared difference."""
    y_hat, y = _pair(predictions, targets)
    return float(np.mean((y_hat - y) ** 2))


def threshold_accuracy(predictions: Sequence[float], targets: Sequence[float], theta: float) -> float:
    """Percentage of predictions strictly within theta of their target."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    y_hat, y = _pair(predictions, targets)
    return 100.0 * float(np.count_nonzero(np.abs(y - y_hat) < theta)) / y.size


def evaluate(
    model: ConcentrationModel,
    features: np.ndarray,
    labels: np.ndarray,
    thetas: Iterable[float] = DEFAULT_THETAS,
    split: Optional[str] = None,
) -> EvalReport:
    """Predict once and compute the MSE and every threshold accuracy."""
    thetas = sorted(set(float(t) for t in thetas))
    if not thetas:
        raise ValueError("evaluate needs at least one threshold")
    labels = np.asarray(labels, dtype=float)
    if labels.size == 0:
        raise EmptyInputError("Cannot evaluate on an empty set")
    predictions = model.predict(features)
    report = EvalReport(
        mse=mse(predictions, labels),
        threshold_accuracy={theta: threshold_accuracy(predictions, labels, theta) for theta in thetas},
        n=int(labels.size),
        split=split,
    )
    logger.debug(f"Evaluated {report.n} samples ({split or 'unnamed'}): MSE {report.mse:.6g}")
    return report


def evaluate_dataset(
    model: ConcentrationModel, dataset: Dataset, thetas: Iterable[float] = DEFAULT_THETAS
) -> Dict[Split, EvalReport]:
    """One report per non-empty split."""
    thetas = list(thetas)
    reports = {}
    for split in Split:
        features, labels = dataset.split_arrays(split)
        if len(labels):
            reports[split] = evaluate(model, features, labels, thetas, split.value)
    if not reports:
        raise EmptyInputError("Dataset has no samples to evaluate")
    return reports
