"""Feature normalization.

SecondMoment uses mu = mean(X) and sigma^2 = mean(X^2) on raw values, with
x'' = (x - mu) / sigma^2. Standard is the z-score
(x - mu) / sigma with sigma^2 the centred variance. Features named in
log_features are replaced by their log10 before either recipe.
"""

from typing import Iterable

import numpy as np

from .models import FEATURE_NAMES, NormMode, NormStats
from ..errors import DegenerateFeatureError

DEFAULT_LOG_FEATURES = ("k", "de")


def _log_mask(log_features: Iterable[str]) -> np.ndarray:
    names = set(log_features)
    return np.array([name in names for name in FEATURE_NAMES])


def _to_model_space(features: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.array(features, dtype=float, copy=True)
    out[..., mask] = np.log10(out[..., mask])
    return out


def compute_norm_stats(
    features: np.ndarray,
    mode: NormMode = NormMode.STANDARD,
    log_features: Iterable[str] = DEFAULT_LOG_FEATURES,
) -> NormStats:
    """Statistics over a (m, 6) training matrix.

    Raises:
        DegenerateFeatureError: if any feature column is constant.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] == 0 or features.shape[1] != len(FEATURE_NAMES):
        raise ValueError(f"Expected a non-empty (m, {len(FEATURE_NAMES)}) matrix, got {features.shape}")
    log_features = list(log_features)
    values = _to_model_space(features, _log_mask(log_features))
    for j, name in enumerate(FEATURE_NAMES):
        if np.all(values[:, j] == values[0, j]):
            raise DegenerateFeatureError(name)

    mu = values.mean(axis=0)
    if mode == NormMode.SECOND_MOMENT:
        sigma_sq = np.mean(values**2, axis=0)
    else:
        sigma_sq = values.var(axis=0)
    return NormStats(mu=mu.tolist(), sigma_sq=sigma_sq.tolist(), mode=mode, log_features=log_features)


def _scale(stats: NormStats) -> np.ndarray:
    sigma_sq = np.asarray(stats.sigma_sq)
    return sigma_sq if stats.mode == NormMode.SECOND_MOMENT else np.sqrt(sigma_sq)


def normalize(features: np.ndarray, stats: NormStats) -> np.ndarray:
    """Map raw features, shape (6,) or (m, 6), to network inputs."""
    values = _to_model_space(features, _log_mask(stats.log_features))
    return (values - np.asarray(stats.mu)) / _scale(stats)


def denormalize(normalized: np.ndarray, stats: NormStats) -> np.ndarray:
    """Inverse of normalize."""
    values = np.asarray(normalized, dtype=float) * _scale(stats) + np.asarray(stats.mu)
    mask = _log_mask(stats.log_features)
    values[..., mask] = 10.0 ** values[..., mask]
    return values
