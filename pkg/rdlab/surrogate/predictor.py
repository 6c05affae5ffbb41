"""Predictions from trained networks."""

from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .base import ConcentrationModel
from .checkpoint import Checkpoint, load_checkpoint
from .models import Activation, NetworkParams
from .network import forward
from ..data.models import NormStats
from ..data.normalization import normalize


def predict_many(
    params: NetworkParams,
    norm: NormStats,
    features: np.ndarray,
    hidden: Activation = Activation.LEAKY_RELU,
    output: Activation = Activation.SIGMOID,
) -> np.ndarray:
    """c0 * forward(normalize(features)) for each raw (m, 6) row."""
    rows = np.atleast_2d(np.asarray(features, dtype=float))
    relative, _ = forward(params, normalize(rows, norm), hidden, output)
    return rows[:, 0] * relative


def predict(params: NetworkParams, norm: NormStats, features: Sequence[float]) -> float:
    """Concentration in mol/m^3 for one raw (c0, L, x, t, k, de) tuple."""
    return float(predict_many(params, norm, np.asarray(features, dtype=float)[None, :])[0])


class NetworkModel(ConcentrationModel):
    """Checkpoint-backed surrogate."""

    name = "network"

    def __init__(self, checkpoint: Checkpoint):
        self.checkpoint = checkpoint

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "NetworkModel":
        return cls(load_checkpoint(Path(path)))

    def predict(self, features: np.ndarray) -> np.ndarray:
        cfg = self.checkpoint.config
        return predict_many(
            self.checkpoint.params,
            self.checkpoint.norm,
            features,
            cfg.hidden_activation,
            cfg.output_activation,
        )
