"""Versioned JSON checkpoints.

Document layout (format_version 1):

    {
      "format_version": 1,
      "seed": <int>,
      "config": {<NetworkConfig fields, "lambda" for the L2 coefficient>},
      "layers": [{"weights": [[row-major W[l]]], "biases": [B[l]]}, ...],
      "norm": {"mu": [...], "sigma_sq": [...], "mode": ..., "log_features": [...]}
    }

Floats are written with repr precision, so load -> save reproduces the file.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from .models import NetworkConfig, NetworkParams
from ..data.models import NormStats
from ..errors import MalformedFileError, VersionMismatchError

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1


class LayerArrays(BaseModel):
    weights: List[List[float]]
    biases: List[float]


class CheckpointDocument(BaseModel):
    """On-disk schema of a checkpoint."""

    format_version: int = CHECKPOINT_FORMAT_VERSION
    seed: int
    config: NetworkConfig
    layers: List[LayerArrays]
    norm: NormStats

    @model_validator(mode="after")
    def _check_layers(self) -> "CheckpointDocument":
        sizes = self.config.layer_sizes
        if len(self.layers) != len(sizes) - 1:
            raise ValueError(f"Config has {len(sizes) - 1} layers, document has {len(self.layers)}")
        for l, layer in enumerate(self.layers):
            fan_in, fan_out = sizes[l], sizes[l + 1]
            if len(layer.weights) != fan_out or any(len(row) != fan_in for row in layer.weights):
                raise ValueError(f"Layer {l + 1} weights are not {fan_out}x{fan_in}")
            if len(layer.biases) != fan_out:
                raise ValueError(f"Layer {l + 1} has {len(layer.biases)} biases, expected {fan_out}")
        return self


@dataclass
class Checkpoint:
    """A trained network with everything needed to query it."""
    params: NetworkParams
    config: NetworkConfig
    norm: NormStats


def save_checkpoint(params: NetworkParams, config: NetworkConfig, norm: NormStats, path: Path) -> None:
    """Write params, config and normalization statistics to `path`."""
    if params.layer_sizes != config.layer_sizes:
        raise ValueError(f"Params have layers {params.layer_sizes}, config says {config.layer_sizes}")
    document = CheckpointDocument(
        seed=config.seed,
        config=config,
        layers=[
            LayerArrays(weights=w.tolist(), biases=b.tolist())
            for w, b in zip(params.weights, params.biases)
        ],
        norm=norm,
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document.model_dump(mode="json", by_alias=True), indent=2) + "\n")
    logger.info(f"Checkpoint written to {path}")


def load_checkpoint(path: Path) -> Checkpoint:
    """Read a checkpoint written by save_checkpoint.

    Raises:
        VersionMismatchError: if format_version is not the current one
        MalformedFileError: if the document cannot be parsed or is inconsistent
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise MalformedFileError(str(path), e.msg, line=e.lineno)
    except OSError as e:
        raise MalformedFileError(str(path), str(e))
    if not isinstance(raw, dict):
        raise MalformedFileError(str(path), "top level is not an object")

    version = raw.get("format_version")
    if version != CHECKPOINT_FORMAT_VERSION:
        raise VersionMismatchError(version, CHECKPOINT_FORMAT_VERSION)
    try:
        document = CheckpointDocument.model_validate(raw)
    except ValidationError as e:
        raise MalformedFileError(str(path), str(e))

    params = NetworkParams(
        weights=[np.array(layer.weights, dtype=float) for layer in document.layers],
        biases=[np.array(layer.biases, dtype=float) for layer in document.layers],
    )
    if not params.is_finite():
        raise MalformedFileError(str(path), "non-finite parameter values")
    logger.debug(f"Loaded checkpoint {path} with layers {document.config.layer_sizes}")
    return Checkpoint(params=params, config=document.config, norm=document.norm)
