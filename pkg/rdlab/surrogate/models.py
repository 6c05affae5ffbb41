"""Data models for the surrogate network."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..data.models import FEATURE_NAMES

DEFAULT_LAYER_SIZES = [len(FEATURE_NAMES), 64, 64, 32, 1]


class Activation(str, Enum):
    """Element-wise activation functions."""
    LEAKY_RELU = "leaky_relu"
    SIGMOID = "sigmoid"
    IDENTITY = "identity"


class AdamConfig(BaseModel):
    """Adam hyperparameters."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(1e-3, gt=0)
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    epsilon: float = Field(1e-8, gt=0)


class NetworkConfig(BaseModel):
    """Architecture and training hyperparameters of a surrogate network."""

    model_config = ConfigDict(populate_by_name=True)

    layer_sizes: List[int] = Field(default_factory=lambda: list(DEFAULT_LAYER_SIZES))
    hidden_activation: Activation = Activation.LEAKY_RELU
    output_activation: Activation = Activation.SIGMOID
    l2: float = Field(1e-4, ge=0, alias="lambda", description="L2 coefficient on weights")
    adam: AdamConfig = Field(default_factory=AdamConfig)
    epochs: int = Field(100, ge=0)
    seed: int = 0
    batch_size: int = Field(256, ge=1, description="Samples per Adam step")
    scaled_init: bool = Field(True, description="Scale initial weights by 1/sqrt(fan_in)")
    patience: Optional[int] = Field(None, ge=1, description="Stop after this many epochs without improvement")
    log_every: int = Field(10, ge=1)

    @model_validator(mode="after")
    def _check_layers(self) -> "NetworkConfig":
        sizes = self.layer_sizes
        if len(sizes) < 3:
            raise ValueError("Network needs at least one hidden layer")
        if any(n < 1 for n in sizes):
            raise ValueError("Every layer needs at least one unit")
        if sizes[0] != len(FEATURE_NAMES) or sizes[-1] != 1:
            raise ValueError(f"Layer sizes must start at {len(FEATURE_NAMES)} and end at 1, got {sizes}")
        return self

    @classmethod
    def with_hidden(cls, hidden: List[int], **kwargs) -> "NetworkConfig":
        """Config for the given hidden widths between the 6 inputs and 1 output."""
        return cls(layer_sizes=[len(FEATURE_NAMES), *hidden, 1], **kwargs)


@dataclass
class NetworkParams:
    """Weights W[l] of shape (n_l, n_{l-1}) and biases B[l] of shape (n_l,)."""
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must have one entry per layer")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"Layer {l + 1}: weight {w.shape} and bias {b.shape} do not match")
            if l > 0 and w.shape[1] != self.weights[l - 1].shape[0]:
                raise ValueError(f"Layer {l + 1} expects {w.shape[1]} inputs, previous layer has {self.weights[l - 1].shape[0]}")

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self) -> "NetworkParams":
        return NetworkParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def arrays(self) -> List[np.ndarray]:
        """All parameter arrays, weights first."""
        return [*self.weights, *self.biases]

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


@dataclass
class ForwardCache:
    """Pre-activations Z[l] and activations A[l] (A[0] is the input)."""
    pre_activations: List[np.ndarray]
    activations: List[np.ndarray]
    hidden_activation: Activation
    output_activation: Activation


@dataclass
class AdamState:
    """First and second moments per parameter array, weights first."""
    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    config: AdamConfig = field(default_factory=AdamConfig)

    @classmethod
    def zeros_like(cls, params: NetworkParams, config: Optional[AdamConfig] = None) -> "AdamState":
        arrays = params.arrays()
        return cls(
            m=[np.zeros_like(a) for a in arrays],
            v=[np.zeros_like(a) for a in arrays],
            config=config or AdamConfig(),
        )


@dataclass
class TrainReport:
    """Per-epoch losses (objective J including the L2 term) and run summary."""
    train_loss: List[float]
    val_loss: List[float]
    wall_time: float
    params: NetworkParams
    initial_val_loss: float
    best_epoch: Optional[int] = None  # 0-based; None when no epoch ran

    @property
    def epochs_run(self) -> int:
        return len(self.train_loss)
