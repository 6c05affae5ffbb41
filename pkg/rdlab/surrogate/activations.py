"""Activation functions and their derivatives."""

from typing import Union

import numpy as np
from scipy.special import expit

from .models import Activation

LEAKY_SLOPE = 0.001

ArrayLike = Union[float, np.ndarray]


def activate(x: ArrayLike, kind: Activation) -> ArrayLike:
    """Apply an activation element-wise; scalars in, scalars out."""
    if kind == Activation.SIGMOID:
        out = expit(x)
    elif kind == Activation.LEAKY_RELU:
        out = np.where(x >= 0, x, LEAKY_SLOPE * np.asarray(x))
    elif kind == Activation.IDENTITY:
        out = np.asarray(x, dtype=float)
    else:
        raise ValueError(f"Unknown activation: {kind}")
    return float(out) if np.ndim(out) == 0 else out


def activate_derivative(x: ArrayLike, kind: Activation) -> ArrayLike:
    """Derivative with respect to the pre-activation x.

    LeakyReLU uses slope 1 at x = 0.
    """
    if kind == Activation.SIGMOID:
        s = expit(x)
        out = s * (1.0 - s)
    elif kind == Activation.LEAKY_RELU:
        out = np.where(np.asarray(x) >= 0, 1.0, LEAKY_SLOPE)
    elif kind == Activation.IDENTITY:
        out = np.ones_like(np.asarray(x, dtype=float))
    else:
        raise ValueError(f"Unknown activation: {kind}")
    return float(out) if np.ndim(out) == 0 else out
