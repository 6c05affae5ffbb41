"""Fully connected network: initialization, forward pass, loss and gradients.

Samples are rows. For layer l, Z[l] = A[l-1] @ W[l].T + B[l] and
A[l] = g(Z[l]), with g LeakyReLU on hidden layers and the output activation
on the last one.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from .activations import activate, activate_derivative
from .models import Activation, ForwardCache, NetworkConfig, NetworkParams
from ..errors import NonFiniteError

logger = logging.getLogger(__name__)

BIAS_RANGE = (-0.1, 0.0)


def init_params(config: NetworkConfig, rng: np.random.Generator) -> NetworkParams:
    """Draw W uniform in [0, 1), optionally scaled by 1/sqrt(fan_in), and B in [-0.1, 0)."""
    weights, biases = [], []
    sizes = config.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w = rng.random((fan_out, fan_in))
        if config.scaled_init:
            w /= math.sqrt(fan_in)
        lo, hi = BIAS_RANGE
        b = lo + (hi - lo) * rng.random(fan_out)
        weights.append(w)
        biases.append(b)
    return NetworkParams(weights, biases)


def forward(
    params: NetworkParams,
    features: np.ndarray,
    hidden: Activation = Activation.LEAKY_RELU,
    output: Activation = Activation.SIGMOID,
) -> Tuple[np.ndarray, ForwardCache]:
    """Run a (m, 6) batch of normalized features through the network.

    Returns:
        Predictions of shape (m,) and the cache needed by backward

    Raises:
        NonFiniteError: if any activation is NaN or infinite
    """
    a = np.atleast_2d(np.asarray(features, dtype=float))
    if a.shape[1] != params.weights[0].shape[1]:
        raise ValueError(f"Expected {params.weights[0].shape[1]} features, got {a.shape[1]}")
    zs: List[np.ndarray] = []
    activations: List[np.ndarray] = [a]
    last = len(params.weights) - 1
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        with np.errstate(over="ignore", invalid="ignore"):
            z = a @ w.T + b
        a = activate(z, output if l == last else hidden)
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(a))):
            raise NonFiniteError(f"Non-finite activation in layer {l + 1}")
        zs.append(z)
        activations.append(a)
    return a[:, 0], ForwardCache(zs, activations, hidden, output)


def penalty(params: NetworkParams, l2: float, m: int) -> float:
    """(lambda/2m) * sum of squared weights; biases are not penalized."""
    if l2 == 0.0:
        return 0.0
    return l2 / (2.0 * m) * float(sum(np.sum(w * w) for w in params.weights))


def loss(predictions: np.ndarray, targets: np.ndarray, params: NetworkParams, l2: float) -> float:
    """(1/m)||Y' - Y||^2 + (lambda/2m) sum ||W||^2."""
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape or predictions.size == 0:
        raise ValueError(f"Predictions {predictions.shape} and targets {targets.shape} must match and be non-empty")
    m = predictions.size
    return float(np.sum((predictions - targets) ** 2)) / m + penalty(params, l2, m)


def backward(
    params: NetworkParams, cache: ForwardCache, targets: np.ndarray, l2: float
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Exact gradients of `loss` with respect to every W[l] and B[l]."""
    targets = np.asarray(targets, dtype=float)
    m = targets.size
    predictions = cache.activations[-1][:, 0]
    delta = (2.0 / m) * (predictions - targets)[:, None]

    last = len(params.weights) - 1
    grad_w: List[np.ndarray] = [np.empty(0)] * len(params.weights)
    grad_b: List[np.ndarray] = [np.empty(0)] * len(params.biases)
    for l in range(last, -1, -1):
        kind = cache.output_activation if l == last else cache.hidden_activation
        dz = delta * activate_derivative(cache.pre_activations[l], kind)
        grad_w[l] = dz.T @ cache.activations[l] + (l2 / m) * params.weights[l]
        grad_b[l] = dz.sum(axis=0)
        delta = dz @ params.weights[l]
    return grad_w, grad_b


def grad_check(
    params: NetworkParams,
    features: np.ndarray,
    targets: np.ndarray,
    l2: float = 0.0,
    epsilon: float = 1e-6,
    hidden: Activation = Activation.LEAKY_RELU,
    output: Activation = Activation.SIGMOID,
    grads: Optional[Tuple[List[np.ndarray], List[np.ndarray]]] = None,
) -> float:
    """Largest relative error between backward and central differences.

    The error of each parameter array is ||g - g_num|| / (||g|| + ||g_num||),
    taken as 0 when both gradients vanish.

    Args:
        params: Parameters to check at
        features: Normalized inputs, shape (m, 6)
        targets: Targets, shape (m,)
        l2: L2 coefficient
        epsilon: Central-difference step
        hidden: Hidden activation
        output: Output activation
        grads: Analytic gradients to check instead of computing them

    Returns:
        Maximum relative error over all parameter arrays
    """
    targets = np.asarray(targets, dtype=float)
    if targets.size == 0:
        raise ValueError("grad_check needs a non-empty batch")
    if grads is None:
        _, cache = forward(params, features, hidden, output)
        grads = backward(params, cache, targets, l2)
    analytic = [*grads[0], *grads[1]]

    probe = params.copy()

    def objective() -> float:
        predictions, _ = forward(probe, features, hidden, output)
        return loss(predictions, targets, probe, l2)

    worst = 0.0
    for array, expected in zip(probe.arrays(), analytic):
        numeric = np.zeros_like(array)
        flat = array.reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + epsilon
            plus = objective()
            flat[i] = saved - epsilon
            minus = objective()
            flat[i] = saved
            numeric.reshape(-1)[i] = (plus - minus) / (2.0 * epsilon)
        denominator = np.linalg.norm(expected) + np.linalg.norm(numeric)
        if denominator > 0.0:
            worst = max(worst, float(np.linalg.norm(expected - numeric) / denominator))
    logger.debug(f"Gradient check: max relative error {worst:.3e}")
    return worst
