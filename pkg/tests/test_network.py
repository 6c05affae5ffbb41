"""Tests for activations, forward pass, loss and gradients."""

import math

import numpy as np
import pytest

from rdlab.errors import NonFiniteError
from rdlab.surrogate.activations import activate, activate_derivative
from rdlab.surrogate.models import Activation, NetworkConfig, NetworkParams
from rdlab.surrogate.network import backward, forward, grad_check, init_params, loss, penalty


def _random_params(sizes, seed=0) -> NetworkParams:
    """Zero-mean weights so activations stay away from saturation."""
    rng = np.random.default_rng(seed)
    weights = [rng.normal(0.0, 1.0 / math.sqrt(n_in), (n_out, n_in)) for n_in, n_out in zip(sizes[:-1], sizes[1:])]
    biases = [rng.normal(0.0, 0.1, n_out) for n_out in sizes[1:]]
    return NetworkParams(weights, biases)


def test_activation_values():
    """Sigmoid(0) = 0.5 and LeakyReLU(-1) = -0.001."""
    assert activate(0.0, Activation.SIGMOID) == 0.5
    assert activate(-1.0, Activation.LEAKY_RELU) == pytest.approx(-0.001)
    assert activate(2.5, Activation.LEAKY_RELU) == 2.5
    assert activate(-3.0, Activation.IDENTITY) == -3.0
    assert isinstance(activate(1.0, Activation.SIGMOID), float)


@pytest.mark.parametrize("kind", list(Activation))
def test_activation_derivatives_match_central_differences(kind):
    """100 random points, relative error below 1e-6."""
    rng = np.random.default_rng(2)
    points = rng.uniform(-5.0, 5.0, 100)
    points = points[np.abs(points) > 1e-3]
    h = 1e-5
    for x in points:
        numeric = (activate(x + h, kind) - activate(x - h, kind)) / (2 * h)
        analytic = activate_derivative(x, kind)
        assert abs(numeric - analytic) <= 1e-6 * abs(analytic)


def test_leaky_relu_slope_at_zero():
    """The kink takes slope 1."""
    assert activate_derivative(0.0, Activation.LEAKY_RELU) == 1.0


def test_init_params():
    """Deterministic, negative biases, weights scaled by fan-in."""
    config = NetworkConfig()
    first = init_params(config, np.random.default_rng(3))
    second = init_params(config, np.random.default_rng(3))
    for a, b in zip(first.arrays(), second.arrays()):
        assert np.array_equal(a, b)
    assert all(np.all(b < 0) and np.all(b >= -0.1) for b in first.biases)
    assert first.layer_sizes == [6, 64, 64, 32, 1]
    w = first.weights[1]
    assert w.shape == (64, 64)
    assert np.all(w >= 0) and np.all(w < 1 / 8)


def test_unscaled_init_draws_unit_interval():
    """scaled_init=False keeps the raw [0, 1) draw."""
    params = init_params(NetworkConfig(scaled_init=False), np.random.default_rng(0))
    assert params.weights[1].max() > 1 / 8
    assert np.all(params.weights[1] < 1)


def test_config_validation():
    """Input width 6, output width 1, at least one hidden layer."""
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=[6, 1])
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=[5, 4, 1])
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=[6, 0, 1])
    assert NetworkConfig.with_hidden([8]).layer_sizes == [6, 8, 1]
    assert NetworkConfig(**{"lambda": 0.5}).l2 == 0.5


def test_zero_network_outputs_half():
    """W = 0, B = 0 with a Sigmoid head gives 0.5 everywhere."""
    params = NetworkParams([np.zeros((1, 6))], [np.zeros(1)])
    predictions, _ = forward(params, np.random.default_rng(0).normal(size=(7, 6)))
    np.testing.assert_array_equal(predictions, np.full(7, 0.5))


def test_identical_inputs_give_identical_outputs():
    """m copies of one row give m equal predictions in (0, 1)."""
    params = _random_params([6, 16, 8, 1])
    row = np.random.default_rng(1).normal(size=6)
    predictions, _ = forward(params, np.tile(row, (5, 1)))
    assert predictions.shape == (5,)
    np.testing.assert_allclose(predictions, predictions[0], rtol=1e-14)
    assert 0.0 < predictions[0] < 1.0


def test_forward_rejects_non_finite_input():
    """Infinite inputs signal divergence."""
    params = _random_params([6, 4, 1])
    features = np.ones((2, 6))
    features[1, 2] = np.inf
    with pytest.raises(NonFiniteError):
        forward(params, features)


def test_forward_rejects_wrong_width():
    """Inputs must have six columns."""
    with pytest.raises(ValueError):
        forward(_random_params([6, 4, 1]), np.ones((2, 5)))


def test_loss_values():
    """Zero for a perfect fit; 1 for (1, 1) vs (0, 0); penalty adds exactly."""
    params = _random_params([6, 4, 1])
    assert loss(np.array([0.2, 0.3]), np.array([0.2, 0.3]), params, 0.0) == 0.0
    assert loss(np.array([1.0, 1.0]), np.array([0.0, 0.0]), params, 0.0) == 1.0
    plain = loss(np.array([1.0, 1.0]), np.array([0.0, 0.0]), params, 0.0)
    regularized = loss(np.array([1.0, 1.0]), np.array([0.0, 0.0]), params, 0.3)
    expected = 0.3 / 4.0 * sum(float(np.sum(w * w)) for w in params.weights)
    assert regularized - plain == pytest.approx(expected, rel=1e-12)
    assert penalty(params, 0.3, 2) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        loss(np.array([]), np.array([]), params, 0.0)


def test_bias_only_linear_gradient():
    """With W = 0 and identity output, dJ/dB = sum 2(Y' - Y)/m."""
    params = NetworkParams([np.zeros((1, 6))], [np.array([0.4])])
    features = np.random.default_rng(0).normal(size=(4, 6))
    targets = np.array([0.0, 1.0, 0.5, 0.2])
    _, cache = forward(params, features, output=Activation.IDENTITY)
    _, grad_b = backward(params, cache, targets, 0.0)
    assert grad_b[0][0] == pytest.approx(np.sum(2 * (0.4 - targets) / 4))


def test_l2_gradient_term():
    """The penalty contributes lambda * W / m to each weight gradient."""
    params = _random_params([6, 5, 1])
    features = np.random.default_rng(1).normal(size=(10, 6))
    targets = np.random.default_rng(2).uniform(size=10)
    _, cache = forward(params, features)
    plain, _ = backward(params, cache, targets, 0.0)
    regularized, _ = backward(params, cache, targets, 0.7)
    for w, g0, g1 in zip(params.weights, plain, regularized):
        np.testing.assert_allclose(g1 - g0, 0.7 * w / 10, rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("sizes", [[6, 8, 1], [6, 64, 64, 32, 1]])
def test_grad_check(sizes):
    """Backpropagation agrees with central differences on 20 samples."""
    params = _random_params(sizes, seed=len(sizes))
    rng = np.random.default_rng(5)
    features = rng.normal(size=(20, 6))
    predictions, _ = forward(params, features)
    targets = np.clip(predictions + rng.normal(0.0, 0.05, 20), 0.0, 1.0)
    assert grad_check(params, features, targets, l2=1e-3, epsilon=1e-6) < 1e-5


def test_grad_check_zero_network():
    """Vanishing gradients count as agreement."""
    params = NetworkParams([np.zeros((1, 6))], [np.zeros(1)])
    features = np.zeros((3, 6))
    assert grad_check(params, features, np.zeros(3), output=Activation.IDENTITY) == 0.0


def test_grad_check_detects_corrupted_gradient():
    """A 10% error in the gradients is flagged."""
    params = _random_params([6, 8, 1])
    features = np.random.default_rng(6).normal(size=(20, 6))
    targets = np.random.default_rng(7).uniform(size=20)
    _, cache = forward(params, features)
    grad_w, grad_b = backward(params, cache, targets, 0.0)
    corrupted = ([1.1 * g for g in grad_w], [1.1 * g for g in grad_b])
    assert grad_check(params, features, targets, grads=corrupted) > 1e-2
