"""Tests for Adam and the training loop."""

import numpy as np
import pandas as pd
import pytest

from rdlab.data.generator import generate
from rdlab.data.models import Split
from rdlab.surrogate.models import AdamConfig, AdamState, NetworkConfig, NetworkParams
from rdlab.surrogate.network import init_params
from rdlab.surrogate.optimizer import adam_step
from rdlab.surrogate.training import relative_targets, save_history, train


def _params() -> NetworkParams:
    return init_params(NetworkConfig(layer_sizes=[6, 4, 1]), np.random.default_rng(0))


def _grads_like(params: NetworkParams, value: float):
    return [np.full_like(w, value) for w in params.weights], [np.full_like(b, value) for b in params.biases]


def test_adam_first_step_moves_by_alpha():
    """From zero moments the first update is -alpha * g / (|g| + eps)."""
    params = _params()
    state = AdamState.zeros_like(params)
    rng = np.random.default_rng(1)
    grads = ([rng.normal(size=w.shape) for w in params.weights], [rng.normal(size=b.shape) for b in params.biases])
    updated, new_state = adam_step(params, grads, state)
    assert new_state.step == 1
    for before, after, g in zip(params.arrays(), updated.arrays(), [*grads[0], *grads[1]]):
        np.testing.assert_allclose(after - before, -1e-3 * g / (np.abs(g) + 1e-8), rtol=1e-6)


def test_adam_zero_gradient_keeps_params():
    """Zero gradients never move anything."""
    params = _params()
    state = AdamState.zeros_like(params)
    current = params
    for _ in range(5):
        current, state = adam_step(current, _grads_like(params, 0.0), state)
    for a, b in zip(params.arrays(), current.arrays()):
        assert np.array_equal(a, b)
    assert state.step == 5


def test_adam_leaves_inputs_untouched():
    """The step returns new objects."""
    params = _params()
    snapshot = params.copy()
    state = AdamState.zeros_like(params, AdamConfig(alpha=0.1))
    adam_step(params, _grads_like(params, 1.0), state)
    assert state.step == 0
    assert all(np.all(m == 0) for m in state.m)
    for a, b in zip(params.arrays(), snapshot.arrays()):
        assert np.array_equal(a, b)


def test_adam_trajectories_are_reproducible():
    """Same start and gradients, same path."""
    def run():
        params = _params()
        state = AdamState.zeros_like(params)
        for i in range(10):
            params, state = adam_step(params, _grads_like(params, 0.1 * (i - 5)), state)
        return params

    for a, b in zip(run().arrays(), run().arrays()):
        assert np.array_equal(a, b)


def test_adam_rejects_mismatched_gradients():
    """Gradient list must mirror the parameters."""
    params = _params()
    with pytest.raises(ValueError):
        adam_step(params, (params.weights, []), AdamState.zeros_like(params))


def test_relative_targets():
    """C/C0 with 0 where c0 is 0."""
    features = np.array([[50.0, 0.05, 0, 1, 1e-7, 1e-9], [0.0, 0.05, 0, 1, 1e-7, 1e-9]])
    np.testing.assert_array_equal(relative_targets(features, np.array([25.0, 0.0])), [0.5, 0.0])


def test_zero_epochs_returns_initial_params(small_dataset):
    """epochs = 0 gives the initial draw and an empty history."""
    config = NetworkConfig(layer_sizes=[6, 8, 1], epochs=0, seed=4)
    params, report = train(small_dataset, config)
    initial = init_params(config, np.random.default_rng(4))
    for a, b in zip(params.arrays(), initial.arrays()):
        assert np.array_equal(a, b)
    assert report.train_loss == [] and report.val_loss == []
    assert report.epochs_run == 0
    assert report.best_epoch is None


def test_training_is_deterministic(small_dataset):
    """Fixed seed, identical parameters."""
    config = NetworkConfig(layer_sizes=[6, 8, 4, 1], epochs=5, seed=2, batch_size=32)
    first, first_report = train(small_dataset, config)
    second, second_report = train(small_dataset, config)
    for a, b in zip(first.arrays(), second.arrays()):
        assert np.array_equal(a, b)
    assert first_report.train_loss == second_report.train_loss


def test_training_reduces_loss(small_dataset):
    """A small network fits the training split better after some epochs."""
    config = NetworkConfig(
        layer_sizes=[6, 16, 16, 1], epochs=200, seed=0, batch_size=64, adam=AdamConfig(alpha=1e-2), **{"lambda": 0.0}
    )
    params, report = train(small_dataset, config)
    assert report.epochs_run == 200
    assert len(report.val_loss) == 200
    assert report.train_loss[-1] < report.train_loss[0]
    assert min(report.val_loss) <= report.initial_val_loss
    assert params.is_finite()


def test_patience_stops_early(small_dataset):
    """Training halts once validation stops improving."""
    config = NetworkConfig(layer_sizes=[6, 4, 1], epochs=500, seed=1, patience=1, adam=AdamConfig(alpha=0.05))
    _, report = train(small_dataset, config)
    assert report.epochs_run < 500
    assert len(report.train_loss) == len(report.val_loss) == report.epochs_run


def test_progress_and_history(tmp_path, small_dataset):
    """Callback per epoch; history CSV with one row per epoch."""
    seen = []
    config = NetworkConfig(layer_sizes=[6, 4, 1], epochs=3, seed=0)
    _, report = train(small_dataset, config, progress=lambda epoch, tr, va: seen.append(epoch))
    assert seen == [0, 1, 2]
    path = tmp_path / "history.csv"
    save_history(report, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["epoch", "train_loss", "val_loss"]
    assert frame["epoch"].tolist() == [1, 2, 3]


def test_training_requires_norm_and_validation(small_dataset):
    """Missing statistics or an empty validation split are errors."""
    config = NetworkConfig(layer_sizes=[6, 4, 1], epochs=1)
    small_dataset.splits[Split.VALIDATION] = []
    with pytest.raises(ValueError):
        train(small_dataset, config)
    small_dataset.norm = None
    with pytest.raises(ValueError):
        train(small_dataset, config)


@pytest.mark.slow
def test_network_memorizes_a_hundred_samples(small_settings):
    """2000 epochs drive the unregularized training MSE below 1e-3 * c0^2."""
    dataset = generate(small_settings.model_copy(update={"n_batches": 10, "batch_size": 10}))
    assert sum(len(b.labels) for b in dataset.batches) == 100
    config = NetworkConfig(epochs=2000, seed=0, batch_size=16, **{"lambda": 0.0})
    _, report = train(dataset, config)
    assert report.epochs_run == 2000
    assert report.train_loss[-1] < 1e-3
