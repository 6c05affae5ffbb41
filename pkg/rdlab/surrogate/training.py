"""Mini-batch training loop."""

import logging
import time
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd

from .models import AdamState, NetworkConfig, NetworkParams, TrainReport
from .network import backward, forward, init_params, loss
from .optimizer import adam_step
from ..data.models import Dataset, Split
from ..data.normalization import normalize
from ..errors import NonFiniteError

logger = logging.getLogger(__name__)


def relative_targets(features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Labels as C/C0; rows with c0 = 0 map to 0."""
    c0 = features[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(c0 > 0, labels / np.where(c0 > 0, c0, 1.0), 0.0)


def _objective(params: NetworkParams, x: np.ndarray, y: np.ndarray, config: NetworkConfig) -> float:
    predictions, _ = forward(params, x, config.hidden_activation, config.output_activation)
    value = loss(predictions, y, params, config.l2)
    if not np.isfinite(value):
        raise NonFiniteError("Loss is not finite")
    return value


def train(
    dataset: Dataset,
    config: NetworkConfig,
    progress: Optional[Callable[[int, float, float], None]] = None,
) -> Tuple[NetworkParams, TrainReport]:
    """Fit a network to the training split, keeping the best-validation parameters.

    Args:
        dataset: Dataset with non-empty train and validation splits and norm stats
        config: Architecture, optimizer and schedule
        progress: Called as progress(epoch, train_loss, val_loss) after each epoch

    Returns:
        Best parameters and the training report

    Raises:
        NonFiniteError: if training diverges; carries the epoch and batch index
    """
    if dataset.norm is None:
        raise ValueError("Dataset has no normalization statistics")
    train_x, train_y = dataset.split_arrays(Split.TRAIN)
    val_x, val_y = dataset.split_arrays(Split.VALIDATION)
    if len(train_y) == 0 or len(val_y) == 0:
        raise ValueError("Training needs non-empty train and validation splits")

    x_train = normalize(train_x, dataset.norm)
    y_train = relative_targets(train_x, train_y)
    x_val = normalize(val_x, dataset.norm)
    y_val = relative_targets(val_x, val_y)

    rng = np.random.default_rng(config.seed)
    params = init_params(config, rng)
    state = AdamState.zeros_like(params, config.adam)
    start = time.perf_counter()

    initial_val = _objective(params, x_val, y_val, config)
    best_params, best_val, best_epoch = params.copy(), initial_val, None
    history_train, history_val = [], []
    since_best = 0
    m = len(y_train)
    logger.info(
        f"Training {config.layer_sizes} on {m} samples for {config.epochs} epoch(s); "
        f"initial validation loss {initial_val:.6e}"
    )

    for epoch in range(config.epochs):
        order = rng.permutation(m)
        for batch, lo in enumerate(range(0, m, config.batch_size)):
            idx = order[lo:lo + config.batch_size]
            try:
                predictions, cache = forward(params, x_train[idx], config.hidden_activation, config.output_activation)
                grads = backward(params, cache, y_train[idx], config.l2)
                params, state = adam_step(params, grads, state)
                if not params.is_finite():
                    raise NonFiniteError("Parameters are not finite")
            except NonFiniteError as e:
                logger.error(f"Training diverged at epoch {epoch}, batch {batch}")
                raise NonFiniteError(str(e), epoch=epoch, batch=batch) from e

        try:
            train_loss = _objective(params, x_train, y_train, config)
            val_loss = _objective(params, x_val, y_val, config)
        except NonFiniteError as e:
            logger.error(f"Training diverged at epoch {epoch}")
            raise NonFiniteError(str(e), epoch=epoch) from e
        history_train.append(train_loss)
        history_val.append(val_loss)
        if progress:
            progress(epoch, train_loss, val_loss)

        if val_loss < best_val:
            best_params, best_val, best_epoch = params.copy(), val_loss, epoch
            since_best = 0
        else:
            since_best += 1
        if (epoch + 1) % config.log_every == 0:
            logger.info(f"Epoch {epoch + 1}/{config.epochs}: train {train_loss:.6e}, validation {val_loss:.6e}")
        if config.patience is not None and since_best >= config.patience:
            logger.info(f"No validation improvement for {since_best} epochs; stopping at epoch {epoch + 1}")
            break

    report = TrainReport(
        train_loss=history_train,
        val_loss=history_val,
        wall_time=time.perf_counter() - start,
        params=best_params,
        initial_val_loss=initial_val,
        best_epoch=best_epoch,
    )
    return best_params, report


def save_history(report: TrainReport, path: Path) -> None:
    """Write `epoch,train_loss,val_loss` rows."""
    frame = pd.DataFrame({
        "epoch": np.arange(1, report.epochs_run + 1),
        "train_loss": report.train_loss,
        "val_loss": report.val_loss,
    })
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Training history written to {path}")
