"""Probe training loop: mini-batches, early stopping, best-checkpoint selection.

The underlying representations are frozen; training only ever touches the
probe parameters. A run is fully determined by (data, config): batch
shuffling is seeded and model selection keeps the first strictly-best
validation checkpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import (
    Gradients,
    ProbeConfig,
    ProbeError,
    ProbeParams,
    backward,
    forward,
    init_params,
)
from .optim import AdamState, adam_step, sgd_step


@dataclass
class DataSplits:
    train_x: np.ndarray
    train_y: np.ndarray
    valid_x: np.ndarray
    valid_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray

    def validate(self) -> None:
        dims = {self.train_x.shape[1], self.valid_x.shape[1], self.test_x.shape[1]}
        if len(dims) != 1:
            raise ProbeError(f"inconsistent feature dims across splits: {sorted(dims)}")
        for name in ("train", "valid", "test"):
            x, y = getattr(self, f"{name}_x"), getattr(self, f"{name}_y")
            if len(x) != len(y):
                raise ProbeError(f"{name}: {len(x)} features but {len(y)} labels")
            if len(x) == 0:
                raise ProbeError(f"{name} split is empty")


@dataclass(frozen=True)
class TrainReport:
    epochs_run: int
    best_dev_accuracy: float
    test_accuracy: float
    loss_curve: tuple[float, ...]
    seed: int

    def to_dict(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "best_dev_accuracy": self.best_dev_accuracy,
            "test_accuracy": self.test_accuracy,
            "loss_curve": list(self.loss_curve),
            "seed": self.seed,
        }


def evaluate(params: ProbeParams, x: np.ndarray, y: np.ndarray) -> float:
    """Micro accuracy; argmax ties resolve to the lowest class index."""
    if len(x) == 0:
        raise ProbeError("cannot evaluate on an empty set")
    predictions = np.argmax(forward(params, x), axis=1)
    return float(np.mean(predictions == np.asarray(y, dtype=np.intp)))


def train(data: DataSplits, config: ProbeConfig) -> tuple[ProbeParams, TrainReport]:
    config.validate()
    data.validate()
    if config.input_dim != data.train_x.shape[1]:
        raise ProbeError(
            f"config input_dim {config.input_dim} does not match features of dim {data.train_x.shape[1]}"
        )

    train_x = np.asarray(data.train_x, dtype=np.float64)
    valid_x = np.asarray(data.valid_x, dtype=np.float64)
    test_x = np.asarray(data.test_x, dtype=np.float64)
    if config.standardize:
        mean = train_x.mean(axis=0)
        std = train_x.std(axis=0)
        std[std == 0.0] = 1.0
        train_x = (train_x - mean) / std
        valid_x = (valid_x - mean) / std
        test_x = (test_x - mean) / std

    params = init_params(config)
    adam = AdamState.for_params(params)
    shuffle_rng = np.random.default_rng([config.seed, 1])

    best_params = params.copy()
    best_dev = -1.0
    epochs_since_improvement = 0
    loss_curve: list[float] = []
    n = len(train_x)

    epoch = 0
    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        total_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grads, batch_mean_loss = backward(params, train_x[batch], data.train_y[batch])
            if not math.isfinite(batch_mean_loss):
                raise ProbeError(
                    f"non-finite loss {batch_mean_loss} at epoch {epoch}, batch offset {start}"
                )
            if config.optimizer == "adam":
                params, adam = adam_step(params, grads, adam, config.learning_rate)
            else:
                params = sgd_step(params, grads, config.learning_rate)
            total_loss += batch_mean_loss * len(batch)
        loss_curve.append(total_loss / n)

        dev_accuracy = evaluate(params, valid_x, data.valid_y)
        if dev_accuracy > best_dev:
            best_dev = dev_accuracy
            best_params = params.copy()
            epochs_since_improvement = 0
        else:
            epochs_since_improvement += 1
            if epochs_since_improvement >= max(config.patience, 1):
                break

    report = TrainReport(
        epochs_run=epoch,
        best_dev_accuracy=best_dev,
        test_accuracy=evaluate(best_params, test_x, data.test_y),
        loss_curve=tuple(loss_curve),
        seed=config.seed,
    )
    return best_params, report
