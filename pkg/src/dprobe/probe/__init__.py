"""From-scratch two-layer MLP probe: network, optimizers, training loop."""

from .network import (
    Gradients,
    ProbeConfig,
    ProbeError,
    ProbeParams,
    backward,
    batch_loss,
    forward,
    init_params,
    loss,
    softmax,
)
from .optim import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, AdamState, adam_step, sgd_step
from .training import DataSplits, TrainReport, evaluate, train

__all__ = [
    "ADAM_BETA1",
    "ADAM_BETA2",
    "ADAM_EPS",
    "AdamState",
    "DataSplits",
    "Gradients",
    "ProbeConfig",
    "ProbeError",
    "ProbeParams",
    "TrainReport",
    "adam_step",
    "backward",
    "batch_loss",
    "evaluate",
    "forward",
    "init_params",
    "loss",
    "sgd_step",
    "softmax",
    "train",
]
