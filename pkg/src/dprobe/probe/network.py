"""Two-layer MLP classifier: parameters, forward pass, loss, exact gradients.

The network is logits = W2 . relu(W1 . x + b1) + b2 with softmax
cross-entropy loss. Everything is written out explicitly in numpy so the
gradients can be checked against finite differences; no autograd framework
is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ProbeError(ValueError):
    pass


@dataclass(frozen=True)
class ProbeConfig:
    input_dim: int
    hidden_dim: int = 256
    class_count: int = 21
    seed: int = 0
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 50
    patience: int = 5
    optimizer: str = "adam"
    standardize: bool = False

    def validate(self) -> None:
        for name in ("input_dim", "hidden_dim", "class_count", "batch_size", "max_epochs"):
            if getattr(self, name) <= 0:
                raise ProbeError(f"{name} must be positive, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ProbeError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.patience < 0:
            raise ProbeError(f"patience must be non-negative, got {self.patience}")
        if self.optimizer not in ("adam", "sgd"):
            raise ProbeError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class ProbeParams:
    W1: np.ndarray  # (hidden_dim, input_dim)
    b1: np.ndarray  # (hidden_dim,)
    W2: np.ndarray  # (class_count, hidden_dim)
    b2: np.ndarray  # (class_count,)

    def copy(self) -> "ProbeParams":
        return ProbeParams(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy())

    def arrays(self) -> list[np.ndarray]:
        return [self.W1, self.b1, self.W2, self.b2]


@dataclass
class Gradients:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def arrays(self) -> list[np.ndarray]:
        return [self.W1, self.b1, self.W2, self.b2]


def init_params(config: ProbeConfig) -> ProbeParams:
    """Deterministic initialization: uniform +-sqrt(6/(fan_in+fan_out)), zero biases."""
    config.validate()
    rng = np.random.default_rng([config.seed, 0])
    bound1 = np.sqrt(6.0 / (config.input_dim + config.hidden_dim))
    bound2 = np.sqrt(6.0 / (config.hidden_dim + config.class_count))
    return ProbeParams(
        W1=rng.uniform(-bound1, bound1, size=(config.hidden_dim, config.input_dim)),
        b1=np.zeros(config.hidden_dim),
        W2=rng.uniform(-bound2, bound2, size=(config.class_count, config.hidden_dim)),
        b2=np.zeros(config.class_count),
    )


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def forward(params: ProbeParams, x: np.ndarray) -> np.ndarray:
    """Logits for one input vector or a batch of rows."""
    xb, single = _as_batch(x)
    if xb.shape[1] != params.W1.shape[1]:
        raise ProbeError(f"input dim {xb.shape[1]} does not match W1 {params.W1.shape}")
    hidden = np.maximum(xb @ params.W1.T + params.b1, 0.0)
    logits = hidden @ params.W2.T + params.b2
    return logits[0] if single else logits


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def loss(logits: np.ndarray, label_index: int) -> float:
    """Softmax cross-entropy of one sample, stabilized by max-subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max()
    return float(np.log(np.exp(shifted).sum()) - shifted[label_index])


def batch_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean softmax cross-entropy over a batch."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    return float(np.mean(log_norm - shifted[np.arange(len(labels)), labels]))


def backward(params: ProbeParams, x: np.ndarray, labels: np.ndarray) -> tuple[Gradients, float]:
    """Exact gradients of the mean batch loss, plus that loss.

    Derivation: with p = softmax(logits) and g = (p - onehot(y)) / n,
    dW2 = g^T h, db2 = sum g, dh = g W2, dz = dh * [z > 0],
    dW1 = dz^T x, db1 = sum dz.
    """
    xb, _ = _as_batch(x)
    labels = np.atleast_1d(np.asarray(labels, dtype=np.intp))
    n = xb.shape[0]
    if n == 0:
        raise ProbeError("empty batch")
    if len(labels) != n:
        raise ProbeError(f"{n} inputs but {len(labels)} labels")

    z = xb @ params.W1.T + params.b1
    hidden = np.maximum(z, 0.0)
    logits = hidden @ params.W2.T + params.b2
    mean_loss = batch_loss(logits, labels)

    probs = softmax(logits)
    probs[np.arange(n), labels] -= 1.0
    g = probs / n

    grad_W2 = g.T @ hidden
    grad_b2 = g.sum(axis=0)
    dh = g @ params.W2
    dz = dh * (z > 0.0)
    grad_W1 = dz.T @ xb
    grad_b1 = dz.sum(axis=0)
    return Gradients(W1=grad_W1, b1=grad_b1, W2=grad_W2, b2=grad_b2), mean_loss
