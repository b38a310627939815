"""Optimizers for probe training: Adam (default) and plain SGD."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Gradients, ProbeParams

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: ProbeParams) -> "AdamState":
        return cls(
            step=0,
            m=[np.zeros_like(a) for a in params.arrays()],
            v=[np.zeros_like(a) for a in params.arrays()],
        )


def adam_step(
    params: ProbeParams,
    grads: Gradients,
    state: AdamState,
    learning_rate: float,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> tuple[ProbeParams, AdamState]:
    """One bias-corrected Adam update; functional, returns fresh arrays."""
    t = state.step + 1
    new_m, new_v, updated = [], [], []
    for p, g, m, v in zip(params.arrays(), grads.arrays(), state.m, state.v):
        m_t = beta1 * m + (1.0 - beta1) * g
        v_t = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m_t / (1.0 - beta1**t)
        v_hat = v_t / (1.0 - beta2**t)
        updated.append(p - learning_rate * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m_t)
        new_v.append(v_t)
    return ProbeParams(*updated), AdamState(step=t, m=new_m, v=new_v)


def sgd_step(params: ProbeParams, grads: Gradients, learning_rate: float) -> ProbeParams:
    return ProbeParams(
        *[p - learning_rate * g for p, g in zip(params.arrays(), grads.arrays())]
    )
