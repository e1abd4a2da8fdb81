"""Adam-style optimizer over named parameter dicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingDivergenceError


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_init(params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8) -> AdamState:
    state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    for k, p in params.items():
        state.m[k] = np.zeros_like(p)
        state.v[k] = np.zeros_like(p)
    return state


def adam_step(state: AdamState, params, grads):
    """One update. Mutates ``state``; returns a fresh params dict.

    Raises ``TrainingDivergenceError`` naming the first non-finite
    gradient encountered.
    """
    state.step += 1
    t = state.step
    bias1 = 1.0 - state.beta1 ** t
    bias2 = 1.0 - state.beta2 ** t
    out = {}
    for k in params:
        g = grads[k]
        if not np.all(np.isfinite(g)):
            raise TrainingDivergenceError("non-finite gradient", path=k)
        state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g
        state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * (g * g)
        m_hat = state.m[k] / bias1
        v_hat = state.v[k] / bias2
        out[k] = params[k] - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return out
