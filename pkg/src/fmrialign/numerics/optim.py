"""AdamW with decoupled weight decay, and the linear learning-rate ramp."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteError, ShapeMismatchError
from .tensor import Tensor


@dataclass
class AdamWState:
    """Per-parameter moments and the shared step counter."""

    beta1: float = 0.9
    beta2: float = 0.95
    eps: float = 1e-8
    weight_decay: float = 0.01
    t: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adamw_init(
    params: dict[str, Tensor],
    beta1: float = 0.9,
    beta2: float = 0.95,
    eps: float = 1e-8,
    weight_decay: float = 0.01,
) -> AdamWState:
    state = AdamWState(beta1=beta1, beta2=beta2, eps=eps, weight_decay=weight_decay)
    for name, p in params.items():
        state.m[name] = np.zeros_like(p.data)
        state.v[name] = np.zeros_like(p.data)
    return state


def adamw_step(
    params: dict[str, Tensor],
    grads: dict[str, np.ndarray],
    state: AdamWState,
    lr: float,
) -> None:
    """One decoupled-weight-decay AdamW update, in place.

    p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    state.t += 1
    bc1 = 1.0 - state.beta1 ** state.t
    bc2 = 1.0 - state.beta2 ** state.t
    for name, p in params.items():
        if name not in grads:
            raise KeyError(f"no gradient supplied for parameter '{name}'")
        g = grads[name]
        if g.shape != p.data.shape:
            raise ShapeMismatchError(name, p.data.shape, g.shape)
        if name not in state.m:
            raise KeyError(f"optimizer state missing parameter '{name}'")
        if state.m[name].shape != p.data.shape:
            raise ShapeMismatchError(name, p.data.shape, state.m[name].shape)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for parameter '{name}'", parameter=name)
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        p.data -= lr * (m_hat / (np.sqrt(v_hat) + state.eps) + state.weight_decay * p.data)


def linear_lr(step: int, total_steps: int, lr0: float, lr_min: float = 0.0) -> float:
    """Linear ramp from lr0 at step 0 to lr_min at total_steps."""
    if lr0 < lr_min or lr_min < 0:
        raise ValueError(f"need lr0 >= lr_min >= 0, got lr0={lr0}, lr_min={lr_min}")
    if step < 0:
        raise ValueError(f"step must be non-negative, got {step}")
    if total_steps <= 0:
        return lr_min
    if step > total_steps:
        warnings.warn(
            f"linear_lr: step {step} beyond total_steps {total_steps}, clamping to lr_min",
            stacklevel=2,
        )
        return lr_min
    return lr0 + (lr_min - lr0) * step / total_steps
