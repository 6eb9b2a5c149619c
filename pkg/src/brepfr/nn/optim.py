"""Parameters, AdamW with decoupled weight decay, and the learning-rate schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .tensor import Tensor


class Parameter(Tensor):
    """A named leaf tensor that always requires a gradient."""

    __slots__ = ()

    def __init__(self, data, name: str):
        super().__init__(data, requires_grad=True, name=name)


def glorot_uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, fan_out: int, dtype) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0


def adamw_step(
    theta: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.01,
) -> np.ndarray:
    """One AdamW update of ``theta`` in place; returns ``theta``.

    Decay is applied to the weights directly (``theta -= lr * wd * theta``)
    before the bias-corrected moment step.
    """
    state.step += 1
    if weight_decay:
        theta *= 1.0 - lr * weight_decay
    state.m *= beta1
    state.m += (1.0 - beta1) * grad
    state.v *= beta2
    state.v += (1.0 - beta2) * grad * grad
    m_hat = state.m / (1.0 - beta1**state.step)
    v_hat = state.v / (1.0 - beta2**state.step)
    theta -= (lr * m_hat / (np.sqrt(v_hat) + eps)).astype(theta.dtype)
    return theta


class AdamW:
    def __init__(
        self,
        params: dict[str, Tensor] | Iterable[tuple[str, Tensor]],
        lr: float = 1e-3,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
        weight_decay: float = 0.01,
    ):
        self.params = dict(params)
        self.lr = lr
        self.betas = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.state: dict[str, AdamState] = {}

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None

    def step(self, lr: float | None = None) -> None:
        """Update every parameter that received a gradient; others are left alone."""
        lr = self.lr if lr is None else lr
        b1, b2 = self.betas
        for name, p in self.params.items():
            if p.grad is None:
                continue
            st = self.state.get(name)
            if st is None:
                st = self.state[name] = AdamState(np.zeros_like(p.data), np.zeros_like(p.data))
            adamw_step(p.data, p.grad, st, lr, b1, b2, self.eps, self.weight_decay)


@dataclass
class PlateauState:
    """Reduce-on-plateau bookkeeping, updated once per epoch with the validation loss."""

    factor: float = 0.5
    patience: int = 5
    min_delta: float = 1e-4
    min_lr: float = 1e-6
    best: float = math.inf
    bad_epochs: int = 0
    scale: float = 1.0
    history: list[float] = field(default_factory=list)

    def update(self, val_loss: float) -> bool:
        """Record one epoch; returns True when the rate was just reduced."""
        self.history.append(val_loss)
        if val_loss < self.best - self.min_delta:
            self.best = val_loss
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        if self.bad_epochs >= self.patience:
            self.scale *= self.factor
            self.bad_epochs = 0
            return True
        return False


def lr_schedule(step: int, base_lr: float, warmup_steps: int, plateau_state: PlateauState | None = None) -> float:
    """Linear warm-up to ``base_lr`` over ``warmup_steps`` (1-based steps), then plateau scaling.

    After warm-up the rate never drops below ``plateau_state.min_lr``.
    """
    scale = plateau_state.scale if plateau_state is not None else 1.0
    if warmup_steps > 0 and step <= warmup_steps:
        return base_lr * step / warmup_steps * scale
    lr = base_lr * scale
    if plateau_state is not None:
        lr = max(lr, plateau_state.min_lr)
    return lr
