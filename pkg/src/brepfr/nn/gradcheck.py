"""Central finite-difference gradient checks."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


def numeric_grad(f: Callable[[], float], arr: np.ndarray, index: tuple, h: float) -> float:
    old = arr[index]
    arr[index] = old + h
    up = f()
    arr[index] = old - h
    down = f()
    arr[index] = old
    return (up - down) / (2 * h)


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-12) -> float:
    """``max|a - n| / max(|a|, |n|)`` over one tensor's probed coordinates.

    Normalizing by the tensor's largest gradient entry rather than per
    coordinate keeps entries that are zero up to round-off (softmax rows,
    for instance) from dominating with pure finite-difference noise.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = max(float(np.abs(analytic).max(initial=0.0)), float(np.abs(numeric).max(initial=0.0)), floor)
    return float(np.abs(analytic - numeric).max(initial=0.0)) / scale


def check_gradients(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-6,
    samples_per_input: int | None = None,
    rng: np.random.Generator | None = None,
    floor: float = 1e-12,
) -> float:
    """Largest relative error between backprop and central differences.

    ``fn`` must rebuild the graph from ``inputs`` each call and return a
    scalar. With ``samples_per_input`` only that many random coordinates of
    each input are probed.
    """
    for t in inputs:
        t.grad = None
    out = fn()
    out.backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]
    rng = rng or np.random.default_rng(0)

    def value() -> float:
        return float(fn().data)

    worst = 0.0
    for t, g in zip(inputs, analytic):
        if samples_per_input is None or t.data.size <= samples_per_input:
            coords = list(np.ndindex(t.shape))
        else:
            flat = rng.choice(t.data.size, size=samples_per_input, replace=False)
            coords = [np.unravel_index(i, t.shape) for i in flat]
        num = [numeric_grad(value, t.data, idx, h) for idx in coords]
        ana = [g[idx] for idx in coords]
        worst = max(worst, relative_error(ana, num, floor))
    return worst
