"""Layers used by the model, each with an exact backward pass."""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import Tensor, _result, matmul, mul, reshape, softmax, sum_to_shape, swish, transpose

RMS_EPS = 1e-6
LN_EPS = 1e-5
CE_EPS = 1e-9


def linear(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """``x @ W + b`` over the last axis. ``W`` is ``[d_in, d_out]``."""
    d_in, d_out = weight.shape
    if x.shape[-1] != d_in:
        raise ValueError(f"linear: input width {x.shape[-1]} does not match weight {weight.shape}")
    if bias is not None and bias.shape != (d_out,):
        raise ValueError(f"linear: bias shape {bias.shape} != ({d_out},)")
    lead = x.shape[:-1]
    x2 = x.data.reshape(-1, d_in)
    y = x2 @ weight.data
    if bias is not None:
        y = y + bias.data
    parents = (x, weight) if bias is None else (x, weight, bias)

    def bw(g):
        g2 = g.reshape(-1, d_out)
        gx = (g2 @ weight.data.T).reshape(x.shape) if x.requires_grad else None
        gw = x2.T @ g2 if weight.requires_grad else None
        if bias is None:
            return gx, gw
        return gx, gw, g2.sum(axis=0)

    return _result(y.reshape(lead + (d_out,)), parents, bw)


def conv2d(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """Stride-1 'same' cross-correlation. x ``[N, C, H, W]``, weight ``[O, C, kh, kw]`` (odd kernels)."""
    n, c, h, w = x.shape
    o, c2, kh, kw = weight.shape
    if c != c2:
        raise ValueError(f"conv2d: input has {c} channels, kernel expects {c2}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ValueError("conv2d: 'same' padding needs odd kernel sizes")
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    cols = sliding_window_view(xp, (kh, kw), axis=(2, 3)).transpose(0, 2, 3, 1, 4, 5).reshape(n * h * w, c * kh * kw)
    wmat = weight.data.reshape(o, -1)
    y = cols @ wmat.T
    if bias is not None:
        y = y + bias.data
    out = y.reshape(n, h, w, o).transpose(0, 3, 1, 2)
    parents = (x, weight) if bias is None else (x, weight, bias)

    def bw(g):
        g2 = g.transpose(0, 2, 3, 1).reshape(-1, o)
        gw = (g2.T @ cols).reshape(weight.shape) if weight.requires_grad else None
        gx = None
        if x.requires_grad:
            gcols = (g2 @ wmat).reshape(n, h, w, c, kh, kw)
            gxp = np.zeros(xp.shape, dtype=x.dtype)
            for i in range(kh):
                for j in range(kw):
                    gxp[:, :, i : i + h, j : j + w] += gcols[..., i, j].transpose(0, 3, 1, 2)
            gx = gxp[:, :, ph : ph + h, pw : pw + w]
        if bias is None:
            return gx, gw
        return gx, gw, g2.sum(axis=0)

    return _result(np.ascontiguousarray(out), parents, bw)


def conv1d(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """Stride-1 'same' cross-correlation. x ``[N, C, L]``, weight ``[O, C, k]``."""
    n, c, length = x.shape
    o, c2, k = weight.shape
    if c != c2:
        raise ValueError(f"conv1d: input has {c} channels, kernel expects {c2}")
    if k % 2 == 0:
        raise ValueError("conv1d: 'same' padding needs an odd kernel size")
    p = k // 2
    xp = np.pad(x.data, ((0, 0), (0, 0), (p, p)))
    cols = sliding_window_view(xp, k, axis=2).transpose(0, 2, 1, 3).reshape(n * length, c * k)
    wmat = weight.data.reshape(o, -1)
    y = cols @ wmat.T
    if bias is not None:
        y = y + bias.data
    out = y.reshape(n, length, o).transpose(0, 2, 1)
    parents = (x, weight) if bias is None else (x, weight, bias)

    def bw(g):
        g2 = g.transpose(0, 2, 1).reshape(-1, o)
        gw = (g2.T @ cols).reshape(weight.shape) if weight.requires_grad else None
        gx = None
        if x.requires_grad:
            gcols = (g2 @ wmat).reshape(n, length, c, k)
            gxp = np.zeros(xp.shape, dtype=x.dtype)
            for i in range(k):
                gxp[:, :, i : i + length] += gcols[..., i].transpose(0, 2, 1)
            gx = gxp[:, :, p : p + length]
        if bias is None:
            return gx, gw
        return gx, gw, g2.sum(axis=0)

    return _result(np.ascontiguousarray(out), parents, bw)


def adaptive_avg_pool(x: Tensor) -> Tensor:
    """Mean over all spatial axes to a 1x1 (or length-1) output: ``[N, C, *S] -> [N, C, 1, ...]``."""
    axes = tuple(range(2, x.ndim))
    count = int(np.prod([x.shape[a] for a in axes]))
    out = x.data.mean(axis=axes, keepdims=True)
    return _result(out, (x,), lambda g: (np.broadcast_to(g / count, x.shape).copy(),))


def rms_norm(x: Tensor, gain: Tensor, eps: float = RMS_EPS) -> Tensor:
    """``gain * x / sqrt(mean(x^2) + eps)`` over the last axis."""
    d = x.shape[-1]
    r = 1.0 / np.sqrt((x.data**2).mean(axis=-1, keepdims=True) + eps)
    y = x.data * r * gain.data

    def bw(g):
        u = g * gain.data
        gx = r * u - x.data * r**3 * (u * x.data).sum(axis=-1, keepdims=True) / d
        return gx, sum_to_shape(g * x.data * r, gain.shape)

    return _result(y, (x, gain), bw)


def channel_norm(x: Tensor, gain: Tensor, eps: float = LN_EPS) -> Tensor:
    """Zero-mean, unit-variance over the last axis, then a learned gain (no shift)."""
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    r = 1.0 / np.sqrt((xc**2).mean(axis=-1, keepdims=True) + eps)
    xhat = xc * r

    def bw(g):
        u = g * gain.data
        gx = r * (u - u.mean(axis=-1, keepdims=True) - xhat * (u * xhat).mean(axis=-1, keepdims=True))
        return gx, sum_to_shape(g * xhat, gain.shape)

    return _result(xhat * gain.data, (x, gain), bw)


def swiglu_ffn(
    x: Tensor, w: Tensor, b: Tensor, v: Tensor, c: Tensor, w_out: Tensor
) -> Tensor:
    """``(swish(xW + b) * (xV + c)) W_out``."""
    return linear(mul(swish(linear(x, w, b)), linear(x, v, c)), w_out)


def gqa_attention(
    x: Tensor,
    bias: Tensor | np.ndarray | None,
    wq: Tensor,
    wk: Tensor,
    wv: Tensor,
    wo: Tensor,
    heads: int,
    kv_groups: int,
    return_weights: bool = False,
):
    """Grouped-query self-attention with an additive per-head score bias.

    ``x`` is ``[T, d]`` or ``[B, T, d]``; ``bias`` is ``[H, T, T]`` or
    ``[B, H, T, T]``. Heads ``g*H/G .. (g+1)*H/G - 1`` share group g's key and
    value projections; ``wk``/``wv`` are ``[d, G*d_k]``.
    """
    if heads % kv_groups:
        raise ValueError(f"heads ({heads}) must be divisible by kv_groups ({kv_groups})")
    unbatched = x.ndim == 2
    if unbatched:
        x = reshape(x, (1,) + x.shape)
    bsz, t, d = x.shape
    if d % heads:
        raise ValueError(f"model width {d} must be divisible by heads ({heads})")
    dk = d // heads
    per = heads // kv_groups
    if wk.shape != (d, kv_groups * dk) or wv.shape != (d, kv_groups * dk):
        raise ValueError("key/value projections must be [d, kv_groups * d_k]")

    q = transpose(reshape(linear(x, wq), (bsz, t, kv_groups, per, dk)), (0, 2, 3, 1, 4))
    k = transpose(reshape(linear(x, wk), (bsz, t, kv_groups, 1, dk)), (0, 2, 3, 4, 1))
    v = transpose(reshape(linear(x, wv), (bsz, t, kv_groups, 1, dk)), (0, 2, 3, 1, 4))
    scores = reshape(mul(matmul(q, k), 1.0 / math.sqrt(dk)), (bsz, heads, t, t))
    if bias is not None:
        if not isinstance(bias, Tensor):
            bias = Tensor(np.asarray(bias, dtype=x.dtype))
        scores = scores + bias
    weights = softmax(scores, axis=-1)
    ctx = matmul(reshape(weights, (bsz, kv_groups, per, t, t)), v)
    out = linear(reshape(transpose(ctx, (0, 3, 1, 2, 4)), (bsz, t, d)), wo)
    if unbatched:
        out = reshape(out, (t, d))
        weights = reshape(weights, (heads, t, t))
    return (out, weights) if return_weights else out


def cross_entropy(logits: Tensor, labels: np.ndarray, eps: float = CE_EPS) -> Tensor:
    """``-mean(log(softmax(logits)[label] + eps))``."""
    labels = np.asarray(labels, dtype=np.int64)
    n, k = logits.shape
    z = logits.data - logits.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    py = p[rows, labels]
    loss = -np.mean(np.log(py + eps))

    def bw(g):
        onehot = np.zeros_like(p)
        onehot[rows, labels] = 1.0
        coef = (-(py / (py + eps)) / n)[:, None]
        return (g * coef * (onehot - p),)

    return _result(np.asarray(loss, dtype=logits.dtype), (logits,), bw)
