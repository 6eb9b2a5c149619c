"""Finite-difference cases for every tensor op, shared by the unit and acceptance suites."""

from __future__ import annotations

import numpy as np

from brepfr.nn import functional as F
from brepfr.nn.gradcheck import check_gradients
from brepfr.nn.tensor import (
    Tensor,
    add,
    concat,
    getitem,
    index_select,
    matmul,
    mean,
    mul,
    relu,
    reshape,
    scatter_add,
    sigmoid,
    softmax,
    stack,
    sub,
    swish,
    transpose,
    tsum,
)


def _t(rng, *shape, scale=1.0):
    return Tensor(rng.normal(size=shape) * scale, requires_grad=True, dtype=np.float64)


def _scalar(out: Tensor, probe: np.ndarray) -> Tensor:
    return tsum(mul(out, Tensor(probe)))


def _case(rng, build, inputs):
    probe = rng.normal(size=build().shape)
    return lambda: _scalar(build(), probe), inputs


def op_cases(seed: int = 0):
    """Name -> (scalar function, inputs)."""
    rng = np.random.default_rng(seed)
    cases = {}

    a, b = _t(rng, 3, 4), _t(rng, 4)
    cases["add"] = _case(rng, lambda: add(a, b), [a, b])
    cases["sub"] = _case(rng, lambda: sub(a, b), [a, b])
    c = _t(rng, 3, 1)
    cases["mul"] = _case(rng, lambda: mul(a, c), [a, c])
    x = _t(rng, 5, 6)
    x.data[np.abs(x.data) < 0.05] = 0.3  # keep away from the kink
    cases["relu"] = _case(rng, lambda: relu(x), [x])
    s = _t(rng, 4, 5)
    cases["sigmoid"] = _case(rng, lambda: sigmoid(s), [s])
    cases["swish"] = _case(rng, lambda: swish(s), [s])
    cases["softmax"] = _case(rng, lambda: softmax(s, axis=0), [s])
    m1, m2 = _t(rng, 2, 3, 4), _t(rng, 4, 5)
    cases["matmul"] = _case(rng, lambda: matmul(m1, m2), [m1, m2])
    r = _t(rng, 2, 3, 4)
    cases["sum"] = _case(rng, lambda: tsum(r, axis=1), [r])
    cases["mean"] = _case(rng, lambda: mean(r, axis=(0, 2), keepdims=True), [r])
    cases["reshape_transpose"] = _case(rng, lambda: transpose(reshape(r, (6, 4)), (1, 0)), [r])
    cases["getitem"] = _case(rng, lambda: getitem(r, (slice(None), 1, slice(0, 3))), [r])
    rows = np.array([0, 2, 2, 1])
    g = _t(rng, 3, 4)
    cases["index_select"] = _case(rng, lambda: index_select(g, rows), [g])
    src = _t(rng, 4, 2)
    cases["scatter_add"] = _case(rng, lambda: scatter_add(src, (np.array([0, 1, 1, 3]),), (5, 2)), [src])
    p, q = _t(rng, 2, 3), _t(rng, 2, 2)
    cases["concat"] = _case(rng, lambda: concat([p, q], axis=1), [p, q])
    u, v = _t(rng, 2, 3), _t(rng, 2, 3)
    cases["stack"] = _case(rng, lambda: stack([u, v], axis=1), [u, v])

    xl, wl, bl = _t(rng, 2, 3, 5), _t(rng, 5, 4), _t(rng, 4)
    cases["linear"] = _case(rng, lambda: F.linear(xl, wl, bl), [xl, wl, bl])
    x2, w2, b2 = _t(rng, 2, 3, 5, 4), _t(rng, 4, 3, 3, 3), _t(rng, 4)
    cases["conv2d"] = _case(rng, lambda: F.conv2d(x2, w2, b2), [x2, w2, b2])
    x1, w1, b1 = _t(rng, 2, 3, 6), _t(rng, 4, 3, 3), _t(rng, 4)
    cases["conv1d"] = _case(rng, lambda: F.conv1d(x1, w1, b1), [x1, w1, b1])
    xp = _t(rng, 2, 3, 4, 4)
    cases["adaptive_avg_pool"] = _case(rng, lambda: F.adaptive_avg_pool(xp), [xp])
    xn, gn = _t(rng, 3, 6), _t(rng, 6)
    cases["rms_norm"] = _case(rng, lambda: F.rms_norm(xn, gn), [xn, gn])
    cases["channel_norm"] = _case(rng, lambda: F.channel_norm(xn, gn), [xn, gn])
    d, ff = 6, 8
    xs = _t(rng, 4, d)
    sw = [_t(rng, d, ff, scale=0.5), _t(rng, ff), _t(rng, d, ff, scale=0.5), _t(rng, ff), _t(rng, ff, d, scale=0.5)]
    cases["swiglu_ffn"] = _case(rng, lambda: F.swiglu_ffn(xs, *sw), [xs] + sw)
    heads, groups, dq = 4, 2, 8
    xa = _t(rng, 2, 5, dq)
    wq, wk, wv, wo = _t(rng, dq, dq), _t(rng, dq, 4), _t(rng, dq, 4), _t(rng, dq, dq)
    bias = _t(rng, 2, heads, 5, 5)
    cases["gqa_attention"] = _case(
        rng, lambda: F.gqa_attention(xa, bias, wq, wk, wv, wo, heads, groups), [xa, bias, wq, wk, wv, wo]
    )
    logits = _t(rng, 6, 4)
    labels = rng.integers(0, 4, size=6)
    cases["cross_entropy"] = (lambda: F.cross_entropy(logits, labels), [logits])
    return cases


def run_op_cases(seed: int = 0) -> dict[str, float]:
    return {name: check_gradients(fn, inputs) for name, (fn, inputs) in op_cases(seed).items()}


def model_gradcheck(solid, config, samples_per_input: int | None = 4, seed: int = 0, h: float = 1e-5) -> float:
    """64-bit end-to-end check of the face-classification loss against every parameter.

    h = 1e-5 rather than 1e-6: with two heads the channel norm saturates and the
    topology-scale gradients are ~1e-6, so smaller steps are dominated by round-off.
    """
    from brepfr.model import BRepFormer, prepare_solid

    model = BRepFormer(config, seed=seed, dtype=np.float64)
    rng = np.random.default_rng(seed + 1)
    # zero-initialized tensors would hide wiring errors behind zero gradients
    for p in model.params.values():
        p.data = p.data + rng.normal(scale=0.1, size=p.shape)
    feat = prepare_solid(solid, config.max_distance)
    if feat.labels is None:
        feat.labels = np.arange(feat.num_faces) % config.n_classes
    batch = model.collate([feat])
    return check_gradients(
        lambda: model.loss(batch), list(model.params.values()), h=h, samples_per_input=samples_per_input, rng=rng
    )
