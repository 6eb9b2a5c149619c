"""The face-classification network.

Face and edge encoders turn UV grids and attributes into 256-wide features.
Pairwise topology (hop count, angle, centroid distance) and the edges along
shortest face paths become a per-head additive attention bias. A stack of
pre-norm grouped-query transformer blocks runs over the faces plus one
learned virtual face, and a gated fusion of each face's output with the
virtual face's output feeds a small classifier.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .brep_ir import SolidGraph
from .geometry import EdgeInputBatch, FaceInputBatch, build_edge_inputs, build_face_inputs, normalize_solid
from .nn import functional as F
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.optim import Parameter, glorot_uniform
from .nn.tensor import (
    Tensor,
    concat,
    index_select,
    mul,
    no_grad,
    relu,
    reshape,
    scatter_add,
    softmax,
    stack,
    swish,
    transpose,
    tsum,
)
from .topology import DEFAULT_MAX_DISTANCE, TopoMatrices, compute_topology

FEATURE_WIDTH = 256
GEO_WIDTH = 128
PAD_SCORE = -1e9
TOPO_KEYS = ("m_d", "m_a", "m_c")


@dataclass
class ModelConfig:
    d_model: int = 64
    n_layers: int = 2
    heads: int = 4
    kv_groups: int = 2
    d_ff: int | None = None  # defaults to 4 * d_model
    max_distance: int = DEFAULT_MAX_DISTANCE
    n_classes: int = 6
    path_decay: bool = False  # scale the k-th path edge by 1/k
    use_m_d: bool = True
    use_m_a: bool = True
    use_m_c: bool = True
    use_m_e: bool = True
    use_face_attr: bool = True
    use_edge_attr: bool = True
    use_uv: bool = True

    def __post_init__(self) -> None:
        if self.d_ff is None:
            self.d_ff = 4 * self.d_model
        if self.d_model % self.heads:
            raise ValueError(f"d_model ({self.d_model}) must be divisible by heads ({self.heads})")
        if self.heads % self.kv_groups:
            raise ValueError(f"heads ({self.heads}) must be divisible by kv_groups ({self.kv_groups})")
        if self.max_distance < 1 or self.n_classes < 1 or self.n_layers < 0:
            raise ValueError("max_distance and n_classes must be positive, n_layers non-negative")

    @classmethod
    def full(cls, n_classes: int = 6, **overrides) -> "ModelConfig":
        """The 8-layer, 256-wide preset."""
        return cls(**{"d_model": 256, "n_layers": 8, "heads": 8, "kv_groups": 2, "n_classes": n_classes, **overrides})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown model config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "ModelConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# per-solid inputs and batching


@dataclass
class SolidFeatures:
    faces: FaceInputBatch
    edges: EdgeInputBatch
    topo: TopoMatrices
    labels: np.ndarray | None = None

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def permuted(self, face_order: np.ndarray, edge_order: np.ndarray | None = None) -> "SolidFeatures":
        """Same solid with faces (and edges) renumbered; new face k is old face ``face_order[k]``."""
        edges = self.edges if edge_order is None else self.edges.take(edge_order)
        labels = None if self.labels is None else self.labels[face_order]
        return SolidFeatures(self.faces.take(face_order), edges, self.topo.permuted(face_order, edge_order), labels)


def prepare_solid(solid: SolidGraph, max_distance: int = DEFAULT_MAX_DISTANCE) -> SolidFeatures:
    """Normalize the solid, then build every input the network reads."""
    norm = normalize_solid(solid)
    labels = None
    if all(f.label is not None for f in solid.faces):
        labels = np.array([f.label for f in solid.faces], dtype=np.int64)
    return SolidFeatures(build_face_inputs(norm), build_edge_inputs(norm), compute_topology(norm, max_distance), labels)


@dataclass
class Batch:
    size: int
    n_max: int
    counts: np.ndarray
    face_batch: np.ndarray  # solid index of every flat face row
    face_pos: np.ndarray  # position of every flat face row inside its solid
    faces: FaceInputBatch
    edges: EdgeInputBatch
    topo: dict[str, np.ndarray]  # m_d, m_a, m_c padded to [B, n, n]
    path_index: tuple[np.ndarray, np.ndarray, np.ndarray]  # (b, i, j) per path entry
    path_rows: np.ndarray  # row into the [E * max_distance, H] edge-projection table
    path_weight: np.ndarray  # [M, 1]
    attn_mask: np.ndarray  # [B, 1, n + 1, n + 1], 0 or PAD_SCORE
    labels: np.ndarray | None


def collate(samples: Sequence[SolidFeatures], max_distance: int, dtype=np.float32, path_decay: bool = False) -> Batch:
    counts = np.array([s.num_faces for s in samples], dtype=np.int64)
    bsz, n_max = len(samples), int(counts.max())
    face_batch = np.repeat(np.arange(bsz), counts)
    face_pos = np.concatenate([np.arange(c) for c in counts])

    def cat(arrays):
        return np.concatenate(arrays).astype(dtype)

    faces = FaceInputBatch(
        uv=cat([s.faces.uv for s in samples]).transpose(0, 3, 1, 2).copy(),
        type_onehot=cat([s.faces.type_onehot for s in samples]),
        area=cat([s.faces.area for s in samples]),
        centroid=cat([s.faces.centroid for s in samples]),
        rational=cat([s.faces.rational for s in samples]),
    )
    edges = EdgeInputBatch(
        uv=cat([s.edges.uv for s in samples]).transpose(0, 2, 1).copy(),
        type_onehot=cat([s.edges.type_onehot for s in samples]),
        length=cat([s.edges.length for s in samples]),
        convexity_onehot=cat([s.edges.convexity_onehot for s in samples]),
    )

    topo = {key: np.zeros((bsz, n_max, n_max), dtype=dtype) for key in TOPO_KEYS}
    mask = np.zeros((bsz, 1, n_max + 1, n_max + 1), dtype=dtype)
    pb, pi, pj, rows, weight = [], [], [], [], []
    edge_offset = 0
    for b, s in enumerate(samples):
        n = s.num_faces
        if s.topo.max_distance != max_distance:
            raise ValueError(f"sample built with max_distance={s.topo.max_distance}, model uses {max_distance}")
        for key in TOPO_KEYS:
            topo[key][b, :n, :n] = getattr(s.topo, key)
        real = np.zeros(n_max + 1, dtype=bool)
        real[: n + 1] = True
        mask[b, 0] = np.where(real[:, None] == real[None, :], 0.0, PAD_SCORE)

        m_e = s.topo.m_e
        if m_e.size and (m_e.max(initial=-1) >= len(s.edges)):
            raise ValueError("edge path references an edge id outside the solid")
        valid = m_e >= 0
        length = valid.sum(axis=-1)
        i, j, k = np.nonzero(valid)
        if len(i):
            w = 1.0 / length[i, j]
            if path_decay:
                w = w / (k + 1)
            pb.append(np.full(len(i), b))
            pi.append(i)
            pj.append(j)
            rows.append((m_e[i, j, k] + edge_offset) * max_distance + k)
            weight.append(w)
        edge_offset += len(s.edges)

    def flat(parts, dt):
        return np.concatenate(parts).astype(dt) if parts else np.zeros(0, dtype=dt)

    labels = None
    if all(s.labels is not None for s in samples):
        labels = np.concatenate([s.labels for s in samples]).astype(np.int64)
    return Batch(
        size=bsz,
        n_max=n_max,
        counts=counts,
        face_batch=face_batch,
        face_pos=face_pos,
        faces=faces,
        edges=edges,
        topo=topo,
        path_index=(flat(pb, np.int64), flat(pi, np.int64), flat(pj, np.int64)),
        path_rows=flat(rows, np.int64),
        path_weight=flat(weight, dtype)[:, None],
        attn_mask=mask,
        labels=labels,
    )


# --------------------------------------------------------------------------
# the network


@dataclass
class ForwardOutput:
    logits: Tensor  # [F, K], real faces only, batch order
    f_local: Tensor  # [B, n, d]
    f_global: Tensor  # [B, d]
    bias: Tensor | None  # [B, H, n + 1, n + 1], before the pad mask
    gates: Tensor  # [B, n, 2, 1]


class BRepFormer:
    def __init__(self, config: ModelConfig, seed: int = 0, dtype=np.float32):
        self.config = config
        self.dtype = np.dtype(dtype)
        self.params: dict[str, Parameter] = {}
        self._init_params(np.random.default_rng(seed))

    # ---- parameters

    def _add(self, name: str, data: np.ndarray) -> None:
        self.params[name] = Parameter(np.asarray(data, dtype=self.dtype), name)

    def _linear(self, rng, name: str, d_in: int, d_out: int, bias: bool = True) -> None:
        self._add(f"{name}.weight", glorot_uniform(rng, (d_in, d_out), d_in, d_out, self.dtype))
        if bias:
            self._add(f"{name}.bias", np.zeros(d_out))

    def _conv(self, rng, name: str, c_in: int, c_out: int, kernel: tuple[int, ...]) -> None:
        area = int(np.prod(kernel))
        shape = (c_out, c_in) + kernel
        self._add(f"{name}.weight", glorot_uniform(rng, shape, c_in * area, c_out * area, self.dtype))
        self._add(f"{name}.bias", np.zeros(c_out))

    def _init_params(self, rng: np.random.Generator) -> None:
        c = self.config
        d, h = c.d_model, c.heads
        dk = d // h
        for i, (a, b) in enumerate(((7, 32), (32, 64), (64, 128))):
            self._conv(rng, f"face_enc.conv{i + 1}", a, b, (3, 3))
        self._linear(rng, "face_enc.geo_fc", 128, GEO_WIDTH)
        self._linear(rng, "face_enc.type", 9, 32)
        self._linear(rng, "face_enc.area", 1, 32)
        self._linear(rng, "face_enc.centroid", 3, 32)
        self._linear(rng, "face_enc.rational", 1, 32)
        for i, (a, b) in enumerate(((12, 32), (32, 64), (64, 128))):
            self._conv(rng, f"edge_enc.conv{i + 1}", a, b, (3,))
        self._linear(rng, "edge_enc.geo_fc", 128, GEO_WIDTH)
        self._linear(rng, "edge_enc.type", 11, 64)
        self._linear(rng, "edge_enc.length", 1, 32)
        self._linear(rng, "edge_enc.convexity", 3, 32)

        for key in TOPO_KEYS:
            self._add(f"topo.{key}.scale", glorot_uniform(rng, (h,), 1, h, self.dtype))
            self._add(f"topo.{key}.shift", np.zeros(h))
            self._add(f"topo.{key}.gain", np.ones(h))
        self._add("topo.path", np.zeros((c.max_distance, h, FEATURE_WIDTH)))
        self._add("virtual.bias", np.zeros(h))
        self._add("virtual.token", rng.normal(0.0, 0.02, size=d))

        self._linear(rng, "input_proj", FEATURE_WIDTH, d)
        for layer in range(c.n_layers):
            p = f"layers.{layer}"
            self._add(f"{p}.attn_norm.gain", np.ones(d))
            self._linear(rng, f"{p}.attn.wq", d, d, bias=False)
            self._linear(rng, f"{p}.attn.wk", d, c.kv_groups * dk, bias=False)
            self._linear(rng, f"{p}.attn.wv", d, c.kv_groups * dk, bias=False)
            self._linear(rng, f"{p}.attn.wo", d, d, bias=False)
            self._add(f"{p}.ffn_norm.gain", np.ones(d))
            self._linear(rng, f"{p}.ffn.w", d, c.d_ff)
            self._linear(rng, f"{p}.ffn.v", d, c.d_ff)
            self._linear(rng, f"{p}.ffn.out", c.d_ff, d, bias=False)

        self._linear(rng, "head.gate", d, 1)
        self._linear(rng, "head.mlp1", d, d)
        self._linear(rng, "head.mlp2", d, c.n_classes)

    def parameter_count(self) -> int:
        return int(sum(p.data.size for p in self.params.values()))

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None

    def astype(self, dtype) -> "BRepFormer":
        other = object.__new__(BRepFormer)
        other.config = self.config
        other.dtype = np.dtype(dtype)
        other.params = {k: Parameter(v.data.astype(dtype), k) for k, v in self.params.items()}
        return other

    def state_dict(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.params.items()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        missing = set(self.params) - set(state)
        extra = set(state) - set(self.params)
        if missing or extra:
            raise ValueError(f"parameter mismatch: missing={sorted(missing)} unexpected={sorted(extra)}")
        for k, v in state.items():
            if tuple(v.shape) != self.params[k].shape:
                raise ValueError(f"shape mismatch for {k}: {v.shape} vs {self.params[k].shape}")
            self.params[k].data = np.asarray(v, dtype=self.dtype).copy()

    def save(self, directory, extra: dict | None = None) -> Path:
        meta = {"model_config": self.config.to_dict()}
        if extra:
            meta.update(extra)
        return save_checkpoint(directory, self.params, meta)

    @classmethod
    def load(cls, directory, config: ModelConfig | None = None) -> "BRepFormer":
        state, manifest = load_checkpoint(directory)
        stored = ModelConfig.from_dict(manifest["model_config"])
        if config is not None and config != stored:
            raise ValueError("checkpoint was trained with a different model config")
        model = cls(stored)
        model.load_state_dict(state)
        return model

    # ---- encoders

    def _p(self, name: str) -> Parameter:
        return self.params[name]

    def _lin(self, x, name: str) -> Tensor:
        return F.linear(x, self._p(f"{name}.weight"), self.params.get(f"{name}.bias"))

    def _const(self, arr) -> Tensor:
        return Tensor(np.asarray(arr, dtype=self.dtype))

    def encode_faces(self, faces: FaceInputBatch, channels_first: bool = True) -> Tensor:
        """``[N, 256]``: UV-grid CNN features (128) then type, area, centroid, rational (32 each)."""
        n = len(faces)
        c = self.config
        if c.use_uv:
            uv = faces.uv if channels_first else faces.uv.transpose(0, 3, 1, 2)
            x = self._const(uv)
            for i in (1, 2, 3):
                x = swish(F.conv2d(x, self._p(f"face_enc.conv{i}.weight"), self._p(f"face_enc.conv{i}.bias")))
            geo = self._lin(reshape(F.adaptive_avg_pool(x), (n, 128)), "face_enc.geo_fc")
        else:
            geo = self._const(np.zeros((n, GEO_WIDTH)))
        if c.use_face_attr:
            attrs = [
                self._lin(self._const(faces.type_onehot), "face_enc.type"),
                self._lin(self._const(faces.area), "face_enc.area"),
                self._lin(self._const(faces.centroid), "face_enc.centroid"),
                self._lin(self._const(faces.rational), "face_enc.rational"),
            ]
        else:
            attrs = [self._const(np.zeros((n, 128)))]
        return concat([geo] + attrs, axis=-1)

    def encode_edges(self, edges: EdgeInputBatch, channels_first: bool = True) -> Tensor:
        """``[E, 256]``: UV CNN features (128) then type (64), length (32), convexity (32)."""
        e = len(edges)
        c = self.config
        if c.use_uv:
            uv = edges.uv if channels_first else edges.uv.transpose(0, 2, 1)
            x = self._const(uv)
            for i in (1, 2, 3):
                x = swish(F.conv1d(x, self._p(f"edge_enc.conv{i}.weight"), self._p(f"edge_enc.conv{i}.bias")))
            geo = self._lin(reshape(F.adaptive_avg_pool(x), (e, 128)), "edge_enc.geo_fc")
        else:
            geo = self._const(np.zeros((e, GEO_WIDTH)))
        if c.use_edge_attr:
            attrs = [
                self._lin(self._const(edges.type_onehot), "edge_enc.type"),
                self._lin(self._const(edges.length), "edge_enc.length"),
                self._lin(self._const(edges.convexity_onehot), "edge_enc.convexity"),
            ]
        else:
            attrs = [self._const(np.zeros((e, 128)))]
        return concat([geo] + attrs, axis=-1)

    def encode_topology(self, batch: Batch, h_edge: Tensor | None) -> Tensor:
        """Per-head attention bias ``[B, H, n + 1, n + 1]``; index 0 is the virtual face."""
        c = self.config
        bsz, n, h = batch.size, batch.n_max, c.heads
        face_bias = None
        for key, enabled in zip(TOPO_KEYS, (c.use_m_d, c.use_m_a, c.use_m_c)):
            if not enabled:
                continue
            m = self._const(batch.topo[key][..., None])
            x = mul(m, self._p(f"topo.{key}.scale")) + self._p(f"topo.{key}.shift")
            term = relu(F.channel_norm(x, self._p(f"topo.{key}.gain")))
            face_bias = term if face_bias is None else face_bias + term

        bias = face_bias
        if c.use_m_e and h_edge is not None and len(batch.path_rows):
            k = c.max_distance
            table = reshape(self._p("topo.path"), (k * h, FEATURE_WIDTH))
            proj = reshape(F.linear(h_edge, transpose(table, (1, 0))), (h_edge.shape[0] * k, h))
            picked = mul(index_select(proj, batch.path_rows), self._const(batch.path_weight))
            edge_bias = scatter_add(picked, batch.path_index, (bsz, n, n, h))
            bias = edge_bias if bias is None else bias + edge_bias

        full_index = (slice(None), slice(None), slice(1, None), slice(1, None))
        if bias is None:
            out = self._const(np.zeros((bsz, h, n + 1, n + 1)))
        else:
            out = scatter_add(transpose(bias, (0, 3, 1, 2)), full_index, (bsz, h, n + 1, n + 1))
        border = np.zeros((1, 1, n + 1, n + 1))
        border[..., 0, :] = 1.0
        border[..., :, 0] = 1.0
        return out + mul(self._const(border), reshape(self._p("virtual.bias"), (1, h, 1, 1)))

    # ---- transformer and head

    def embed_faces(self, batch: Batch, h_face: Tensor) -> Tensor:
        """Project faces to ``d_model`` and place them after the virtual token: ``[B, n + 1, d]``."""
        d = self.config.d_model
        rows = self._lin(h_face, "input_proj")
        x = scatter_add(rows, (batch.face_batch, batch.face_pos + 1), (batch.size, batch.n_max + 1, d))
        first = np.zeros((1, batch.n_max + 1, 1))
        first[0, 0, 0] = 1.0
        return x + mul(self._const(first), reshape(self._p("virtual.token"), (1, 1, d)))

    def transformer_forward(self, tokens: Tensor, bias: Tensor) -> tuple[Tensor, Tensor]:
        """Run the block stack over ``[B, n + 1, d]``; returns ``(f_local [B, n, d], f_global [B, d])``."""
        c = self.config
        x = tokens
        for layer in range(c.n_layers):
            p = f"layers.{layer}"
            attn = F.gqa_attention(
                F.rms_norm(x, self._p(f"{p}.attn_norm.gain")),
                bias,
                self._p(f"{p}.attn.wq.weight"),
                self._p(f"{p}.attn.wk.weight"),
                self._p(f"{p}.attn.wv.weight"),
                self._p(f"{p}.attn.wo.weight"),
                c.heads,
                c.kv_groups,
            )
            x = attn + x
            ffn = F.swiglu_ffn(
                F.rms_norm(x, self._p(f"{p}.ffn_norm.gain")),
                self._p(f"{p}.ffn.w.weight"),
                self._p(f"{p}.ffn.w.bias"),
                self._p(f"{p}.ffn.v.weight"),
                self._p(f"{p}.ffn.v.bias"),
                self._p(f"{p}.ffn.out.weight"),
            )
            x = ffn + x
        return x[:, 1:, :], x[:, 0, :]

    def recognition_head(self, f_local: Tensor, f_global: Tensor) -> tuple[Tensor, Tensor]:
        """Gated fusion of local and global features, then the classifier. Returns ``(logits, gates)``."""
        bsz, n, d = f_local.shape
        glob = mul(self._const(np.ones((1, n, 1))), reshape(f_global, (bsz, 1, d)))
        f_all = stack([f_local, glob], axis=2)  # [B, n, 2, d]
        gates = softmax(self._lin(f_all, "head.gate"), axis=2)  # [B, n, 2, 1]
        fused = tsum(mul(f_all, gates), axis=2)
        logits = self._lin(swish(self._lin(fused, "head.mlp1")), "head.mlp2")
        return logits, gates

    def forward_batch(self, batch: Batch) -> ForwardOutput:
        c = self.config
        h_face = self.encode_faces(batch.faces)
        h_edge = self.encode_edges(batch.edges) if c.use_m_e and len(batch.edges) else None
        bias = self.encode_topology(batch, h_edge)
        tokens = self.embed_faces(batch, h_face)
        f_local, f_global = self.transformer_forward(tokens, bias + self._const(batch.attn_mask))
        logits, gates = self.recognition_head(f_local, f_global)
        flat = reshape(logits, (batch.size * batch.n_max, c.n_classes))
        real = index_select(flat, batch.face_batch * batch.n_max + batch.face_pos)
        return ForwardOutput(real, f_local, f_global, bias, gates)

    def collate(self, samples: Sequence[SolidFeatures]) -> Batch:
        return collate(samples, self.config.max_distance, self.dtype, self.config.path_decay)

    def loss(self, batch: Batch) -> Tensor:
        if batch.labels is None:
            raise ValueError("batch has no labels")
        return F.cross_entropy(self.forward_batch(batch).logits, batch.labels)

    def predict_features(self, samples: Sequence[SolidFeatures]) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per solid: (predicted class per face, logits)."""
        with no_grad():
            batch = self.collate(samples)
            logits = self.forward_batch(batch).logits.data
        out = []
        start = 0
        for n in batch.counts:
            chunk = logits[start : start + n]
            out.append((chunk.argmax(axis=1), chunk))
            start += n
        return out

    def predict(self, solid: SolidGraph) -> tuple[np.ndarray, np.ndarray]:
        return self.predict_features([prepare_solid(solid, self.config.max_distance)])[0]


ABLATION_PREFIXES: dict[str, tuple[str, ...]] = {
    "use_uv": ("face_enc.conv", "face_enc.geo_fc", "edge_enc.conv", "edge_enc.geo_fc"),
    "use_face_attr": ("face_enc.type", "face_enc.area", "face_enc.centroid", "face_enc.rational"),
    "use_edge_attr": ("edge_enc.type", "edge_enc.length", "edge_enc.convexity"),
    "use_m_d": ("topo.m_d.",),
    "use_m_a": ("topo.m_a.",),
    "use_m_c": ("topo.m_c.",),
    # edge features only reach the network through the path bias
    "use_m_e": ("topo.path", "edge_enc."),
}


def disabled_parameters(config: ModelConfig) -> list[str]:
    """Names of the parameters cut off from the loss by the config's ablation flags."""
    names = BRepFormer(config).params
    prefixes = [p for flag, group in ABLATION_PREFIXES.items() if not getattr(config, flag) for p in group]
    return [n for n in names if any(n.startswith(p) for p in prefixes)]


def forward(solid: SolidGraph, params: dict[str, np.ndarray], config: ModelConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-face predictions and logits for one solid under the given parameters."""
    model = BRepFormer(config)
    model.load_state_dict(params)
    return model.predict(solid)


def parameter_count(config: ModelConfig) -> int:
    return BRepFormer(config).parameter_count()


def expected_parameter_count(config: ModelConfig) -> int:
    """Closed-form parameter count; must agree with :func:`parameter_count`."""
    d, h, g = config.d_model, config.heads, config.kv_groups
    dk = d // h
    conv2 = sum(o * i * 9 + o for i, o in ((7, 32), (32, 64), (64, 128)))
    conv1 = sum(o * i * 3 + o for i, o in ((12, 32), (32, 64), (64, 128)))
    face_attr = (9 + 1 + 3 + 1) * 32 + 4 * 32
    edge_attr = 11 * 64 + 64 + (1 + 3) * 32 + 2 * 32
    geo_fc = 2 * (128 * 128 + 128)
    topo = 3 * 3 * h + config.max_distance * h * FEATURE_WIDTH + h + d
    proj = FEATURE_WIDTH * d + d
    layer = 2 * d + d * d * 2 + 2 * d * g * dk + 2 * (d * config.d_ff + config.d_ff) + config.d_ff * d
    head = d + 1 + d * d + d + d * config.n_classes + config.n_classes
    return conv2 + conv1 + face_attr + edge_attr + geo_fc + topo + proj + config.n_layers * layer + head


__all__ = [
    "ABLATION_PREFIXES",
    "disabled_parameters",
    "Batch",
    "BRepFormer",
    "ForwardOutput",
    "ModelConfig",
    "SolidFeatures",
    "collate",
    "expected_parameter_count",
    "forward",
    "parameter_count",
    "prepare_solid",
]
