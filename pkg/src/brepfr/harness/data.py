"""Dataset splits, cached per-solid features and mini-batch ordering."""

from __future__ import annotations

import io
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from ..brep_ir import load_solid
from ..geometry import EdgeInputBatch, FaceInputBatch
from ..model import SolidFeatures, prepare_solid
from ..synth import DatasetManifest
from ..topology import TopoMatrices, read_arrays, write_arrays

FEATURE_SUFFIX = ".feat"


def split_dataset(
    manifest: DatasetManifest | int, fractions: Sequence[float] = (0.7, 0.15, 0.15), seed: int = 0
) -> tuple[list[int], list[int], list[int]]:
    """Deterministic disjoint train/val/test index lists covering every solid.

    ``round(f0 * n)`` solids go to train, ``round(f1 * n)`` to val, the rest to test.
    """
    n = manifest if isinstance(manifest, int) else manifest.count
    if len(fractions) != 3 or any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"split fractions must be three non-negative numbers summing to 1, got {fractions}")
    if n < 0:
        raise ValueError("dataset size must be non-negative")
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(fractions[0] * n))
    n_val = min(int(round(fractions[1] * n)), n - n_train)
    train = sorted(int(i) for i in order[:n_train])
    val = sorted(int(i) for i in order[n_train : n_train + n_val])
    test = sorted(int(i) for i in order[n_train + n_val :])
    return train, val, test


def features_to_bytes(feat: SolidFeatures) -> bytes:
    arrays = {
        "face_uv": feat.faces.uv,
        "face_type": feat.faces.type_onehot,
        "face_area": feat.faces.area,
        "face_centroid": feat.faces.centroid,
        "face_rational": feat.faces.rational,
        "edge_uv": feat.edges.uv,
        "edge_type": feat.edges.type_onehot,
        "edge_length": feat.edges.length,
        "edge_convexity": feat.edges.convexity_onehot,
        "m_d": feat.topo.m_d,
        "m_a": feat.topo.m_a,
        "m_c": feat.topo.m_c,
        "m_e": feat.topo.m_e,
    }
    if feat.labels is not None:
        arrays["labels"] = feat.labels
    buf = io.BytesIO()
    write_arrays(buf, arrays)
    return buf.getvalue()


def features_from_bytes(data: bytes) -> SolidFeatures:
    a = read_arrays(io.BytesIO(data))
    faces = FaceInputBatch(a["face_uv"], a["face_type"], a["face_area"], a["face_centroid"], a["face_rational"])
    edges = EdgeInputBatch(a["edge_uv"], a["edge_type"], a["edge_length"], a["edge_convexity"])
    topo = TopoMatrices(a["m_d"], a["m_a"], a["m_c"], a["m_e"], int(a["m_e"].shape[2]))
    return SolidFeatures(faces, edges, topo, a.get("labels"))


def load_dataset_features(
    dataset_dir: str | os.PathLike,
    max_distance: int,
    cache_dir: str | os.PathLike | None = None,
    indices: Sequence[int] | None = None,
) -> tuple[DatasetManifest, dict[int, SolidFeatures]]:
    """Features for the requested solids, read from ``cache_dir`` when present and written there otherwise."""
    root = Path(dataset_dir)
    manifest = DatasetManifest.load(root)
    cache = Path(cache_dir) if cache_dir is not None else None
    if cache is not None:
        cache.mkdir(parents=True, exist_ok=True)
    wanted = range(manifest.count) if indices is None else indices
    out: dict[int, SolidFeatures] = {}
    for i in wanted:
        name = manifest.files[i]
        cached = cache / f"{Path(name).stem}.md{max_distance}{FEATURE_SUFFIX}" if cache is not None else None
        if cached is not None and cached.exists():
            out[i] = features_from_bytes(cached.read_bytes())
            continue
        solid = load_solid(root / name)
        if solid.labels is None:
            raise ValueError(f"{name}: training data needs a label on every face")
        feat = prepare_solid(solid, max_distance)
        if cached is not None:
            cached.write_bytes(features_to_bytes(feat))
        out[i] = feat
    return manifest, out


def batch_order(indices: Sequence[int], batch_size: int, rng: np.random.Generator | None) -> list[list[int]]:
    """Consecutive batches of ``indices``, shuffled first when ``rng`` is given."""
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    idx = list(indices)
    if rng is not None:
        idx = [idx[k] for k in rng.permutation(len(idx))]
    return [idx[k : k + batch_size] for k in range(0, len(idx), batch_size)]
