"""Checkpoint files: a JSON manifest plus one little-endian float32 payload.

Parameters are concatenated in manifest order; the manifest records each
name and shape so the payload can be split without extra framing.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import numpy as np

CHECKPOINT_VERSION = 1
MANIFEST = "checkpoint.json"
PAYLOAD = "checkpoint.bin"


def save_checkpoint(directory: str | os.PathLike, params: dict[str, Any], extra: dict[str, Any] | None = None) -> Path:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    with open(out / PAYLOAD, "wb") as fh:
        for name, p in params.items():
            arr = np.asarray(getattr(p, "data", p), dtype="<f4")
            entries.append({"name": name, "shape": list(arr.shape)})
            fh.write(np.ascontiguousarray(arr).tobytes())
    manifest = {"version": CHECKPOINT_VERSION, "dtype": "float32", "params": entries}
    if extra:
        manifest.update(extra)
    (out / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return out


def load_checkpoint(directory: str | os.PathLike) -> tuple[dict[str, np.ndarray], dict[str, Any]]:
    src = Path(directory)
    manifest = json.loads((src / MANIFEST).read_text(encoding="utf-8"))
    if manifest.get("version") != CHECKPOINT_VERSION or manifest.get("dtype") != "float32":
        raise ValueError(f"unsupported checkpoint in {src}")
    payload = np.fromfile(src / PAYLOAD, dtype="<f4")
    params = {}
    offset = 0
    for entry in manifest["params"]:
        shape = tuple(entry["shape"])
        size = int(np.prod(shape))
        if offset + size > payload.size:
            raise ValueError(f"checkpoint payload is truncated at {entry['name']!r}")
        params[entry["name"]] = payload[offset : offset + size].reshape(shape).astype(np.float32)
        offset += size
    if offset != payload.size:
        raise ValueError("checkpoint payload has trailing data")
    return params, manifest
