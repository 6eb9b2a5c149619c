"""Pairwise face topology: hop distance, angle, centroid distance, edge paths.

Also holds the flat binary array container used by ``brepfr features``.
"""

from __future__ import annotations

import io
import math
import struct
from collections import deque
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .brep_ir import SolidGraph

DEFAULT_MAX_DISTANCE = 16
DEGENERATE_NORMAL = 1e-9


@dataclass
class TopoMatrices:
    m_d: np.ndarray  # int64 [N, N]
    m_a: np.ndarray  # float64 [N, N], radians
    m_c: np.ndarray  # float64 [N, N]
    m_e: np.ndarray  # int64 [N, N, max_distance], -1 padded
    max_distance: int
    degenerate_normals: int = 0

    def permuted(self, order: np.ndarray, edge_order: np.ndarray | None = None) -> "TopoMatrices":
        """Matrices of the same solid with faces renumbered so new face k is old face ``order[k]``.

        ``edge_order`` renumbers edges the same way.
        """
        ix = np.ix_(order, order)
        m_e = self.m_e[ix]
        if edge_order is not None:
            inverse = np.empty_like(edge_order)
            inverse[edge_order] = np.arange(len(edge_order))
            m_e = np.where(m_e >= 0, inverse[np.maximum(m_e, 0)], -1)
        return TopoMatrices(self.m_d[ix], self.m_a[ix], self.m_c[ix], m_e, self.max_distance, self.degenerate_normals)


def adjacency(solid: SolidGraph) -> list[dict[int, list[int]]]:
    """Per face: neighbour face id -> sorted ids of the edges shared with it."""
    adj: list[dict[int, list[int]]] = [dict() for _ in solid.faces]
    for k, e in enumerate(solid.edges):
        adj[e.face_a].setdefault(e.face_b, []).append(k)
        adj[e.face_b].setdefault(e.face_a, []).append(k)
    return adj


def hop_distances(solid: SolidGraph) -> np.ndarray:
    """Exact all-pairs hop counts, -1 where no path exists.

    Every link has unit weight, so one breadth-first search per source face
    gives the same answer Dijkstra would.
    """
    n = solid.num_faces
    adj = adjacency(solid)
    out = np.full((n, n), -1, dtype=np.int64)
    for src in range(n):
        row = out[src]
        row[src] = 0
        queue = deque([src])
        while queue:
            f = queue.popleft()
            for g in adj[f]:
                if row[g] < 0:
                    row[g] = row[f] + 1
                    queue.append(g)
    return out


def face_shortest_distances(solid: SolidGraph, max_distance: int = DEFAULT_MAX_DISTANCE) -> np.ndarray:
    """Hop-count matrix with unreachable pairs set to ``max_distance + 1``."""
    hops = hop_distances(solid)
    return np.where(hops < 0, max_distance + 1, hops)


def _angle(a: np.ndarray, b: np.ndarray) -> float:
    return math.acos(max(-1.0, min(1.0, float(np.dot(a, b)))))


def _mean_normals(solid: SolidGraph) -> tuple[np.ndarray, np.ndarray]:
    means = np.zeros((solid.num_faces, 3))
    ok = np.zeros(solid.num_faces, dtype=bool)
    for i, face in enumerate(solid.faces):
        g = np.asarray(face.uv_grid, dtype=np.float64)
        vis = g[..., 6] == 1.0
        if not vis.any():
            continue
        m = g[..., 3:6][vis].mean(axis=0)
        norm = np.linalg.norm(m)
        if norm > DEGENERATE_NORMAL:
            means[i] = m / norm
            ok[i] = True
    return means, ok


def face_angular_matrix(solid: SolidGraph) -> tuple[np.ndarray, int]:
    """Angles between faces in radians, plus the count of degenerate mean normals hit.

    Adjacent faces use the two face normals stored at the middle sample of
    each shared edge (averaged over shared edges). Other pairs use the mean
    visible normal of each face; a pair involving a face whose mean normal
    vanishes (a full cylinder, say) is set to 0.
    """
    n = solid.num_faces
    out = np.zeros((n, n))
    means, ok = _mean_normals(solid)
    adj = adjacency(solid)
    degenerate = 0
    for i in range(n):
        for j in range(i + 1, n):
            shared = adj[i].get(j)
            if shared:
                angles = []
                for k in shared:
                    g = np.asarray(solid.edges[k].uv_grid, dtype=np.float64)
                    mid = g[g.shape[0] // 2]
                    angles.append(_angle(mid[6:9], mid[9:12]))
                value = float(np.mean(angles))
            elif ok[i] and ok[j]:
                value = _angle(means[i], means[j])
            else:
                value = 0.0
                degenerate += 1
            out[i, j] = out[j, i] = value
    return out, degenerate


def face_centroid_matrix(solid: SolidGraph) -> np.ndarray:
    diag = solid.bbox_diagonal()
    if not diag > 0:
        raise ValueError("bounding box diagonal must be positive")
    c = np.array([np.asarray(f.centroid, dtype=np.float64) for f in solid.faces])
    diff = c[:, None, :] - c[None, :, :]
    return np.sqrt((diff**2).sum(-1)) / diag


def shortest_edge_paths(solid: SolidGraph, max_distance: int = DEFAULT_MAX_DISTANCE) -> np.ndarray:
    """Edge ids along one shortest face path for every ordered pair, -1 padded.

    From face i the walk always steps to the lowest-numbered neighbour that is
    one hop closer to j, crossing the lowest-numbered shared edge. Paths longer
    than ``max_distance`` keep their first ``max_distance`` edges.
    """
    if max_distance < 1:
        raise ValueError("max_distance must be >= 1")
    n = solid.num_faces
    hops = hop_distances(solid)
    adj = adjacency(solid)
    nbrs = [sorted(a) for a in adj]
    out = np.full((n, n, max_distance), -1, dtype=np.int64)
    for j in range(n):
        to_j = hops[:, j]
        # first step towards j from every face that can reach it
        step = np.full(n, -1, dtype=np.int64)
        for f in range(n):
            if to_j[f] > 0:
                step[f] = next(w for w in nbrs[f] if to_j[w] == to_j[f] - 1)
        for i in range(n):
            cur, k = i, 0
            while to_j[cur] > 0 and k < max_distance:
                nxt = step[cur]
                out[i, j, k] = adj[cur][nxt][0]
                cur, k = nxt, k + 1
    return out


def compute_topology(solid: SolidGraph, max_distance: int = DEFAULT_MAX_DISTANCE) -> TopoMatrices:
    m_d = face_shortest_distances(solid, max_distance)
    m_a, degenerate = face_angular_matrix(solid)
    m_c = face_centroid_matrix(solid)
    m_e = shortest_edge_paths(solid, max_distance)
    return TopoMatrices(m_d, m_a, m_c, m_e, max_distance, degenerate)


# --------------------------------------------------------------------------
# flat binary container: magic, count, then per array
#   u16 name length, name, u8 dtype length, dtype str, u8 ndim, u32 dims, payload

MAGIC = b"BRFA"
_DTYPES = {"<i8", "<f8", "<f4", "<i4", "|u1"}


def write_arrays(fh: BinaryIO, arrays: dict[str, np.ndarray]) -> None:
    fh.write(MAGIC)
    fh.write(struct.pack("<I", len(arrays)))
    for name, arr in arrays.items():
        arr = np.asarray(arr)
        dt = arr.dtype.newbyteorder("<") if arr.dtype.byteorder == ">" else arr.dtype
        code = dt.str
        if code not in _DTYPES:
            raise ValueError(f"unsupported dtype {arr.dtype} for {name!r}")
        raw = name.encode("utf-8")
        fh.write(struct.pack("<H", len(raw)) + raw)
        fh.write(struct.pack("<B", len(code)) + code.encode("ascii"))
        fh.write(struct.pack("<B", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr, dtype=code).tobytes())


def read_arrays(fh: BinaryIO) -> dict[str, np.ndarray]:
    if fh.read(4) != MAGIC:
        raise ValueError("not an array container")
    (count,) = struct.unpack("<I", fh.read(4))
    out = {}
    for _ in range(count):
        (nlen,) = struct.unpack("<H", fh.read(2))
        name = fh.read(nlen).decode("utf-8")
        (clen,) = struct.unpack("<B", fh.read(1))
        code = fh.read(clen).decode("ascii")
        if code not in _DTYPES:
            raise ValueError(f"unsupported dtype {code!r}")
        (ndim,) = struct.unpack("<B", fh.read(1))
        shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
        dt = np.dtype(code)
        size = int(np.prod(shape)) * dt.itemsize
        payload = fh.read(size)
        if len(payload) != size:
            raise ValueError(f"truncated payload for {name!r}")
        out[name] = np.frombuffer(payload, dtype=dt).reshape(shape).copy()
    return out


def topology_to_bytes(topo: TopoMatrices) -> bytes:
    buf = io.BytesIO()
    write_arrays(buf, {"m_d": topo.m_d, "m_a": topo.m_a, "m_c": topo.m_c, "m_e": topo.m_e})
    return buf.getvalue()


def topology_from_bytes(data: bytes) -> TopoMatrices:
    arrays = read_arrays(io.BytesIO(data))
    m_e = arrays["m_e"]
    return TopoMatrices(arrays["m_d"], arrays["m_a"], arrays["m_c"], m_e, int(m_e.shape[2]))
