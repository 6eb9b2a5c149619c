"""Network input tensors built from a solid's UV grids and attributes."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .brep_ir import CONVEXITY, CURVE_TYPES, SURFACE_TYPES, EdgeRecord, FaceRecord, SolidGraph

_SURFACE_SLOT = {name: i for i, name in enumerate(SURFACE_TYPES)}
_CURVE_SLOT = {name: i for i, name in enumerate(CURVE_TYPES)}
_CONVEXITY_SLOT = {name: i for i, name in enumerate(CONVEXITY)}


@dataclass
class FaceInputBatch:
    uv: np.ndarray  # [N, 10, 10, 7]
    type_onehot: np.ndarray  # [N, 9]
    area: np.ndarray  # [N, 1]
    centroid: np.ndarray  # [N, 3]
    rational: np.ndarray  # [N, 1]

    def __len__(self) -> int:
        return self.uv.shape[0]

    def take(self, rows: np.ndarray) -> "FaceInputBatch":
        return FaceInputBatch(*(a[rows] for a in (self.uv, self.type_onehot, self.area, self.centroid, self.rational)))


@dataclass
class EdgeInputBatch:
    uv: np.ndarray  # [E, 10, 12]
    type_onehot: np.ndarray  # [E, 11]
    length: np.ndarray  # [E, 1]
    convexity_onehot: np.ndarray  # [E, 3]

    def __len__(self) -> int:
        return self.uv.shape[0]

    def take(self, rows: np.ndarray) -> "EdgeInputBatch":
        return EdgeInputBatch(*(a[rows] for a in (self.uv, self.type_onehot, self.length, self.convexity_onehot)))


def _onehot(index: list[int], width: int) -> np.ndarray:
    out = np.zeros((len(index), width))
    out[np.arange(len(index)), index] = 1.0
    return out


def build_face_inputs(solid: SolidGraph, zero_hidden: bool = False) -> FaceInputBatch:
    """Stack per-face tensors in face-id order.

    Unknown surface types fall into the last slot ("extrusion"). With
    ``zero_hidden`` the position and normal channels of invisible samples are
    zeroed; by default they are kept and only the mask channel marks them.
    """
    uv = np.stack([np.asarray(f.uv_grid, dtype=np.float64) for f in solid.faces])
    if zero_hidden:
        uv = uv.copy()
        uv[..., :6] *= uv[..., 6:7]
    slots = [_SURFACE_SLOT.get(f.surface_type, len(SURFACE_TYPES) - 1) for f in solid.faces]
    return FaceInputBatch(
        uv=uv,
        type_onehot=_onehot(slots, len(SURFACE_TYPES)),
        area=np.array([[f.area] for f in solid.faces], dtype=np.float64),
        centroid=np.array([np.asarray(f.centroid, dtype=np.float64) for f in solid.faces]),
        rational=np.array([[1.0 if f.is_rational else 0.0] for f in solid.faces]),
    )


def build_edge_inputs(solid: SolidGraph) -> EdgeInputBatch:
    """Stack per-edge tensors in edge-id order; unknown curve types map to "other"."""
    if not solid.edges:
        return EdgeInputBatch(
            np.zeros((0, 10, 12)), np.zeros((0, len(CURVE_TYPES))), np.zeros((0, 1)), np.zeros((0, 3))
        )
    return EdgeInputBatch(
        uv=np.stack([np.asarray(e.uv_grid, dtype=np.float64) for e in solid.edges]),
        type_onehot=_onehot(
            [_CURVE_SLOT.get(e.curve_type, len(CURVE_TYPES) - 1) for e in solid.edges], len(CURVE_TYPES)
        ),
        length=np.array([[e.length] for e in solid.edges], dtype=np.float64),
        convexity_onehot=_onehot([_CONVEXITY_SLOT[e.convexity] for e in solid.edges], len(CONVEXITY)),
    )


def normalize_solid(solid: SolidGraph) -> SolidGraph:
    """Centre the bounding box at the origin and scale its diagonal to 2.

    Positions, centroids, areas and lengths are rescaled; normals, tangents
    and visibility are untouched. A solid that is already normalized is
    returned unchanged.
    """
    lo = np.asarray(solid.bbox_min, dtype=np.float64)
    hi = np.asarray(solid.bbox_max, dtype=np.float64)
    diag = float(np.linalg.norm(hi - lo))
    if not diag > 0 or not math.isfinite(diag):
        raise ValueError("degenerate bounding box")
    center = 0.5 * (lo + hi)
    scale = 2.0 / diag
    if abs(scale - 1.0) < 1e-12 and np.all(np.abs(center) < 1e-12):
        return solid
    return _affine(solid, np.eye(3) * scale, -center * scale, scale, rotate_vectors=False)


def transform_solid(solid: SolidGraph, rotation: np.ndarray, translation: np.ndarray) -> SolidGraph:
    """Apply ``p -> R p + t`` to all geometry; the bbox becomes the AABB of the moved box corners."""
    return _affine(solid, np.asarray(rotation, dtype=np.float64), np.asarray(translation, dtype=np.float64), 1.0, True)


def _affine(solid: SolidGraph, A: np.ndarray, t: np.ndarray, scale: float, rotate_vectors: bool) -> SolidGraph:
    R = A if rotate_vectors else np.eye(3)

    def pts(p):
        return p @ A.T + t

    faces = []
    for f in solid.faces:
        g = np.array(f.uv_grid, dtype=np.float64)
        g[..., 0:3] = pts(g[..., 0:3])
        g[..., 3:6] = g[..., 3:6] @ R.T
        faces.append(replace(f, area=f.area * scale**2, centroid=pts(np.asarray(f.centroid, dtype=np.float64)), uv_grid=g))
    edges = []
    for e in solid.edges:
        g = np.array(e.uv_grid, dtype=np.float64)
        g[:, 0:3] = pts(g[:, 0:3])
        for a in (3, 6, 9):
            g[:, a : a + 3] = g[:, a : a + 3] @ R.T
        edges.append(replace(e, length=e.length * scale, uv_grid=g))
    lo = np.asarray(solid.bbox_min, dtype=np.float64)
    hi = np.asarray(solid.bbox_max, dtype=np.float64)
    corners = np.array([[x, y, z] for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    moved = pts(corners)
    return SolidGraph(faces=faces, edges=edges, bbox_min=moved.min(0), bbox_max=moved.max(0))


def permute_solid(solid: SolidGraph, face_order, edge_order=None) -> SolidGraph:
    """Renumber faces (and optionally edges): new face k is old face ``face_order[k]``."""
    face_order = np.asarray(face_order)
    inverse = np.empty_like(face_order)
    inverse[face_order] = np.arange(len(face_order))
    edges_src = solid.edges if edge_order is None else [solid.edges[k] for k in edge_order]
    edges = [
        EdgeRecord(e.curve_type, e.length, e.convexity, int(inverse[e.face_a]), int(inverse[e.face_b]), e.uv_grid)
        for e in edges_src
    ]
    faces: list[FaceRecord] = [solid.faces[k] for k in face_order]
    return SolidGraph(faces=faces, edges=edges, bbox_min=solid.bbox_min, bbox_max=solid.bbox_max)
