"""Template-based synthetic dataset of labeled solids.

Each solid is a rectangular stock block with one to four machining features
cut into (or raised from) its top or bottom face. Features are composed by
editing the face graph directly: the host face gets an inner loop and the
feature's own faces and edges are appended. Planes and cylinders are sampled
analytically, so no CAD kernel is involved.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np
from shapely.geometry import Point, Polygon, box

from .brep_ir import (
    EDGE_GRID,
    FACE_GRID,
    EdgeRecord,
    FaceRecord,
    SolidGraph,
    canonicalize_solid,
    dumps_canonical,
    serialize_solid,
)

FEATURE_KINDS = ("through_hole", "blind_hole", "rect_pocket", "rect_slot", "circular_boss")
CLASS_NAMES = ("stock",) + FEATURE_KINDS
CLASS_IDS = {name: i for i, name in enumerate(CLASS_NAMES)}

# faces contributed by one instance of each kind
FACES_PER_KIND = {
    "through_hole": 1,
    "blind_hole": 2,
    "rect_pocket": 5,
    "rect_slot": 4,
    "circular_boss": 2,
}

MARGIN_FRACTION = 0.02
NU = FACE_GRID[0]
NV = FACE_GRID[1]
NE = EDGE_GRID[0]

_Z = np.array([0.0, 0.0, 1.0])


class FeatureError(ValueError):
    """A template cannot be placed: overlap, out of bounds or bad size."""


@dataclass
class FeatureTemplate:
    """One stock block or one machining feature.

    Sizes are in model units. ``position`` is the footprint centre in the
    host face's (x, y) coordinates; ``None`` means sample it.
    """

    kind: str
    size: tuple[float, float, float] = (1.0, 1.0, 1.0)  # stock only: x, y, z extents
    radius: float = 0.0
    width: float = 0.0
    length: float = 0.0
    depth: float = 0.0  # pocket/hole depth or boss height
    position: tuple[float, float] | None = None
    rotation: float = 0.0
    host: str = "top"

    @classmethod
    def stock(cls, x: float, y: float, z: float) -> "FeatureTemplate":
        return cls("stock", size=(x, y, z))


# --------------------------------------------------------------------------
# 2D footprints in a face-local frame


@dataclass
class _Rect2D:
    cx: float
    cy: float
    w: float
    l: float
    theta: float = 0.0

    @property
    def area(self) -> float:
        return self.w * self.l

    @property
    def centroid(self) -> np.ndarray:
        return np.array([self.cx, self.cy])

    def local(self, x, y):
        c, s = math.cos(self.theta), math.sin(self.theta)
        dx, dy = x - self.cx, y - self.cy
        return c * dx + s * dy, -s * dx + c * dy

    def contains(self, x, y, tol: float) -> np.ndarray:
        a, b = self.local(x, y)
        return (np.abs(a) <= self.w / 2 + tol) & (np.abs(b) <= self.l / 2 + tol)

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.w / 2, self.cy - self.l / 2, self.cx + self.w / 2, self.cy + self.l / 2)

    def polygon(self) -> Polygon:
        c, s = math.cos(self.theta), math.sin(self.theta)
        pts = []
        for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            x, y = a * self.w / 2, b * self.l / 2
            pts.append((self.cx + c * x - s * y, self.cy + s * x + c * y))
        return Polygon(pts)


@dataclass
class _Circle2D:
    cx: float
    cy: float
    r: float

    @property
    def area(self) -> float:
        return math.pi * self.r**2

    @property
    def centroid(self) -> np.ndarray:
        return np.array([self.cx, self.cy])

    def contains(self, x, y, tol: float) -> np.ndarray:
        return np.hypot(x - self.cx, y - self.cy) <= self.r + tol

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.cx - self.r, self.cy - self.r, self.cx + self.r, self.cy + self.r)

    def polygon(self) -> Polygon:
        return Point(self.cx, self.cy).buffer(self.r, quad_segs=32)


# --------------------------------------------------------------------------
# analytic surfaces


@dataclass
class _PlaneFace:
    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray
    normal: np.ndarray
    outer: _Rect2D | _Circle2D
    label: int
    holes: list = field(default_factory=list)

    def normal_at(self, p: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.normal, np.shape(p)).copy()

    def record(self) -> FaceRecord:
        x0, y0, x1, y1 = self.outer.bounds()
        s = np.linspace(x0, x1, NU)
        t = np.linspace(y0, y1, NV)
        S, T = np.meshgrid(s, t, indexing="ij")
        tol = 1e-9 * max(x1 - x0, y1 - y0)
        vis = self.outer.contains(S, T, tol)
        for hole in self.holes:
            vis &= ~hole.contains(S, T, -tol)
        grid = np.empty(FACE_GRID)
        grid[..., 0:3] = self.origin + S[..., None] * self.u + T[..., None] * self.v
        grid[..., 3:6] = self.normal
        grid[..., 6] = vis.astype(np.float64)

        area = self.outer.area - sum(h.area for h in self.holes)
        moment = self.outer.area * self.outer.centroid - sum(
            (h.area * h.centroid for h in self.holes), np.zeros(2)
        )
        c2 = moment / area
        centroid = self.origin + c2[0] * self.u + c2[1] * self.v
        return FaceRecord("plane", float(area), centroid, False, grid, self.label)


@dataclass
class _CylinderFace:
    base: np.ndarray  # point on the axis at the start of the face
    axis: np.ndarray  # unit
    e1: np.ndarray  # unit, perpendicular to axis; angle 0
    radius: float
    height: float
    sign: float  # +1 normals point away from the axis, -1 towards it
    label: int

    @property
    def e2(self) -> np.ndarray:
        return np.cross(self.axis, self.e1)

    def normal_at(self, p: np.ndarray) -> np.ndarray:
        d = p - self.base
        radial = d - np.outer(d @ self.axis, self.axis).reshape(np.shape(d))
        return self.sign * radial / np.linalg.norm(radial, axis=-1, keepdims=True)

    def record(self) -> FaceRecord:
        theta = np.linspace(0.0, 2 * math.pi, NU, endpoint=False)
        t = np.linspace(0.0, self.height, NV)
        TH, T = np.meshgrid(theta, t, indexing="ij")
        radial = np.cos(TH)[..., None] * self.e1 + np.sin(TH)[..., None] * self.e2
        grid = np.empty(FACE_GRID)
        grid[..., 0:3] = self.base + self.radius * radial + T[..., None] * self.axis
        grid[..., 3:6] = self.sign * radial
        grid[..., 6] = 1.0
        area = 2 * math.pi * self.radius * self.height
        centroid = self.base + 0.5 * self.height * self.axis
        return FaceRecord("cylinder", float(area), centroid, False, grid, self.label)


@dataclass
class _LineEdge:
    p0: np.ndarray
    p1: np.ndarray
    face_a: int
    face_b: int
    convexity: str

    def record(self, faces: list) -> EdgeRecord:
        s = np.linspace(0.0, 1.0, NE)[:, None]
        pts = self.p0 + s * (self.p1 - self.p0)
        d = self.p1 - self.p0
        length = float(np.linalg.norm(d))
        grid = np.empty(EDGE_GRID)
        grid[:, 0:3] = pts
        grid[:, 3:6] = d / length
        grid[:, 6:9] = faces[self.face_a].normal_at(pts)
        grid[:, 9:12] = faces[self.face_b].normal_at(pts)
        return EdgeRecord("line", length, self.convexity, self.face_a, self.face_b, grid)


@dataclass
class _CircleEdge:
    center: np.ndarray
    axis: np.ndarray
    e1: np.ndarray
    radius: float
    face_a: int
    face_b: int
    convexity: str

    def record(self, faces: list) -> EdgeRecord:
        e2 = np.cross(self.axis, self.e1)
        theta = np.linspace(0.0, 2 * math.pi, NE, endpoint=False)[:, None]
        pts = self.center + self.radius * (np.cos(theta) * self.e1 + np.sin(theta) * e2)
        grid = np.empty(EDGE_GRID)
        grid[:, 0:3] = pts
        grid[:, 3:6] = -np.sin(theta) * self.e1 + np.cos(theta) * e2
        grid[:, 6:9] = faces[self.face_a].normal_at(pts)
        grid[:, 9:12] = faces[self.face_b].normal_at(pts)
        length = 2 * math.pi * self.radius
        return EdgeRecord("circle", length, self.convexity, self.face_a, self.face_b, grid)


# --------------------------------------------------------------------------
# composition


BOTTOM, TOP, FRONT, BACK, LEFT, RIGHT = range(6)


class _Builder:
    def __init__(self, sx: float, sy: float, sz: float):
        if min(sx, sy, sz) <= 0:
            raise FeatureError("stock extents must be positive")
        self.size = (sx, sy, sz)
        self.faces: list = []
        self.edges: list = []
        self.footprints: list[Polygon] = []
        self.zmin, self.zmax = 0.0, sz
        self.margin = MARGIN_FRACTION * min(sx, sy)
        self._box(sx, sy, sz)

    def add_face(self, face) -> int:
        self.faces.append(face)
        return len(self.faces) - 1

    def _box(self, sx, sy, sz) -> None:
        X, Y = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
        o = np.zeros(3)
        stock = CLASS_IDS["stock"]
        xy = _Rect2D(sx / 2, sy / 2, sx, sy)
        self.add_face(_PlaneFace(o, X, Y, -_Z, xy, stock))
        self.add_face(_PlaneFace(np.array([0, 0, sz]), X, Y, _Z, _Rect2D(sx / 2, sy / 2, sx, sy), stock))
        self.add_face(_PlaneFace(o, X, _Z, -Y, _Rect2D(sx / 2, sz / 2, sx, sz), stock))
        self.add_face(_PlaneFace(np.array([0, sy, 0]), X, _Z, Y, _Rect2D(sx / 2, sz / 2, sx, sz), stock))
        self.add_face(_PlaneFace(o, Y, _Z, -X, _Rect2D(sy / 2, sz / 2, sy, sz), stock))
        self.add_face(_PlaneFace(np.array([sx, 0, 0]), Y, _Z, X, _Rect2D(sy / 2, sz / 2, sy, sz), stock))

        def p(x, y, z):
            return np.array([x, y, z], dtype=np.float64)

        for z, cap in ((0.0, BOTTOM), (sz, TOP)):
            self.edges.append(_LineEdge(p(0, 0, z), p(sx, 0, z), cap, FRONT, "convex"))
            self.edges.append(_LineEdge(p(sx, sy, z), p(0, sy, z), cap, BACK, "convex"))
            self.edges.append(_LineEdge(p(0, sy, z), p(0, 0, z), cap, LEFT, "convex"))
            self.edges.append(_LineEdge(p(sx, 0, z), p(sx, sy, z), cap, RIGHT, "convex"))
        self.edges.append(_LineEdge(p(0, 0, 0), p(0, 0, sz), FRONT, LEFT, "convex"))
        self.edges.append(_LineEdge(p(sx, 0, 0), p(sx, 0, sz), FRONT, RIGHT, "convex"))
        self.edges.append(_LineEdge(p(sx, sy, 0), p(sx, sy, sz), BACK, RIGHT, "convex"))
        self.edges.append(_LineEdge(p(0, sy, 0), p(0, sy, sz), BACK, LEFT, "convex"))

    # ---- placement checks

    def footprint(self, t: FeatureTemplate):
        cx, cy = t.position
        if t.kind in ("through_hole", "blind_hole", "circular_boss"):
            if t.radius <= 0:
                raise FeatureError(f"{t.kind}: radius must be positive")
            return _Circle2D(cx, cy, t.radius)
        if t.width <= 0 or t.length <= 0:
            raise FeatureError(f"{t.kind}: width and length must be positive")
        return _Rect2D(cx, cy, t.width, t.length, t.rotation)

    def check(self, t: FeatureTemplate, fp) -> Polygon:
        sx, sy, sz = self.size
        if t.kind in ("blind_hole", "rect_pocket") and not 0 < t.depth < sz:
            raise FeatureError(f"{t.kind}: depth {t.depth} must lie in (0, {sz})")
        if t.kind == "circular_boss" and t.depth <= 0:
            raise FeatureError("circular_boss: height must be positive")
        poly = fp.polygon()
        if not box(0, 0, sx, sy).contains(poly.buffer(self.margin)):
            raise FeatureError(f"{t.kind}: footprint exceeds stock bounds")
        for other in self.footprints:
            if poly.distance(other) < self.margin:
                raise FeatureError(f"{t.kind}: footprint overlaps another feature")
        return poly

    # ---- feature surgery

    def add(self, t: FeatureTemplate) -> None:
        if t.kind not in FEATURE_KINDS:
            raise FeatureError(f"unknown feature kind {t.kind!r}")
        if t.host not in ("top", "bottom"):
            raise FeatureError(f"host must be 'top' or 'bottom', got {t.host!r}")
        if t.position is None:
            raise FeatureError("feature position is unset")
        fp = self.footprint(t)
        self.footprints.append(self.check(t, fp))

        sz = self.size[2]
        host = TOP if t.host == "top" else BOTTOM
        n = _Z if host == TOP else -_Z
        z0 = sz if host == TOP else 0.0
        label = CLASS_IDS[t.kind]
        cx, cy = t.position
        self.faces[host].holes.append(fp)
        X = np.array([1.0, 0, 0])

        if t.kind == "through_hole":
            self.faces[BOTTOM if host == TOP else TOP].holes.append(fp)
            wall = self.add_face(_CylinderFace(np.array([cx, cy, 0.0]), _Z, X, t.radius, sz, -1.0, label))
            self.edges.append(_CircleEdge(np.array([cx, cy, sz]), _Z, X, t.radius, TOP, wall, "convex"))
            self.edges.append(_CircleEdge(np.array([cx, cy, 0.0]), _Z, X, t.radius, BOTTOM, wall, "convex"))

        elif t.kind == "blind_hole":
            zb = z0 - t.depth * n[2]
            bottom_c = np.array([cx, cy, zb])
            wall = self.add_face(_CylinderFace(bottom_c, n, X, t.radius, t.depth, -1.0, label))
            floor = self.add_face(
                _PlaneFace(np.zeros(3) + [0, 0, zb], X, np.array([0, 1.0, 0]), n, _Circle2D(cx, cy, t.radius), label)
            )
            self.edges.append(_CircleEdge(np.array([cx, cy, z0]), n, X, t.radius, host, wall, "convex"))
            self.edges.append(_CircleEdge(bottom_c, n, X, t.radius, wall, floor, "concave"))

        elif t.kind == "circular_boss":
            ztop = z0 + t.depth * n[2]
            wall = self.add_face(_CylinderFace(np.array([cx, cy, z0]), n, X, t.radius, t.depth, 1.0, label))
            top = self.add_face(
                _PlaneFace(np.array([0, 0, ztop]), X, np.array([0, 1.0, 0]), n, _Circle2D(cx, cy, t.radius), label)
            )
            self.edges.append(_CircleEdge(np.array([cx, cy, z0]), n, X, t.radius, host, wall, "concave"))
            self.edges.append(_CircleEdge(np.array([cx, cy, ztop]), n, X, t.radius, wall, top, "convex"))
            self.zmin = min(self.zmin, ztop)
            self.zmax = max(self.zmax, ztop)

        else:  # rect_pocket, rect_slot
            through = t.kind == "rect_slot"
            if through:
                self.faces[BOTTOM if host == TOP else TOP].holes.append(fp)
                zb, zt, up = 0.0, sz, _Z
            else:
                zb = z0 - t.depth * n[2]
                zt, up = z0, n
            c, s = math.cos(t.rotation), math.sin(t.rotation)
            ex, ey = np.array([c, s, 0.0]), np.array([-s, c, 0.0])
            hw, hl = t.width / 2, t.length / 2
            height = abs(zt - zb)
            center = np.array([cx, cy, 0.0])

            def corner(a, b, z):
                return center + a * hw * ex + b * hl * ey + np.array([0, 0, z])

            # (outward side direction, tangent along the wall, half extent across, half length along)
            sides = [(ex, ey, hw, hl), (ey, -ex, hl, hw), (-ex, -ey, hw, hl), (-ey, ex, hl, hw)]
            walls = []
            for d, tan, half_across, half_along in sides:
                start = center + half_across * d - half_along * tan + np.array([0, 0, zb])
                rect = _Rect2D(half_along, height / 2, 2 * half_along, height)
                walls.append(self.add_face(_PlaneFace(start, tan, up, -d, rect, label)))
            if not through:
                floor_origin = center - hw * ex - hl * ey + np.array([0, 0, zb])
                floor = self.add_face(
                    _PlaneFace(floor_origin, ex, ey, n, _Rect2D(hw, hl, t.width, t.length), label)
                )
            # corners in the same cyclic order as `sides`
            corners = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
            for k, wall in enumerate(walls):
                a0, b0 = corners[k - 1]
                a1, b1 = corners[k]
                p_host_0, p_host_1 = corner(a0, b0, z0), corner(a1, b1, z0)
                self.edges.append(_LineEdge(p_host_0, p_host_1, host, wall, "convex"))
                if through:
                    zo = 0.0 if host == TOP else sz
                    other = BOTTOM if host == TOP else TOP
                    self.edges.append(
                        _LineEdge(corner(a0, b0, zo), corner(a1, b1, zo), other, wall, "convex")
                    )
                else:
                    self.edges.append(_LineEdge(corner(a0, b0, zb), corner(a1, b1, zb), wall, floor, "concave"))
            for k, wall in enumerate(walls):
                nxt = walls[(k + 1) % 4]
                a, b = corners[k]
                self.edges.append(_LineEdge(corner(a, b, zb), corner(a, b, zt), wall, nxt, "concave"))

    def build(self) -> SolidGraph:
        faces = [f.record() for f in self.faces]
        edges = [e.record(self.faces) for e in self.edges]
        sx, sy, _ = self.size
        return SolidGraph(
            faces=faces,
            edges=edges,
            bbox_min=np.array([0.0, 0.0, self.zmin]),
            bbox_max=np.array([sx, sy, self.zmax]),
        )


# --------------------------------------------------------------------------
# public API


@dataclass
class SizeRanges:
    """Feature size ranges as fractions of the stock (min in-plane side / thickness)."""

    stock_xy: tuple[float, float] = (60.0, 120.0)
    stock_z: tuple[float, float] = (20.0, 40.0)
    hole_radius: tuple[float, float] = (0.04, 0.09)
    pocket_side: tuple[float, float] = (0.14, 0.28)
    slot_width: tuple[float, float] = (0.06, 0.12)
    slot_length: tuple[float, float] = (0.20, 0.34)
    depth: tuple[float, float] = (0.2, 0.8)
    boss_height: tuple[float, float] = (0.2, 0.8)


def sample_template(rng: np.random.Generator, kind: str, stock: FeatureTemplate, sizes: SizeRanges) -> FeatureTemplate:
    sx, sy, sz = stock.size
    side = min(sx, sy)
    host = "top" if rng.random() < 0.5 else "bottom"
    t = FeatureTemplate(kind, host=host)
    if kind in ("through_hole", "blind_hole", "circular_boss"):
        t.radius = rng.uniform(*sizes.hole_radius) * side
        extent = t.radius
    elif kind == "rect_pocket":
        t.width = rng.uniform(*sizes.pocket_side) * side
        t.length = rng.uniform(*sizes.pocket_side) * side
        t.rotation = rng.uniform(0.0, 2 * math.pi)
        extent = 0.5 * math.hypot(t.width, t.length)
    else:
        t.width = rng.uniform(*sizes.slot_width) * side
        t.length = rng.uniform(*sizes.slot_length) * side
        t.rotation = rng.uniform(0.0, 2 * math.pi)
        extent = 0.5 * math.hypot(t.width, t.length)
    if kind in ("blind_hole", "rect_pocket"):
        t.depth = rng.uniform(*sizes.depth) * sz
    elif kind == "circular_boss":
        t.depth = rng.uniform(*sizes.boss_height) * sz
    # margin-inset rectangle; the exact containment test happens in the builder
    inset = extent + MARGIN_FRACTION * side
    t.position = (rng.uniform(inset, sx - inset), rng.uniform(inset, sy - inset))
    return t


def generate_solid(seed: int, templates: Sequence[FeatureTemplate]) -> SolidGraph:
    """Compose the templates into one labeled solid.

    ``templates[0]`` must be the stock. Features with ``position=None`` get a
    placement drawn from ``seed``; explicit placements are used as given and
    raise :class:`FeatureError` on overlap or when they leave the stock.
    """
    if not templates or templates[0].kind != "stock":
        raise FeatureError("the first template must be the stock block")
    if any(t.kind == "stock" for t in templates[1:]):
        raise FeatureError("only one stock template is allowed")
    rng = np.random.default_rng(seed)
    builder = _Builder(*templates[0].size)
    sx, sy, _ = templates[0].size
    for t in templates[1:]:
        if t.position is None:
            x0, y0, x1, y1 = builder.footprint(replace(t, position=(0.0, 0.0))).polygon().bounds
            m = builder.margin
            t = replace(t, position=(rng.uniform(m - x0, sx - m - x1), rng.uniform(m - y0, sy - m - y1)))
        builder.add(t)
    return canonicalize_solid(builder.build())


def _kind_weights(kinds: Sequence[str]) -> np.ndarray:
    w = np.array([1.0 / FACES_PER_KIND[k] for k in kinds])
    return w / w.sum()


def random_solid(
    rng: np.random.Generator,
    kinds: Sequence[str] = FEATURE_KINDS,
    n_features: tuple[int, int] = (1, 4),
    sizes: SizeRanges | None = None,
    max_tries: int = 200,
) -> tuple[SolidGraph, list[FeatureTemplate]]:
    """Draw a stock and ``n_features`` features, redrawing placements until they fit."""
    sizes = sizes or SizeRanges()
    sx = rng.uniform(*sizes.stock_xy)
    sy = rng.uniform(*sizes.stock_xy)
    sz = rng.uniform(*sizes.stock_z)
    stock = FeatureTemplate.stock(sx, sy, sz)
    count = int(rng.integers(n_features[0], n_features[1] + 1))
    weights = _kind_weights(kinds)
    builder = _Builder(sx, sy, sz)
    placed = [stock]
    for _ in range(count):
        kind = kinds[int(rng.choice(len(kinds), p=weights))]
        for _ in range(max_tries):
            t = sample_template(rng, kind, stock, sizes)
            try:
                builder.add(t)
            except FeatureError:
                continue
            placed.append(t)
            break
        else:
            raise FeatureError(f"could not place a {kind} after {max_tries} tries")
    return canonicalize_solid(builder.build()), placed


@dataclass
class DatasetConfig:
    count: int = 800
    seed: int = 0
    classes: tuple[str, ...] = FEATURE_KINDS
    n_features: tuple[int, int] = (1, 4)
    split: tuple[float, float, float] = (0.7, 0.15, 0.15)
    sizes: SizeRanges = field(default_factory=SizeRanges)

    def __post_init__(self) -> None:
        unknown = [c for c in self.classes if c not in FEATURE_KINDS]
        if unknown:
            raise ValueError(f"unknown feature classes: {unknown}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1")


@dataclass
class DatasetManifest:
    seed: int
    count: int
    classes: list[str]
    files: list[str]
    per_class_faces: dict[str, int]
    per_class_features: dict[str, int]
    split: dict[str, list[int]]
    version: int = 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetManifest":
        return cls(**doc)

    @classmethod
    def load(cls, directory: str | os.PathLike) -> "DatasetManifest":
        with open(Path(directory) / "manifest.json", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def solid_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def generate_dataset(config: DatasetConfig, out_dir: str | os.PathLike) -> DatasetManifest:
    """Write ``config.count`` solid documents plus ``manifest.json`` into ``out_dir``."""
    from .harness.data import split_dataset

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise OSError(f"output directory {out} is not writable")

    faces = {name: 0 for name in CLASS_NAMES}
    features = {name: 0 for name in CLASS_NAMES}
    files = []
    for i in range(config.count):
        solid, placed = random_solid(solid_rng(config.seed, i), config.classes, config.n_features, config.sizes)
        name = f"solid_{i:05d}.json"
        (out / name).write_bytes(serialize_solid(solid))
        files.append(name)
        for f in solid.faces:
            faces[CLASS_NAMES[f.label]] += 1
        for t in placed:
            features[t.kind] += 1

    train, val, test = split_dataset(config.count, config.split, config.seed)
    manifest = DatasetManifest(
        seed=config.seed,
        count=config.count,
        classes=list(CLASS_NAMES),
        files=files,
        per_class_faces=faces,
        per_class_features=features,
        split={"train": train, "val": val, "test": test},
    )
    (out / "manifest.json").write_bytes(dumps_canonical(manifest.to_dict()))
    return manifest
