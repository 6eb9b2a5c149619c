"""Solid-graph data model and the JSON interchange format.

A solid is a list of faces and a list of edges; every edge joins exactly two
distinct faces. Geometry is carried as sampled UV grids plus a handful of
analytic attributes. Documents are canonical: sorted keys, no whitespace and
floats printed with 9 significant digits, so equal solids serialize to equal
bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

FORMAT_VERSION = 1

SURFACE_TYPES = (
    "plane",
    "cylinder",
    "cone",
    "sphere",
    "torus",
    "bezier",
    "bspline",
    "revolution",
    "extrusion",
)
CURVE_TYPES = (
    "line",
    "circle",
    "ellipse",
    "hyperbola",
    "parabola",
    "bezier",
    "bspline",
    "offset",
    "closed",
    "open",
    "other",
)
CONVEXITY = ("concave", "convex", "smooth")

FACE_GRID = (10, 10, 7)
EDGE_GRID = (10, 12)

UNIT_TOL = 1e-6


class SolidFormatError(ValueError):
    """Raised when a solid document cannot be turned into a SolidGraph."""


@dataclass(eq=False)
class FaceRecord:
    surface_type: str
    area: float
    centroid: np.ndarray
    is_rational: bool
    uv_grid: np.ndarray
    label: int | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FaceRecord):
            return NotImplemented
        return (
            self.surface_type == other.surface_type
            and _same_float(self.area, other.area)
            and np.array_equal(self.centroid, other.centroid)
            and self.is_rational == other.is_rational
            and self.uv_grid.shape == other.uv_grid.shape
            and np.array_equal(self.uv_grid, other.uv_grid)
            and self.label == other.label
        )


@dataclass(eq=False)
class EdgeRecord:
    curve_type: str
    length: float
    convexity: str
    face_a: int
    face_b: int
    uv_grid: np.ndarray

    @property
    def faces(self) -> tuple[int, int]:
        return (self.face_a, self.face_b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeRecord):
            return NotImplemented
        return (
            self.curve_type == other.curve_type
            and _same_float(self.length, other.length)
            and self.convexity == other.convexity
            and self.faces == other.faces
            and self.uv_grid.shape == other.uv_grid.shape
            and np.array_equal(self.uv_grid, other.uv_grid)
        )


@dataclass(eq=False)
class SolidGraph:
    faces: list[FaceRecord]
    edges: list[EdgeRecord]
    bbox_min: np.ndarray
    bbox_max: np.ndarray

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def labels(self) -> list[int | None]:
        return [f.label for f in self.faces]

    def bbox_diagonal(self) -> float:
        return float(np.linalg.norm(np.asarray(self.bbox_max) - np.asarray(self.bbox_min)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SolidGraph):
            return NotImplemented
        return (
            np.array_equal(self.bbox_min, other.bbox_min)
            and np.array_equal(self.bbox_max, other.bbox_max)
            and self.faces == other.faces
            and self.edges == other.edges
        )


def _same_float(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    path: str
    code: str
    message: str = ""


@dataclass
class ValidationReport:
    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list[str]:
        return [e.code for e in self.errors]


def validate(solid: SolidGraph, n_classes: int | None = None) -> ValidationReport:
    """Check every SolidGraph invariant; violations become report entries.

    Entries are ordered: solid-level first, then faces by index, then edges
    by index. ``n_classes`` bounds label ids when given.
    """
    report = ValidationReport()
    err = report.errors.append
    warn = report.warnings.append

    n = len(solid.faces)
    if n < 1:
        err(Issue("faces", "no_faces", "a solid needs at least one face"))

    lo = np.asarray(solid.bbox_min, dtype=np.float64)
    hi = np.asarray(solid.bbox_max, dtype=np.float64)
    if lo.shape != (3,) or hi.shape != (3,):
        err(Issue("bbox", "bbox_shape"))
    elif not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        err(Issue("bbox", "non_finite"))
    elif not np.all(lo < hi):
        err(Issue("bbox", "bbox_order", "bbox_min must be < bbox_max componentwise"))

    for i, face in enumerate(solid.faces):
        p = f"faces[{i}]"
        if face.surface_type not in SURFACE_TYPES:
            warn(Issue(f"{p}.surface_type", "unknown_surface_type", face.surface_type))
        if not math.isfinite(face.area):
            err(Issue(f"{p}.area", "non_finite"))
        elif face.area < 0:
            err(Issue(f"{p}.area", "negative_area"))
        c = np.asarray(face.centroid)
        if c.shape != (3,):
            err(Issue(f"{p}.centroid", "centroid_shape"))
        elif not np.all(np.isfinite(c)):
            err(Issue(f"{p}.centroid", "non_finite"))
        if face.label is not None and (
            face.label < 0 or (n_classes is not None and face.label >= n_classes)
        ):
            err(Issue(f"{p}.label", "invalid_label", str(face.label)))
        g = np.asarray(face.uv_grid)
        if g.shape != FACE_GRID:
            err(Issue(f"{p}.uv_grid", "grid_shape", str(g.shape)))
            continue
        if not np.all(np.isfinite(g)):
            err(Issue(f"{p}.uv_grid", "non_finite"))
            continue
        vis = g[..., 6]
        if not np.all((vis == 0.0) | (vis == 1.0)):
            err(Issue(f"{p}.uv_grid", "visibility_not_binary"))
        norms = np.linalg.norm(g[..., 3:6], axis=-1)
        if np.any(np.abs(norms[vis == 1.0] - 1.0) > UNIT_TOL):
            err(Issue(f"{p}.uv_grid", "normal_not_unit"))

    for k, edge in enumerate(solid.edges):
        p = f"edges[{k}]"
        if edge.curve_type not in CURVE_TYPES:
            warn(Issue(f"{p}.curve_type", "unknown_curve_type", edge.curve_type))
        if edge.convexity not in CONVEXITY:
            err(Issue(f"{p}.convexity", "invalid_convexity", edge.convexity))
        if not math.isfinite(edge.length):
            err(Issue(f"{p}.length", "non_finite"))
        elif edge.length < 0:
            err(Issue(f"{p}.length", "negative_length"))
        a, b = edge.face_a, edge.face_b
        if not (0 <= a < n and 0 <= b < n):
            err(Issue(f"{p}.faces", "dangling_face", f"{a},{b}"))
        elif a == b:
            err(Issue(f"{p}.faces", "non_manifold", "edge joins a face to itself"))
        g = np.asarray(edge.uv_grid)
        if g.shape != EDGE_GRID:
            err(Issue(f"{p}.uv_grid", "grid_shape", str(g.shape)))
            continue
        if not np.all(np.isfinite(g)):
            err(Issue(f"{p}.uv_grid", "non_finite"))
            continue
        tang = np.linalg.norm(g[:, 3:6], axis=-1)
        if np.any(np.abs(tang - 1.0) > UNIT_TOL):
            err(Issue(f"{p}.uv_grid", "tangent_not_unit"))

    if n > 1 and not report.errors and _component_count(solid) > 1:
        warn(Issue("edges", "multiple_shells", "face graph is disconnected"))
    return report


def _component_count(solid: SolidGraph) -> int:
    parent = list(range(len(solid.faces)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in solid.edges:
        ra, rb = find(e.face_a), find(e.face_b)
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(len(parent))})


# --------------------------------------------------------------------------
# serialization


def canonical_float(x: float) -> float:
    """Round a float to the value it will have after a serialize/parse cycle."""
    return float(_fmt(float(x)))


def canonicalize_array(a: np.ndarray) -> np.ndarray:
    flat = [canonical_float(v) for v in np.asarray(a, dtype=np.float64).ravel()]
    return np.array(flat, dtype=np.float64).reshape(np.shape(a))


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise SolidFormatError(f"non-finite float {x!r} cannot be serialized")
    s = format(x, ".9g")
    return "0" if s == "-0" else s


def _dump(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for n, key in enumerate(sorted(obj)):
            if n:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _dump(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for n, item in enumerate(obj):
            if n:
                out.append(",")
            _dump(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj: Any) -> bytes:
    out: list[str] = []
    _dump(obj, out)
    out.append("\n")
    return "".join(out).encode("utf-8")


def _floats(a: Iterable[float]) -> list[float]:
    return [float(v) for v in np.asarray(a, dtype=np.float64).ravel()]


def solid_to_dict(solid: SolidGraph) -> dict[str, Any]:
    return {
        "version": FORMAT_VERSION,
        "bbox": {"min": _floats(solid.bbox_min), "max": _floats(solid.bbox_max)},
        "faces": [
            {
                "surface_type": f.surface_type,
                "area": float(f.area),
                "centroid": _floats(f.centroid),
                "is_rational": bool(f.is_rational),
                "uv_grid": _floats(f.uv_grid),
                "label": None if f.label is None else int(f.label),
            }
            for f in solid.faces
        ],
        "edges": [
            {
                "curve_type": e.curve_type,
                "length": float(e.length),
                "convexity": e.convexity,
                "faces": [int(e.face_a), int(e.face_b)],
                "uv_grid": _floats(e.uv_grid),
            }
            for e in solid.edges
        ],
    }


def serialize_solid(solid: SolidGraph) -> bytes:
    report = validate(solid)
    if not report.ok:
        first = report.errors[0]
        raise SolidFormatError(f"invalid solid: {first.path}: {first.code}")
    return dumps_canonical(solid_to_dict(solid))


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise SolidFormatError(f"{where}: expected an object")
    if key not in obj:
        raise SolidFormatError(f"{where}: missing required field {key!r}")
    return obj[key]


def _vec3(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        raise SolidFormatError(f"{where}: expected a list of 3 numbers")
    return np.array([_num(v, where) for v in value], dtype=np.float64)


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SolidFormatError(f"{where}: expected a number, got {type(value).__name__}")
    return float(value)


def _grid(value: Any, shape: tuple[int, ...], where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise SolidFormatError(f"{where}: expected a flat list of numbers")
    expected = int(np.prod(shape))
    if len(value) != expected:
        raise SolidFormatError(
            f"{where}: grid payload has {len(value)} values, declared shape {shape} needs {expected}"
        )
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SolidFormatError(f"{where}: non-numeric grid entry") from exc
    if arr.ndim != 1:
        raise SolidFormatError(f"{where}: grid must be flat")
    return arr.reshape(shape)


def solid_from_dict(doc: dict[str, Any]) -> SolidGraph:
    if not isinstance(doc, dict):
        raise SolidFormatError("document root must be an object")
    version = _require(doc, "version", "root")
    if version != FORMAT_VERSION:
        raise SolidFormatError(f"unsupported version {version!r}")
    bbox = _require(doc, "bbox", "root")
    bmin = _vec3(_require(bbox, "min", "bbox"), "bbox.min")
    bmax = _vec3(_require(bbox, "max", "bbox"), "bbox.max")

    raw_faces = _require(doc, "faces", "root")
    raw_edges = _require(doc, "edges", "root")
    if not isinstance(raw_faces, list) or not isinstance(raw_edges, list):
        raise SolidFormatError("faces and edges must be lists")

    faces = []
    for i, rf in enumerate(raw_faces):
        w = f"faces[{i}]"
        label = rf.get("label") if isinstance(rf, dict) else None
        if label is not None and (isinstance(label, bool) or not isinstance(label, int)):
            raise SolidFormatError(f"{w}.label: expected int or null")
        stype = _require(rf, "surface_type", w)
        if not isinstance(stype, str):
            raise SolidFormatError(f"{w}.surface_type: expected a string")
        rational = _require(rf, "is_rational", w)
        if not isinstance(rational, bool):
            raise SolidFormatError(f"{w}.is_rational: expected a boolean")
        faces.append(
            FaceRecord(
                surface_type=stype,
                area=_num(_require(rf, "area", w), f"{w}.area"),
                centroid=_vec3(_require(rf, "centroid", w), f"{w}.centroid"),
                is_rational=rational,
                uv_grid=_grid(_require(rf, "uv_grid", w), FACE_GRID, f"{w}.uv_grid"),
                label=label,
            )
        )

    edges = []
    for k, re in enumerate(raw_edges):
        w = f"edges[{k}]"
        pair = _require(re, "faces", w)
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)
        ):
            raise SolidFormatError(f"{w}.faces: expected two face ids")
        for fid in pair:
            if not 0 <= fid < len(faces):
                raise SolidFormatError(
                    f"{w}.faces: dangling reference to face {fid} in a {len(faces)}-face solid"
                )
        ctype = _require(re, "curve_type", w)
        conv = _require(re, "convexity", w)
        if not isinstance(ctype, str) or not isinstance(conv, str):
            raise SolidFormatError(f"{w}: curve_type and convexity must be strings")
        edges.append(
            EdgeRecord(
                curve_type=ctype,
                length=_num(_require(re, "length", w), f"{w}.length"),
                convexity=conv,
                face_a=pair[0],
                face_b=pair[1],
                uv_grid=_grid(_require(re, "uv_grid", w), EDGE_GRID, f"{w}.uv_grid"),
            )
        )
    return SolidGraph(faces=faces, edges=edges, bbox_min=bmin, bbox_max=bmax)


def parse_solid(data: bytes | str) -> SolidGraph:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SolidFormatError("document is not valid UTF-8") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SolidFormatError(f"malformed document: {exc}") from exc
    return solid_from_dict(doc)


def canonicalize_solid(solid: SolidGraph) -> SolidGraph:
    """Snap every float to its 9-significant-digit value."""
    return solid_from_dict(json.loads(dumps_canonical(solid_to_dict(solid))))


def load_solid(path) -> SolidGraph:
    with open(path, "rb") as fh:
        return parse_solid(fh.read())


def save_solid(solid: SolidGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_solid(solid))


# --------------------------------------------------------------------------
# label sidecar


def label_sidecar(labels: Iterable[int]) -> bytes:
    """Face-index -> label mapping, keys in face order."""
    body = ",".join(f'"{i}":{int(v)}' for i, v in enumerate(labels))
    return ("{" + body + "}\n").encode("utf-8")


def parse_label_sidecar(data: bytes | str) -> dict[int, int]:
    doc = json.loads(data)
    if not isinstance(doc, dict):
        raise SolidFormatError("label sidecar must be an object")
    return {int(k): int(v) for k, v in doc.items()}
