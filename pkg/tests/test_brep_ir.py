from __future__ import annotations

import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brepfr.brep_ir import (
    EdgeRecord,
    FaceRecord,
    SolidFormatError,
    SolidGraph,
    canonical_float,
    dumps_canonical,
    label_sidecar,
    parse_label_sidecar,
    parse_solid,
    serialize_solid,
    solid_to_dict,
    validate,
)


def _plane_grid(z: float, nz: float) -> np.ndarray:
    g = np.zeros((10, 10, 7))
    u, v = np.meshgrid(np.linspace(0, 1, 10), np.linspace(0, 1, 10), indexing="ij")
    g[..., 0], g[..., 1], g[..., 2] = u, v, z
    g[..., 5] = nz
    g[..., 6] = 1.0
    return g


def two_face_solid() -> SolidGraph:
    eg = np.zeros((10, 12))
    eg[:, 0] = np.linspace(0, 1, 10)
    eg[:, 3] = 1.0
    eg[:, 8] = 1.0
    eg[:, 11] = -1.0
    faces = [
        FaceRecord("plane", 1.0, np.array([0.5, 0.5, 0.0]), False, _plane_grid(0.0, -1.0), 0),
        FaceRecord("plane", 1.0, np.array([0.5, 0.5, 1.0]), False, _plane_grid(1.0, 1.0), 0),
    ]
    edges = [EdgeRecord("line", 1.0, "convex", 0, 1, eg)]
    return SolidGraph(faces, edges, np.zeros(3), np.ones(3))


def test_minimal_two_face_document_parses():
    solid = parse_solid(serialize_solid(two_face_solid()))
    assert solid.num_faces == 2 and solid.num_edges == 1
    assert solid.faces[0].uv_grid.shape == (10, 10, 7)
    assert solid.edges[0].uv_grid.shape == (10, 12)


def test_dangling_face_reference_rejected(cube):
    doc = json.loads(serialize_solid(cube))
    doc["edges"][0]["faces"] = [0, 7]
    with pytest.raises(SolidFormatError, match="dangling"):
        parse_solid(json.dumps(doc))


def test_missing_field_and_grid_size_errors(cube):
    doc = json.loads(serialize_solid(cube))
    broken = json.loads(json.dumps(doc))
    del broken["faces"][0]["area"]
    with pytest.raises(SolidFormatError):
        parse_solid(json.dumps(broken))
    broken = json.loads(json.dumps(doc))
    broken["faces"][1]["uv_grid"] = broken["faces"][1]["uv_grid"][:-1]
    with pytest.raises(SolidFormatError):
        parse_solid(json.dumps(broken))
    with pytest.raises(SolidFormatError):
        parse_solid(b"{not json")


def test_round_trip_is_byte_identical(cube, random_solids):
    for s in [cube] + random_solids:
        data = serialize_solid(s)
        back = parse_solid(data)
        assert back == s
        assert serialize_solid(back) == data


def test_identical_values_serialize_identically(cube):
    copy = parse_solid(serialize_solid(cube))
    assert serialize_solid(copy) == serialize_solid(cube)


def test_float_formatting_is_stable():
    assert dumps_canonical({"b": 0.1, "a": [1.0, -0.0, 1e-12]}) == b'{"a":[1,0,1e-12],"b":0.1}\n'
    assert canonical_float(0.1) == 0.1
    assert canonical_float(1 / 3) == 0.333333333


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_canonical_float_is_idempotent(x):
    c = canonical_float(x)
    assert canonical_float(c) == c


def test_serialize_refuses_invalid_solid(cube):
    bad = replace(cube, bbox_min=np.array([2.0, 0.0, 0.0]))
    with pytest.raises(SolidFormatError):
        serialize_solid(bad)


def test_generator_cube_is_valid(cube):
    report = validate(cube)
    assert report.ok and not report.warnings


def test_ids_are_dense_after_parse(random_solids):
    for s in random_solids[:5]:
        back = parse_solid(serialize_solid(s))
        used = {f for e in back.edges for f in e.faces}
        assert used <= set(range(back.num_faces))


# one mutation per invariant -> exactly that error code


def _mut_face(solid, i, **kw):
    faces = list(solid.faces)
    faces[i] = replace(faces[i], **kw)
    return replace(solid, faces=faces)


def _mut_edge(solid, k, **kw):
    edges = list(solid.edges)
    edges[k] = replace(edges[k], **kw)
    return replace(solid, edges=edges)


def _face_grid(solid, i, fn):
    g = solid.faces[i].uv_grid.copy()
    fn(g)
    return _mut_face(solid, i, uv_grid=g)


def _edge_grid(solid, k, fn):
    g = solid.edges[k].uv_grid.copy()
    fn(g)
    return _mut_edge(solid, k, uv_grid=g)


def _set(idx, value):
    def fn(g):
        g[idx] = value

    return fn


MUTATIONS = {
    "no_faces": lambda s: replace(s, faces=[], edges=[]),
    "bbox_order": lambda s: replace(s, bbox_min=s.bbox_max + np.array([0.0, 1.0, 0.0])),
    "bbox_shape": lambda s: replace(s, bbox_min=np.zeros(2)),
    "negative_area": lambda s: _mut_face(s, 2, area=-1.0),
    "centroid_shape": lambda s: _mut_face(s, 1, centroid=np.zeros(4)),
    "invalid_label": lambda s: _mut_face(s, 3, label=-2),
    "grid_shape": lambda s: _mut_face(s, 0, uv_grid=np.zeros((9, 10, 7))),
    "visibility_not_binary": lambda s: _face_grid(s, 0, _set((2, 2, 6), 0.5)),
    "normal_not_unit": lambda s: _face_grid(s, 0, _set((4, 4, slice(3, 6)), [0.0, 0.0, 2.0])),
    "non_finite": lambda s: _mut_face(s, 4, area=float("nan")),
    "invalid_convexity": lambda s: _mut_edge(s, 0, convexity="sharp"),
    "negative_length": lambda s: _mut_edge(s, 5, length=-0.5),
    "dangling_face": lambda s: _mut_edge(s, 3, face_b=s.num_faces + 1),
    "non_manifold": lambda s: _mut_edge(s, 2, face_b=s.edges[2].face_a),
    "tangent_not_unit": lambda s: _edge_grid(s, 1, _set((0, slice(3, 6)), [0.0, 0.0, 0.0])),
}


@pytest.mark.parametrize("code", sorted(MUTATIONS))
def test_single_violation_gives_single_error(cube, code):
    report = validate(MUTATIONS[code](cube))
    assert report.codes() == [code]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(MUTATIONS)), st.integers(0, 39))
def test_fuzzer_one_error_per_invariant(random_solids, code, which):
    solid = random_solids[which]
    if code == "non_manifold" and solid.edges[2].face_a == solid.edges[2].face_b:
        return
    assert validate(MUTATIONS[code](solid)).codes() == [code]


def test_unknown_types_are_warnings(cube):
    s = _mut_face(cube, 0, surface_type="nurbs_patch")
    s = _mut_edge(s, 0, curve_type="spiral")
    report = validate(s)
    assert report.ok
    assert [w.code for w in report.warnings] == ["unknown_surface_type", "unknown_curve_type"]


def test_label_bound_with_class_count(cube):
    assert validate(_mut_face(cube, 0, label=6), n_classes=6).codes() == ["invalid_label"]
    assert validate(_mut_face(cube, 0, label=5), n_classes=6).ok


def test_errors_ordered_by_record_index(cube):
    s = _mut_edge(_mut_face(_mut_face(cube, 4, area=-1.0), 1, area=-1.0), 0, length=-1.0)
    paths = [e.path for e in validate(s).errors]
    assert paths == ["faces[1].area", "faces[4].area", "edges[0].length"]


def test_label_sidecar_round_trip():
    doc = label_sidecar([0, 3, 3, 1])
    assert doc == b'{"0":0,"1":3,"2":3,"3":1}\n'
    assert parse_label_sidecar(doc) == {0: 0, 1: 3, 2: 3, 3: 1}


def test_document_schema(cube):
    doc = solid_to_dict(cube)
    assert doc["version"] == 1
    assert set(doc) == {"version", "bbox", "faces", "edges"}
    assert len(doc["faces"][0]["uv_grid"]) == 700
    assert len(doc["edges"][0]["uv_grid"]) == 120
    assert doc["edges"][0]["faces"] == list(cube.edges[0].faces)
