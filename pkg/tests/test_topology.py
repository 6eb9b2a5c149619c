from __future__ import annotations

import io
import math
import time

import networkx as nx
import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from brepfr.geometry import normalize_solid, transform_solid
from brepfr.topology import (
    compute_topology,
    face_angular_matrix,
    face_centroid_matrix,
    face_shortest_distances,
    hop_distances,
    read_arrays,
    shortest_edge_paths,
    topology_from_bytes,
    topology_to_bytes,
    write_arrays,
)

from conftest import make_graph


def nx_graph(solid) -> nx.MultiGraph:
    g = nx.MultiGraph()
    g.add_nodes_from(range(solid.num_faces))
    for k, e in enumerate(solid.edges):
        g.add_edge(e.face_a, e.face_b, key=k)
    return g


def oracle_distances(solid, max_distance=16) -> np.ndarray:
    n = solid.num_faces
    out = np.full((n, n), max_distance + 1, dtype=np.int64)
    for src, lengths in nx.all_pairs_shortest_path_length(nx_graph(solid)):
        for dst, d in lengths.items():
            out[src, dst] = d
    return out


def check_chain(solid, m_e, max_distance):
    """Every stored path is a walk of shared edges starting at i, ending at j when untruncated."""
    n = solid.num_faces
    hops = hop_distances(solid)
    for i in range(n):
        for j in range(n):
            path = m_e[i, j]
            length = int((path >= 0).sum())
            assert length == (min(hops[i, j], max_distance) if hops[i, j] >= 0 else 0)
            assert np.all(path[length:] == -1) and np.all(path[:length] >= 0)
            cur = i
            for k in path[:length]:
                e = solid.edges[k]
                assert cur in e.faces
                cur = e.face_b if e.face_a == cur else e.face_a
            if length == hops[i, j]:
                assert cur == j


def test_cube_matrices(cube):
    t = compute_topology(cube)
    assert np.array_equal(t.m_d, oracle_distances(cube))
    opposite = {(0, 1), (1, 0), (2, 3), (3, 2), (4, 5), (5, 4)}
    for i in range(6):
        for j in range(6):
            if i == j:
                assert t.m_a[i, j] == 0 and t.m_c[i, j] == 0 and t.m_d[i, j] == 0
            elif (i, j) in opposite:
                assert t.m_d[i, j] == 2
                assert abs(t.m_a[i, j] - math.pi) < 1e-9
                assert abs(t.m_c[i, j] - 1 / math.sqrt(3)) < 1e-9
            else:
                assert t.m_d[i, j] == 1
                assert abs(t.m_a[i, j] - math.pi / 2) < 1e-9
                assert abs(t.m_c[i, j] - math.sqrt(0.5) / math.sqrt(3)) < 1e-9
    check_chain(cube, t.m_e, 16)
    # opposite pair goes through a wall face
    e1, e2 = t.m_e[0, 1, :2]
    walls = (set(cube.edges[e1].faces) & set(cube.edges[e2].faces)) - {0, 1}
    assert len(walls) == 1


def test_two_face_solid():
    s = make_graph(2, [(0, 1)])
    t = compute_topology(s)
    assert t.m_d.tolist() == [[0, 1], [1, 0]]
    assert t.m_e[0, 1].tolist() == [0] + [-1] * 15
    assert np.all(t.m_e[0, 0] == -1)


def test_disconnected_shells_use_sentinel():
    s = make_graph(4, [(0, 1), (2, 3)])
    md = face_shortest_distances(s, max_distance=5)
    assert md[0, 2] == md[3, 1] == 6
    assert md[0, 1] == 1
    assert np.all(shortest_edge_paths(s, 5)[0, 2] == -1)


def test_long_path_is_truncated():
    n = 12
    s = make_graph(n, [(i, i + 1) for i in range(n - 1)])
    t = compute_topology(s, max_distance=4)
    assert t.m_d[0, n - 1] == n - 1
    assert t.m_e[0, n - 1].tolist() == [0, 1, 2, 3]
    assert t.m_e[n - 1, 0].tolist() == [10, 9, 8, 7]
    check_chain(s, t.m_e, 4)


def test_tie_break_takes_lowest_face_then_lowest_edge():
    # square 0-1-3, 0-2-3 with a doubled edge between 0 and 1
    s = make_graph(4, [(0, 2), (2, 3), (0, 1), (1, 3), (0, 1)])
    m_e = shortest_edge_paths(s, 4)
    assert m_e[0, 3, :2].tolist() == [2, 3]
    assert m_e[3, 0, :2].tolist() == [3, 2]


def test_random_solids_against_oracle(random_solids):
    for s in random_solids:
        t = compute_topology(s)
        assert np.array_equal(t.m_d, oracle_distances(s))
        check_chain(s, t.m_e, 16)
        for m in (t.m_d, t.m_a, t.m_c):
            assert np.array_equal(m, m.T)
            assert np.all(np.diag(m) == 0)
        assert t.m_a.min() >= 0 and t.m_a.max() <= math.pi
        assert t.m_c.min() >= 0 and t.m_c.max() <= 1
        d = t.m_d
        assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :])


def test_scale_and_normalization_invariance(random_solids):
    for s in random_solids[:8]:
        a = compute_topology(s)
        for other in (transform_solid(s, 5.0 * np.eye(3), np.zeros(3)), normalize_solid(s)):
            b = compute_topology(other)
            assert np.array_equal(a.m_d, b.m_d) and np.array_equal(a.m_e, b.m_e)
            assert np.allclose(a.m_c, b.m_c, atol=1e-12)
            assert np.allclose(a.m_a, b.m_a, atol=1e-9)


def test_rigid_motion_invariance(random_solids):
    rng = np.random.default_rng(3)
    for s in random_solids[:8]:
        R = Rotation.random(random_state=rng).as_matrix()
        moved = transform_solid(s, R, rng.normal(size=3) * 10)
        a, b = compute_topology(s), compute_topology(moved)
        assert np.array_equal(a.m_d, b.m_d) and np.array_equal(a.m_e, b.m_e)
        assert np.allclose(a.m_a, b.m_a, atol=1e-9)
        assert a.degenerate_normals == b.degenerate_normals


def test_full_cylinder_mean_normal_is_degenerate():
    from brepfr.synth import FeatureTemplate, generate_solid

    s = generate_solid(0, [FeatureTemplate.stock(80, 60, 30), FeatureTemplate("through_hole", radius=8, position=(40, 30))])
    m_a, degenerate = face_angular_matrix(s)
    # the hole wall touches faces 0 and 1 directly, the four side faces only through them
    assert degenerate == 4
    assert np.all(m_a[6, 2:6] == 0)
    assert abs(m_a[6, 0] - math.pi / 2) < 1e-9


def test_centroid_matrix_needs_positive_diagonal():
    s = make_graph(2, [(0, 1)])
    s.bbox_max = s.bbox_min.copy()
    with pytest.raises(ValueError):
        face_centroid_matrix(s)


def test_binary_container_round_trip(random_solids):
    t = compute_topology(random_solids[0])
    back = topology_from_bytes(topology_to_bytes(t))
    for key in ("m_d", "m_a", "m_c", "m_e"):
        assert np.array_equal(getattr(t, key), getattr(back, key))
        assert getattr(t, key).dtype == getattr(back, key).dtype
    buf = io.BytesIO()
    write_arrays(buf, {"x": np.arange(6, dtype=np.float32).reshape(2, 3)})
    raw = buf.getvalue()
    assert raw[:4] == b"BRFA"
    assert read_arrays(io.BytesIO(raw))["x"].tolist() == [[0, 1, 2], [3, 4, 5]]
    with pytest.raises(ValueError):
        read_arrays(io.BytesIO(raw[:-2]))
    with pytest.raises(ValueError):
        write_arrays(io.BytesIO(), {"c": np.zeros(2, dtype=np.complex128)})


def test_permuted_matrices_match_recomputation(random_solids):
    from brepfr.geometry import permute_solid

    rng = np.random.default_rng(0)
    for s in random_solids[:5]:
        order = rng.permutation(s.num_faces)
        a = compute_topology(s).permuted(order)
        b = compute_topology(permute_solid(s, order))
        assert np.array_equal(a.m_d, b.m_d)
        assert np.allclose(a.m_a, b.m_a) and np.allclose(a.m_c, b.m_c)
        # paths may break ties differently but keep their lengths
        assert np.array_equal((a.m_e >= 0).sum(-1), (b.m_e >= 0).sum(-1))


def test_oracle_suite_runtime(random_solids):
    start = time.perf_counter()
    for s in random_solids:
        compute_topology(s)
    assert time.perf_counter() - start < 5.0
