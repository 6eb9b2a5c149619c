from __future__ import annotations

import os

# single-threaded BLAS keeps training runs bit-reproducible
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import numpy as np
import pytest

from brepfr.synth import FEATURE_KINDS, FeatureTemplate, SizeRanges, generate_solid, random_solid


@pytest.fixture(scope="session")
def cube():
    return generate_solid(1, [FeatureTemplate.stock(1.0, 1.0, 1.0)])


@pytest.fixture(scope="session")
def random_solids():
    rng = np.random.default_rng(1234)
    return [random_solid(rng, FEATURE_KINDS, (1, 4), SizeRanges())[0] for _ in range(40)]


def make_graph(n_faces: int, pairs, normals=None):
    """A synthetic solid with planar faces and straight edges joining ``pairs``."""
    from brepfr.brep_ir import EdgeRecord, FaceRecord, SolidGraph

    faces = []
    for i in range(n_faces):
        g = np.zeros((10, 10, 7))
        u, v = np.meshgrid(np.linspace(0, 1, 10), np.linspace(0, 1, 10), indexing="ij")
        g[..., 0], g[..., 1], g[..., 2] = u + i, v, 0.0
        g[..., 3:6] = (0.0, 0.0, 1.0) if normals is None else normals[i]
        g[..., 6] = 1.0
        faces.append(FaceRecord("plane", 1.0, np.array([i + 0.5, 0.5, 0.0]), False, g, 0))
    edges = []
    for a, b in pairs:
        eg = np.zeros((10, 12))
        eg[:, 0] = a + 1.0
        eg[:, 1] = np.linspace(0, 1, 10)
        eg[:, 4] = 1.0
        eg[:, 6:9] = faces[a].uv_grid[0, 0, 3:6]
        eg[:, 9:12] = faces[b].uv_grid[0, 0, 3:6]
        edges.append(EdgeRecord("line", 1.0, "smooth", a, b, eg))
    return SolidGraph(faces, edges, np.array([0.0, 0.0, -0.5]), np.array([float(n_faces), 1.0, 0.5]))


# acceptance reporting: one line per criterion at the end of the run

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.fixture
def report(request):
    """Attach measured values to the criterion line of the current test."""
    marker = request.node.get_closest_marker("criterion")
    entry = _CRITERIA.setdefault(marker.args[0], {"title": marker.args[1], "details": [], "outcome": "FAIL"})
    return entry["details"].append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    entry = _CRITERIA.setdefault(marker.args[0], {"title": marker.args[1], "details": [], "outcome": "FAIL"})
    if rep.when == "call":
        entry["outcome"] = "PASS" if rep.passed else "FAIL"
    elif rep.failed:
        entry["outcome"] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        detail = "; ".join(e["details"])
        terminalreporter.write_line(f"criterion {number} {e['outcome']}: {e['title']}" + (f" ({detail})" if detail else ""))
