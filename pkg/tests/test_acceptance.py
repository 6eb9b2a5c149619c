"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion with the measured values.
"""

from __future__ import annotations

import math
import time
from dataclasses import replace
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from brepfr.brep_ir import parse_solid, serialize_solid
from brepfr.harness import TrainConfig, compute_metrics, evaluate, run_ablation, train
from brepfr.harness.train import ABLATION_VARIANTS, format_ablation_table
from brepfr.model import ABLATION_PREFIXES, BRepFormer, ModelConfig, disabled_parameters, prepare_solid
from brepfr.nn import functional as F
from brepfr.nn.optim import AdamW
from brepfr.nn.tensor import Tensor
from brepfr.synth import DatasetConfig, generate_dataset, random_solid, solid_rng
from brepfr.topology import compute_topology

from gradcases import model_gradcheck, run_op_cases
from test_nn import mha_oracle

DESK = ModelConfig(d_model=64, n_layers=2, heads=4, kv_groups=2, n_classes=6)
DATASET_SEED = 0
# achieved on the first green run: test accuracy 1.0, mIoU 1.0 (seed 0, 30 epochs)
PINNED_ACCURACY = 0.995
PINNED_MIOU = 0.995
ABLATION_EPOCHS = 6


@pytest.fixture(scope="module")
def desk_dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk800")
    start = time.perf_counter()
    generate_dataset(DatasetConfig(count=800, seed=DATASET_SEED), root)
    return root, time.perf_counter() - start


@pytest.mark.criterion(1, "topology oracle suite")
def test_topology_oracle(cube, report):
    start = time.perf_counter()
    t = compute_topology(cube)
    g = nx.Graph([e.faces for e in cube.edges])
    oracle = dict(nx.all_pairs_shortest_path_length(g))
    assert all(t.m_d[i, j] == oracle[i][j] for i in range(6) for j in range(6))
    opposite = {frozenset(p) for p in ((0, 1), (2, 3), (4, 5))}
    err_a = err_c = 0.0
    for i in range(6):
        for j in range(6):
            if i == j:
                continue
            if frozenset((i, j)) in opposite:
                assert t.m_d[i, j] == 2
                err_a = max(err_a, abs(t.m_a[i, j] - math.pi))
                err_c = max(err_c, abs(t.m_c[i, j] - 1 / math.sqrt(3)))
            else:
                assert t.m_d[i, j] == 1
                err_a = max(err_a, abs(t.m_a[i, j] - math.pi / 2))
                err_c = max(err_c, abs(t.m_c[i, j] - math.sqrt(0.5) / math.sqrt(3)))
    assert err_a < 1e-9 and err_c < 1e-9
    solids = [random_solid(solid_rng(11, i))[0] for i in range(200)]
    gen_time = time.perf_counter() - start
    pairs = 0
    for s in solids:
        topo = compute_topology(s)
        prefix = (topo.m_e >= 0).sum(-1)
        assert np.array_equal(prefix, np.minimum(topo.m_d, topo.max_distance))
        pairs += prefix.size
    elapsed = time.perf_counter() - start
    report(f"M_a err {err_a:.1e}, M_c err {err_c:.1e}, {pairs} pairs over 200 solids, {elapsed:.1f}s incl. {gen_time:.1f}s generation")
    assert elapsed < 10.0


@pytest.mark.criterion(2, "gradient suite, max relative error < 1e-4")
def test_gradient_suite(cube, report):
    start = time.perf_counter()
    ops = run_op_cases()
    worst_op = max(ops, key=ops.get)
    model_err = model_gradcheck(cube, ModelConfig(d_model=16, n_layers=1, heads=2, kv_groups=1), samples_per_input=6)
    elapsed = time.perf_counter() - start
    report(f"{len(ops)} ops, worst {worst_op} {ops[worst_op]:.1e}; end-to-end cube {model_err:.1e}; {elapsed:.0f}s")
    assert max(ops.values()) < 1e-4
    assert model_err < 1e-4
    assert elapsed < 120


@pytest.mark.criterion(3, "GQA equals multi-head attention when G = H")
def test_gqa_equivalence(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        heads = int(rng.choice([1, 2, 4, 8]))
        d = heads * int(rng.integers(1, 6))
        t = int(rng.integers(1, 12))
        x, bias = rng.normal(size=(t, d)), rng.normal(size=(heads, t, t))
        w = [rng.normal(size=(d, d)) / math.sqrt(d) for _ in range(4)]
        got = F.gqa_attention(Tensor(x), bias, *(Tensor(a) for a in w), heads=heads, kv_groups=heads)
        worst = max(worst, float(np.abs(got.data - mha_oracle(x, bias, *w, heads)).max()))
    report(f"max abs diff {worst:.1e} over 100 inputs")
    assert worst < 1e-6


@pytest.mark.criterion(4, "permutation equivariance of logits")
def test_permutation_equivariance(report):
    model = BRepFormer(DESK, seed=7)
    rng = np.random.default_rng(99)
    # non-zero path table so edge renumbering is exercised too
    model.params["topo.path"].data[:] = rng.normal(scale=0.05, size=model.params["topo.path"].shape)
    worst = 0.0
    for i in range(50):
        feat = prepare_solid(random_solid(solid_rng(21, i))[0])
        order = rng.permutation(feat.num_faces)
        edge_order = rng.permutation(len(feat.edges))
        a = model.predict_features([feat])[0][1]
        b = model.predict_features([feat.permuted(order, edge_order)])[0][1]
        worst = max(worst, float(np.abs(a[order] - b).max()))
    report(f"max abs logit diff {worst:.1e} over 50 solids")
    assert worst < 1e-5


@pytest.mark.criterion(5, "metrics identities")
def test_metrics_exact(report):
    m = compute_metrics([0, 0, 1, 1], [0, 1, 1, 1])
    assert (m.accuracy, m.class_accuracy, m.miou) == (Fraction(3, 4), Fraction(3, 4), Fraction(7, 12))
    y = [0, 1, 2, 3, 4, 5, 5, 2]
    p = compute_metrics(y, y, 6)
    assert p.accuracy == p.class_accuracy == p.miou == 1
    report(f"A={m.accuracy}, A_c={m.class_accuracy}, mIoU={m.miou}")


@pytest.mark.slow
@pytest.mark.criterion(6, "desk-scale end-to-end: accuracy >= 0.95, mIoU >= 0.85, < 30 min")
def test_desk_scale_training(desk_dataset, tmp_path, report):
    root, gen_time = desk_dataset
    start = time.perf_counter()
    cfg = TrainConfig(dataset=str(root), model=DESK, batch_size=16, max_epochs=30, warmup_steps=200, seed=0,
                      checkpoint_dir=str(tmp_path / "desk"))
    result = train(cfg)
    metrics = evaluate(result.checkpoint_dir, "test")
    total = gen_time + time.perf_counter() - start
    acc, miou = float(metrics.accuracy), float(metrics.miou)
    epochs = max(r["epoch"] for r in result.history)
    report(f"test A {acc:.4f}, mIoU {miou:.4f}, {epochs} epochs, {total / 60:.1f} min")
    assert acc >= 0.95 and miou >= 0.85
    assert total < 30 * 60
    # regression bounds pinned from the first green run
    assert acc >= PINNED_ACCURACY and miou >= PINNED_MIOU
    first_epoch_val = next(r["loss"] for r in result.history if r["epoch"] == 1 and r["split"] == "val")
    assert first_epoch_val < result.init_val_loss


@pytest.mark.slow
@pytest.mark.criterion(7, "ablation wiring and baseline >= ablated - 1 point")
def test_ablation(desk_dataset, tmp_path, report):
    root, _ = desk_dataset
    # every flag cuts its parameters off from the loss over a full training step
    from brepfr.harness import load_dataset_features

    _, feats = load_dataset_features(root, DESK.max_distance, root / "features", indices=range(16))
    for flag in ABLATION_PREFIXES:
        cfg = replace(DESK, **{flag: False})
        model = BRepFormer(cfg, seed=0)
        before = {n: p.data.copy() for n, p in model.params.items()}
        opt = AdamW(model.params, lr=1e-3, weight_decay=0.0)
        opt.zero_grad()
        model.loss(model.collate(list(feats.values()))).backward()
        dead = disabled_parameters(cfg)
        assert dead
        for name in dead:
            g = model.params[name].grad
            assert g is None or not np.any(g), f"{flag}: {name} received gradient"
        opt.step()
        assert all(np.array_equal(model.params[n].data, before[n]) for n in dead)

    cfg = TrainConfig(dataset=str(root), model=DESK, max_epochs=ABLATION_EPOCHS, checkpoint_dir=str(tmp_path / "abl"))
    rows = run_ablation(cfg)
    table = {r.name: r.accuracy[0] for r in rows}
    assert list(table) == list(ABLATION_VARIANTS)
    (tmp_path / "abl" / "ablation.md").write_text(format_ablation_table(rows))
    base = table["baseline"]
    report(", ".join(f"{k} {100 * v:.2f}" for k, v in table.items()))
    for name, acc in table.items():
        assert base >= acc - 0.01, f"{name} beats baseline by more than 1 point"


@pytest.mark.slow
@pytest.mark.criterion(8, "determinism and round trip")
def test_determinism_and_round_trip(desk_dataset, tmp_path, report):
    root, _ = desk_dataset
    again = tmp_path / "again"
    manifest = generate_dataset(DatasetConfig(count=800, seed=DATASET_SEED), again)
    names = manifest.files + ["manifest.json"]
    assert all((root / n).read_bytes() == (again / n).read_bytes() for n in names)
    for n in manifest.files:
        data = (again / n).read_bytes()
        assert serialize_solid(parse_solid(data)) == data

    small = replace(DESK, n_layers=1)
    runs = []
    for k in range(2):
        cfg = TrainConfig(dataset=str(root), model=small, max_epochs=1, checkpoint_dir=str(tmp_path / f"run{k}"))
        result = train(cfg)
        runs.append((result.history, (result.checkpoint_dir / "checkpoint.bin").read_bytes()))
    assert runs[0][0] == runs[1][0]
    assert runs[0][1] == runs[1][1]
    report(f"800 documents identical and round-trip; two training runs identical (final loss {runs[0][0][-1]['loss']:.6f})")
