"""Training loop, evaluation, prediction and ablation runs."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..brep_ir import label_sidecar, load_solid
from ..model import BRepFormer, ModelConfig, SolidFeatures
from ..nn.checkpoint import load_checkpoint
from ..nn.functional import cross_entropy
from ..nn.optim import AdamW, PlateauState, lr_schedule
from ..nn.tensor import no_grad
from .data import batch_order, load_dataset_features, split_dataset
from .metrics import Metrics, compute_metrics

LOG_FIELDS = ("epoch", "split", "loss", "A", "A_c", "mIoU", "lr")
LOG_NAME = "train_log.csv"


class NonFiniteLossError(RuntimeError):
    pass


@dataclass
class TrainConfig:
    dataset: str = "data"
    model: ModelConfig = field(default_factory=ModelConfig)
    base_lr: float = 1e-3
    batch_size: int = 16
    max_epochs: int = 30
    warmup_steps: int = 200
    seed: int = 0
    split: tuple[float, float, float] = (0.7, 0.15, 0.15)
    split_seed: int | None = None  # None: the dataset's own seed, which reproduces its manifest split
    checkpoint_dir: str = "runs/train"
    cache_dir: str | None = None  # None: <dataset>/features
    weight_decay: float = 0.01
    early_stop_epochs: int = 10

    def __post_init__(self) -> None:
        if isinstance(self.model, dict):
            self.model = ModelConfig.from_dict(self.model)
        self.split = tuple(float(f) for f in self.split)
        if len(self.split) != 3 or min(self.split) < 0 or abs(sum(self.split) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {self.split}")
        if self.batch_size < 1 or self.max_epochs < 1 or self.warmup_steps < 0 or not self.base_lr > 0:
            raise ValueError("batch_size, max_epochs and base_lr must be positive, warmup_steps non-negative")

    @classmethod
    def full(cls, **overrides) -> "TrainConfig":
        """Large-batch, long-schedule preset with the 8-layer model."""
        base = {"model": ModelConfig.full(), "batch_size": 64, "max_epochs": 200, "warmup_steps": 5000}
        return cls(**{**base, **overrides})

    def to_dict(self) -> dict:
        out = asdict(self)
        out["model"] = self.model.to_dict()
        out["split"] = list(self.split)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown train config fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "TrainConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def resolved_cache_dir(self) -> Path:
        return Path(self.cache_dir) if self.cache_dir else Path(self.dataset) / "features"


@dataclass
class TrainResult:
    checkpoint_dir: Path
    log_path: Path
    history: list[dict]
    best_epoch: int
    best_val_loss: float
    init_val_loss: float
    elapsed: float


def evaluate_model(
    model: BRepFormer, samples: Sequence[SolidFeatures], batch_size: int = 32
) -> tuple[float, Metrics, list[np.ndarray]]:
    """Mean face cross-entropy, metrics and per-solid predictions over ``samples`` (in order)."""
    preds: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    loss_sum, faces = 0.0, 0
    with no_grad():
        for start in range(0, len(samples), batch_size):
            chunk = list(samples[start : start + batch_size])
            batch = model.collate(chunk)
            logits = model.forward_batch(batch).logits
            if batch.labels is not None:
                loss_sum += float(cross_entropy(logits, batch.labels).data) * len(batch.labels)
                faces += len(batch.labels)
                labels.append(batch.labels)
            pos = 0
            for n in batch.counts:
                preds.append(logits.data[pos : pos + n].argmax(axis=1))
                pos += n
    if not labels:
        raise ValueError("evaluation needs labelled solids")
    y = np.concatenate(labels)
    metrics = compute_metrics(y, np.concatenate(preds), model.config.n_classes)
    return loss_sum / faces, metrics, preds


def _row(epoch: int, split: str, loss: float, m: Metrics | None, lr: float) -> dict:
    nan = float("nan")
    return {
        "epoch": epoch,
        "split": split,
        "loss": loss,
        "A": float(m.accuracy) if m else nan,
        "A_c": float(m.class_accuracy) if m else nan,
        "mIoU": float(m.miou) if m else nan,
        "lr": lr,
    }


def _resolve_split(config: TrainConfig, manifest) -> tuple[list[int], list[int], list[int]]:
    seed = manifest.seed if config.split_seed is None else config.split_seed
    return split_dataset(manifest.count, config.split, seed)


def train(
    config: TrainConfig,
    features: dict[int, SolidFeatures] | None = None,
    log: Callable[[str], None] | None = None,
) -> TrainResult:
    """Fit a model on the train split, keep the checkpoint with the lowest validation loss."""
    started = time.perf_counter()
    say = log or (lambda _msg: None)
    mcfg = config.model
    manifest, loaded = load_dataset_features(
        config.dataset, mcfg.max_distance, config.resolved_cache_dir(), indices=[] if features is not None else None
    )
    feats = features if features is not None else loaded
    train_idx, val_idx, _ = _resolve_split(config, manifest)
    if not train_idx or not val_idx:
        raise ValueError("train and validation splits must both be non-empty")
    val_samples = [feats[i] for i in val_idx]

    out = Path(config.checkpoint_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train_config.json").write_text(json.dumps(config.to_dict(), indent=1, sort_keys=True) + "\n")
    log_path = out / LOG_NAME

    model = BRepFormer(mcfg, seed=config.seed)
    opt = AdamW(model.params, lr=config.base_lr, weight_decay=config.weight_decay)
    plateau = PlateauState()
    shuffle_rng = np.random.default_rng([config.seed, 1])

    history: list[dict] = []
    init_loss, init_metrics, _ = evaluate_model(model, val_samples, config.batch_size)
    history.append(_row(0, "val", init_loss, init_metrics, 0.0))
    say(f"epoch 0 val loss {init_loss:.4f}")

    best_loss, best_epoch, since_best = math.inf, 0, 0
    step = 0
    lr = 0.0
    extra = {"train_config": config.to_dict()}
    with open(log_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LOG_FIELDS)
        writer.writeheader()
        writer.writerow(history[0])
        for epoch in range(1, config.max_epochs + 1):
            loss_sum, faces = 0.0, 0
            ys, ps = [], []
            for chunk in batch_order(train_idx, config.batch_size, shuffle_rng):
                step += 1
                lr = lr_schedule(step, config.base_lr, config.warmup_steps, plateau)
                batch = model.collate([feats[i] for i in chunk])
                opt.zero_grad()
                out_fw = model.forward_batch(batch)
                loss = cross_entropy(out_fw.logits, batch.labels)
                value = float(loss.data)
                if not math.isfinite(value):
                    worst = max(float(np.abs(p.data).max()) for p in model.params.values())
                    raise NonFiniteLossError(
                        f"non-finite loss {value} at epoch {epoch}, step {step}, lr {lr:.3g}; "
                        f"batch solids {chunk}; largest |parameter| {worst:.3g}"
                    )
                loss.backward()
                opt.step(lr)
                loss_sum += value * len(batch.labels)
                faces += len(batch.labels)
                ys.append(batch.labels)
                ps.append(out_fw.logits.data.argmax(axis=1))
            train_loss = loss_sum / faces
            train_metrics = compute_metrics(np.concatenate(ys), np.concatenate(ps), mcfg.n_classes)
            val_loss, val_metrics, _ = evaluate_model(model, val_samples, config.batch_size)
            rows = [_row(epoch, "train", train_loss, train_metrics, lr), _row(epoch, "val", val_loss, val_metrics, lr)]
            for r in rows:
                writer.writerow(r)
            fh.flush()
            history.extend(rows)
            say(
                f"epoch {epoch} train {train_loss:.4f} val {val_loss:.4f} "
                f"A {float(val_metrics.accuracy):.4f} mIoU {float(val_metrics.miou):.4f} lr {lr:.3g}"
            )

            if val_loss < best_loss:
                best_loss, best_epoch, since_best = val_loss, epoch, 0
                model.save(out, {**extra, "epoch": epoch, "val_loss": val_loss})
            else:
                since_best += 1
            plateau.update(val_loss)
            at_floor = config.base_lr * plateau.scale <= plateau.min_lr
            if at_floor and since_best >= config.early_stop_epochs:
                say(f"early stop at epoch {epoch}")
                break

    return TrainResult(out, log_path, history, best_epoch, best_loss, init_loss, time.perf_counter() - started)


def load_trained(checkpoint_dir: str | os.PathLike, config: ModelConfig | None = None) -> tuple[BRepFormer, dict]:
    model = BRepFormer.load(checkpoint_dir, config)
    _, manifest = load_checkpoint(checkpoint_dir)
    return model, manifest


def evaluate(
    checkpoint_dir: str | os.PathLike,
    split: str = "test",
    dataset: str | os.PathLike | None = None,
    config: ModelConfig | None = None,
) -> Metrics:
    """Metrics of a saved model on one split of the dataset it was trained on (or ``dataset``)."""
    if split not in ("train", "val", "test"):
        raise ValueError(f"unknown split {split!r}")
    model, manifest = load_trained(checkpoint_dir, config)
    tcfg = TrainConfig.from_dict(manifest["train_config"])
    if dataset is not None:
        tcfg = replace(tcfg, dataset=str(dataset), cache_dir=None)
    ds_manifest, _ = load_dataset_features(tcfg.dataset, model.config.max_distance, indices=[])
    idx = dict(zip(("train", "val", "test"), _resolve_split(tcfg, ds_manifest)))[split]
    _, feats = load_dataset_features(tcfg.dataset, model.config.max_distance, tcfg.resolved_cache_dir(), idx)
    _, metrics, _ = evaluate_model(model, [feats[i] for i in idx], tcfg.batch_size)
    return metrics


def predict(
    checkpoint_dir: str | os.PathLike, solid_path: str | os.PathLike, out_path: str | os.PathLike | None = None
) -> bytes:
    """Face-index to predicted-label JSON for one solid document; written to ``out_path`` if given."""
    model, _ = load_trained(checkpoint_dir)
    pred, _ = model.predict(load_solid(solid_path))
    doc = label_sidecar([int(p) for p in pred])
    if out_path is not None:
        Path(out_path).write_bytes(doc)
    return doc


# --------------------------------------------------------------------------
# ablation

ABLATION_VARIANTS: dict[str, dict[str, bool]] = {
    "baseline": {},
    "w/o face attr": {"use_face_attr": False},
    "w/o edge attr": {"use_edge_attr": False},
    "w/o UV": {"use_uv": False},
    "w/o M_d": {"use_m_d": False},
    "w/o M_d,M_a,M_c": {"use_m_d": False, "use_m_a": False, "use_m_c": False},
    "w/o M_d,M_a,M_c,M_e": {"use_m_d": False, "use_m_a": False, "use_m_c": False, "use_m_e": False},
}


@dataclass
class AblationRow:
    name: str
    flags: dict[str, bool]
    accuracy: list[float]
    class_accuracy: list[float]
    miou: list[float]

    @staticmethod
    def _stat(values: list[float]) -> tuple[float, float]:
        return float(np.mean(values)), float(np.std(values))

    def to_dict(self) -> dict:
        out = {"name": self.name, "flags": self.flags, "runs": len(self.accuracy)}
        for key in ("accuracy", "class_accuracy", "miou"):
            mean, std = self._stat(getattr(self, key))
            out[key] = mean
            out[f"{key}_std"] = std
        return out


def run_ablation(
    config: TrainConfig,
    variants: Sequence[str] | None = None,
    repeats: int = 1,
    split: str = "test",
    log: Callable[[str], None] | None = None,
) -> list[AblationRow]:
    """Train and score one model per variant (and repeat); every run uses the same budget."""
    say = log or (lambda _msg: None)
    names = list(ABLATION_VARIANTS) if variants is None else list(variants)
    unknown = [n for n in names if n not in ABLATION_VARIANTS]
    if unknown:
        raise ValueError(f"unknown ablation variants: {unknown}")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    manifest, feats = load_dataset_features(
        config.dataset, config.model.max_distance, config.resolved_cache_dir()
    )
    idx = dict(zip(("train", "val", "test"), _resolve_split(config, manifest)))[split]
    rows = []
    root = Path(config.checkpoint_dir)
    for name in names:
        flags = ABLATION_VARIANTS[name]
        row = AblationRow(name, dict(flags), [], [], [])
        for r in range(repeats):
            slug = name.replace("/", "").replace(",", "_").replace(" ", "_")
            run_cfg = replace(
                config,
                model=replace(config.model, **flags),
                seed=config.seed + r,
                checkpoint_dir=str(root / f"{slug}_r{r}"),
            )
            result = train(run_cfg, features=feats, log=say)
            model, _ = load_trained(result.checkpoint_dir)
            _, m, _ = evaluate_model(model, [feats[i] for i in idx], config.batch_size)
            row.accuracy.append(float(m.accuracy))
            row.class_accuracy.append(float(m.class_accuracy))
            row.miou.append(float(m.miou))
            say(f"{name} run {r}: A {float(m.accuracy):.4f} mIoU {float(m.miou):.4f}")
        rows.append(row)
    return rows


def format_ablation_table(rows: Sequence[AblationRow]) -> str:
    lines = ["| variant | A (%) | A_c (%) | mIoU (%) |", "|---|---|---|---|"]
    for row in rows:
        cells = []
        for key in ("accuracy", "class_accuracy", "miou"):
            mean, std = row._stat(getattr(row, key))
            cells.append(f"{100 * mean:.2f} ± {100 * std:.2f}" if len(getattr(row, key)) > 1 else f"{100 * mean:.2f}")
        lines.append(f"| {row.name} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
