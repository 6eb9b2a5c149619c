"""Command line entry point: ``brepfr synth|features|train|eval|predict|ablate``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .brep_ir import SolidFormatError


def _read_json(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _train_config(args):
    from .harness import TrainConfig

    cfg = TrainConfig.from_dict(_read_json(args.config))
    overrides = {}
    if getattr(args, "dataset", None):
        overrides["dataset"] = args.dataset
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out:
        overrides["checkpoint_dir"] = args.out
    if getattr(args, "epochs", None):
        overrides["max_epochs"] = args.epochs
    return replace(cfg, **overrides)


def cmd_synth(args) -> int:
    from .synth import DatasetConfig, SizeRanges, generate_dataset

    doc = _read_json(args.config)
    if "sizes" in doc:
        doc["sizes"] = SizeRanges(**{k: tuple(v) for k, v in doc["sizes"].items()})
    for key in ("classes", "n_features", "split"):
        if key in doc:
            doc[key] = tuple(doc[key])
    if args.count is not None:
        doc["count"] = args.count
    if args.classes:
        doc["classes"] = tuple(args.classes)
    if args.seed is not None:
        doc["seed"] = args.seed
    manifest = generate_dataset(DatasetConfig(**doc), args.out)
    print(json.dumps({"count": manifest.count, "per_class_faces": manifest.per_class_faces}))
    return 0


def cmd_features(args) -> int:
    from .harness import load_dataset_features

    if args.input:
        from .brep_ir import load_solid
        from .geometry import normalize_solid
        from .topology import compute_topology, topology_to_bytes

        if not args.out:
            raise ValueError("--out is required with --in")
        topo = compute_topology(normalize_solid(load_solid(args.input)), args.max_distance)
        Path(args.out).write_bytes(topology_to_bytes(topo))
        print(f"wrote m_d, m_a, m_c, m_e for {topo.m_d.shape[0]} faces")
        return 0
    if not args.dataset:
        raise ValueError("give --dataset DIR or --in SOLID")
    _, feats = load_dataset_features(args.dataset, args.max_distance, args.out or Path(args.dataset) / "features")
    print(f"{len(feats)} solids featurized")
    return 0


def cmd_train(args) -> int:
    from .harness import train

    result = train(_train_config(args), log=print)
    print(json.dumps({"checkpoint": str(result.checkpoint_dir), "best_epoch": result.best_epoch,
                      "best_val_loss": result.best_val_loss, "log": str(result.log_path)}))
    return 0


def cmd_eval(args) -> int:
    from .harness import evaluate

    metrics = evaluate(args.checkpoint, args.split, args.dataset)
    text = json.dumps(metrics.to_dict(), indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def cmd_predict(args) -> int:
    from .harness import predict

    doc = predict(args.checkpoint, args.solid, args.out)
    if not args.out:
        sys.stdout.write(doc.decode("utf-8"))
    return 0


def cmd_ablate(args) -> int:
    from .harness import format_ablation_table, run_ablation

    cfg = _train_config(args)
    rows = run_ablation(cfg, args.variants, args.repeats, log=print)
    table = format_ablation_table(rows)
    out = Path(cfg.checkpoint_dir)
    (out / "ablation.json").write_text(json.dumps([r.to_dict() for r in rows], indent=1) + "\n")
    (out / "ablation.md").write_text(table)
    print(table, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="brepfr", description="Face-level machining feature recognition")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="generate a labelled synthetic dataset")
    s.add_argument("--config", help="JSON with DatasetConfig fields")
    s.add_argument("--count", type=int)
    s.add_argument("--classes", nargs="+", help="feature kinds to draw from (default: all)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("features", help="precompute network inputs for a dataset")
    s.add_argument("--dataset", help="dataset directory: cache inputs for every solid")
    s.add_argument("--in", dest="input", help="one solid document: write its topology arrays to --out")
    s.add_argument("--max-distance", type=int, default=16)
    s.add_argument("--out", help="feature directory (default: <dataset>/features) or array file with --in")
    s.add_argument("--config", help="unused; accepted for symmetry")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_features)

    for name, func, help_text in (("train", cmd_train, "train a model"), ("ablate", cmd_ablate, "run ablations")):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--config", help="JSON with TrainConfig fields (model: ModelConfig fields)")
        s.add_argument("--dataset")
        s.add_argument("--seed", type=int)
        s.add_argument("--epochs", type=int)
        s.add_argument("--out", help="checkpoint / results directory")
        s.set_defaults(func=func)
        if name == "ablate":
            s.add_argument("--variants", nargs="+", help="subset of variant names (default: all)")
            s.add_argument("--repeats", type=int, default=1, help="runs per variant; reports mean and std")

    s = sub.add_parser("eval", help="score a checkpoint on a split")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--split", default="test", choices=("train", "val", "test"))
    s.add_argument("--dataset")
    s.add_argument("--out", help="write the metrics JSON here")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("predict", help="label the faces of one solid document")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--solid", required=True)
    s.add_argument("--out", help="label sidecar path (default: stdout)")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SolidFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
