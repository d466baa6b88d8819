"""Command-line workbench: simulate flights, generate datasets, train and
tune detectors, evaluate them and merge training curves into report CSVs.

Every command is replayable: outputs embed the hash of the generating spec
and a single --seed value reproduces a whole experiment byte for byte
(wall-clock fields excepted).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import baseline, dataset, mlp
from .channel import sample_window
from .configio import config_to_dict, load_config, save_config
from .features import FEATURES_PER_BS, METHODS
from .presets import BEST_SETTINGS
from .scenario import build_scenarios, default_config
from .channel import ChannelParams

ARCHIVE_FORMAT = "spoofbench-archive"
REPORT_FORMAT = "spoofbench-report"
FORMAT_VERSION = 1


def _write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_init(args) -> int:
    """Write the default scenario config and dataset spec to a directory."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario = default_config(rng_seed=args.seed)
    channel = ChannelParams(
        carrier_frequency=scenario.carrier_frequency, rng_seed=args.seed
    )
    save_config(out / "config.json", scenario, channel)
    spec = dataset.DatasetSpec(
        scenario=scenario,
        channel=channel,
        method=args.method,
        n_bs=args.n_bs,
        train_size=args.train_size,
        test_size=args.test_size,
        rng_seed=args.seed,
    )
    _write_json(out / "spec.json", dataset.spec_to_dict(spec))
    print(f"wrote {out / 'config.json'} and {out / 'spec.json'}")
    return 0


def cmd_simulate(args) -> int:
    """Deterministic archive of every scenario's per-station windows."""
    scenario_cfg, channel = load_config(args.config)
    if args.seed is not None:
        scenario_cfg = replace(scenario_cfg, rng_seed=args.seed)
        channel = replace(channel, rng_seed=args.seed)
    scenarios = build_scenarios(scenario_cfg)
    entries = []
    for i, sc in enumerate(scenarios):
        windows = {}
        for bs in scenario_cfg.base_stations:
            samples = sample_window(sc, bs, channel, scenario_cfg.window_size)
            windows[str(bs.id)] = {
                "measured_db": [s.measured_db for s in samples],
                "theoretical_db": [s.theoretical_db for s in samples],
            }
        entries.append(
            {
                "index": i,
                "label": sc.label,
                "noise_seed": sc.noise_seed,
                "true_destination": list(sc.true_trajectory.waypoints[-1].position),
                "reported_destination": list(sc.reported_trajectory.waypoints[-1].position),
                "windows": windows,
            }
        )
    _write_json(
        args.out,
        {
            "format": ARCHIVE_FORMAT,
            "format_version": FORMAT_VERSION,
            "config": config_to_dict(scenario_cfg, channel),
            "base_stations": [bs.id for bs in scenario_cfg.base_stations],
            "scenarios": entries,
        },
    )
    print(f"wrote {args.out}: {len(entries)} scenarios x {len(scenario_cfg.base_stations)} stations")
    return 0


def _load_spec(args) -> dataset.DatasetSpec:
    doc = json.loads(Path(args.spec).read_text())
    spec = dataset.spec_from_dict(doc)
    if getattr(args, "method", None):
        spec = replace(spec, method=args.method)
    if getattr(args, "n_bs", None):
        spec = replace(spec, n_bs=args.n_bs)
    if args.seed is not None:
        spec = replace(
            spec,
            rng_seed=args.seed,
            scenario=replace(spec.scenario, rng_seed=args.seed),
            channel=replace(spec.channel, rng_seed=args.seed),
        )
    return spec


def cmd_generate(args) -> int:
    """Wrap dataset.generate: write train/test CSVs plus spec sidecars."""
    spec = _load_spec(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train_ds, test_ds = dataset.generate(spec)
    dataset.save(train_ds, out / "train.csv")
    dataset.save(test_ds, out / "test.csv")
    print(
        f"wrote {out}/{{train,test}}.csv: {len(train_ds.rows)}/{len(test_ds.rows)} rows, "
        f"width {train_ds.width} ({spec.method}, {spec.n_bs} BS), spec {train_ds.provenance[:12]}"
    )
    return 0


def _load_split(data_dir, split: str) -> dataset.LabeledDataset:
    return dataset.load(Path(data_dir) / f"{split}.csv")


def _infer_n_bs(ds: dataset.LabeledDataset) -> int:
    if ds.spec is not None:
        return ds.spec.n_bs
    return ds.width // FEATURES_PER_BS[ds.method]


def cmd_train(args) -> int:
    """Train one MLP on a generated dataset; write model JSON + history CSV."""
    train_ds = _load_split(args.data_dir, "train")
    method = args.method or train_ds.method
    if method != train_ds.method:
        raise ValueError(f"dataset was extracted with {train_ds.method!r}, not {method!r}")
    n_bs = _infer_n_bs(train_ds)
    preset = BEST_SETTINGS.get((method, n_bs), (0.001, 3, 32))
    lr = args.lr if args.lr is not None else preset[0]
    layers = args.layers if args.layers is not None else preset[1]
    neurons = args.neurons if args.neurons is not None else preset[2]
    config = mlp.TrainConfig(
        learning_rate=lr,
        max_epochs=args.epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        validation_fraction=args.val_fraction,
        rng_seed=args.seed if args.seed is not None else 1,
    )
    arch = mlp.MlpArchitecture(train_ds.width, layers, neurons)
    model = mlp.train(arch, train_ds.features(), train_ds.labels(), config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"method": method, "n_bs": n_bs, "dataset_spec_hash": train_ds.provenance}
    mlp.save_model(model, out / "model.json", meta)
    mlp.write_history_csv(model.history, out / "history.csv")
    print(
        f"wrote {out}/model.json: {len(model.history)} epochs, best {model.best_epoch} "
        f"(val_mse {model.val_mse:.5f}, val_acc {model.val_accuracy:.4f})"
    )
    return 0


def _parse_grid(text: str | None, default, cast):
    if text is None:
        return default
    values = tuple(cast(v) for v in text.split(",") if v)
    if not values:
        raise ValueError("empty grid")
    return values


def cmd_tune(args) -> int:
    """Grid-search hyperparameters; write the full grid report and the winner."""
    train_ds = _load_split(args.data_dir, "train")
    method = args.method or train_ds.method
    if method != train_ds.method:
        raise ValueError(f"dataset was extracted with {train_ds.method!r}, not {method!r}")
    lrs = _parse_grid(args.lr_grid, mlp.GRID_LEARNING_RATES, float)
    layer_grid = _parse_grid(args.layers_grid, mlp.GRID_HIDDEN_LAYERS, int)
    neuron_grid = _parse_grid(args.neurons_grid, mlp.GRID_NEURONS, int)
    base = mlp.TrainConfig(
        learning_rate=lrs[0],
        max_epochs=args.epochs,
        patience=args.patience,
        batch_size=args.batch_size,
        validation_fraction=args.val_fraction,
        rng_seed=args.seed if args.seed is not None else 1,
    )
    result = mlp.tune(
        train_ds.features(),
        train_ds.labels(),
        base,
        learning_rates=lrs,
        hidden_layers=layer_grid,
        neurons=neuron_grid,
        jobs=args.jobs,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    order = sorted(range(len(result.results)), key=lambda i: (mlp.selection_key(result.results[i]), i))
    rank = {i: r + 1 for r, i in enumerate(order)}
    lines = ["method,learning_rate,hidden_layers,neurons,param_count,epochs_run,best_epoch,val_mse,val_accuracy,rank"]
    for i, row in enumerate(result.results):
        lines.append(
            f"{method},{row.learning_rate!r},{row.hidden_layers},{row.neurons},"
            f"{row.param_count},{row.epochs_run},{row.best_epoch},"
            f"{row.val_mse!r},{row.val_accuracy!r},{rank[i]}"
        )
    (out / "grid_report.csv").write_text("\n".join(lines) + "\n")
    n_bs = _infer_n_bs(train_ds)
    meta = {"method": method, "n_bs": n_bs, "dataset_spec_hash": train_ds.provenance}
    mlp.save_model(result.best_model, out / "model.json", meta)
    mlp.write_history_csv(result.best_model.history, out / "history.csv")
    best = result.results[result.best_index]
    print(
        f"wrote {out}/grid_report.csv ({len(result.results)} configurations); best: "
        f"lr={best.learning_rate} layers={best.hidden_layers} neurons={best.neurons} "
        f"val_mse={best.val_mse:.5f}"
    )
    return 0


def _confusion_report(predictions, labels, started: float, spec_hash_: str, detector: dict, history) -> dict:
    counts = mlp.confusion_matrix(predictions, labels)
    if sum(counts.values()) != len(labels):
        raise AssertionError("confusion matrix does not sum to the dataset size")
    return {
        "format": REPORT_FORMAT,
        "format_version": FORMAT_VERSION,
        "dataset_spec_hash": spec_hash_,
        "detector": detector,
        "test_accuracy": mlp.accuracy(predictions, labels),
        "test_mse": mlp.loss_mse(predictions, labels),
        "confusion": counts,
        "history": [[s.epoch, s.train_mse, s.val_mse, s.val_accuracy] for s in history],
        "wall_clock_s": time.perf_counter() - started,
    }


def cmd_evaluate(args) -> int:
    """Score an MLP model file or the threshold baseline on a dataset split."""
    started = time.perf_counter()
    ds = _load_split(args.data_dir, args.split)
    labels = ds.labels()
    if args.model:
        model, meta = mlp.load_model(args.model)
        if meta.get("method") and meta["method"] != ds.method:
            raise ValueError(
                f"model was trained on {meta['method']!r} features, dataset is {ds.method!r}"
            )
        predictions = mlp.forward_batch(model, ds.features())
        detector = {
            "kind": "mlp",
            "architecture": asdict(model.architecture),
            "train_config": asdict(model.train_config) if model.train_config else None,
            "method": meta.get("method"),
            "model_sha256": _sha256(args.model),
        }
        history = model.history
    else:
        if ds.spec is None:
            raise ValueError("threshold evaluation needs the dataset sidecar to embed its spec")
        det = baseline.ThresholdDetector(args.t, args.aggregation)
        verdicts = [
            baseline.decide(det, deltas)
            for deltas, _ in dataset.iter_delta_rows(ds.spec, args.split)
        ]
        predictions = np.array([float(v) for v in verdicts])
        detector = {"kind": "threshold", "threshold_db": args.t, "aggregation": args.aggregation}
        history = []
    report = _confusion_report(predictions, labels, started, ds.provenance, detector, history)
    _write_json(args.out, report)
    print(
        f"wrote {args.out}: accuracy {report['test_accuracy']:.4f}, "
        f"mse {report['test_mse']:.5f} on {len(labels)} {args.split} rows"
    )
    return 0


def cmd_report(args) -> int:
    """Merge run histories into one scenario,method,epoch,accuracy,mse CSV."""
    rows = []
    for run_dir in args.run_dirs:
        model, meta = mlp.load_model(Path(run_dir) / "model.json")
        scenario = f"{meta.get('n_bs', '?')}bs"
        method = meta.get("method", "?")
        for s in model.history:
            rows.append((scenario, method, s.epoch, s.val_accuracy, s.val_mse))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    lines = ["scenario,method,epoch,accuracy,mse"]
    for scenario, method, epoch, acc, mse in rows:
        lines.append(f"{scenario},{method},{epoch},{acc!r},{mse!r}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote {args.out}: {len(rows)} rows from {len(args.run_dirs)} runs")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spoofbench",
        description="GPS spoofing detection workbench: simulate, featurize, train, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="write default config.json and spec.json")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--method", choices=METHODS, default="wd")
    p.add_argument("--n-bs", type=int, choices=(1, 2, 3), default=3)
    p.add_argument("--train-size", type=int, default=2259)
    p.add_argument("--test-size", type=int, default=969)
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("simulate", help="write a scenario + window archive")
    p.add_argument("--config", required=True, help="scenario config file")
    p.add_argument("--out", required=True, help="archive JSON path")
    p.add_argument("--seed", type=int, default=None, help="override every rng seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="generate labeled train/test datasets")
    p.add_argument("--spec", required=True, help="dataset spec file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--method", choices=METHODS, default=None, help="override spec method")
    p.add_argument("--n-bs", type=int, choices=(1, 2, 3), default=None, help="override spec n_bs")
    p.add_argument("--seed", type=int, default=None, help="override every rng seed")
    p.set_defaults(func=cmd_generate)

    def train_flags(p):
        p.add_argument("--epochs", type=int, default=500)
        p.add_argument("--patience", type=int, default=15)
        p.add_argument("--batch-size", type=int, default=32)
        p.add_argument("--val-fraction", type=float, default=0.2)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("train", help="train one MLP detector")
    p.add_argument("data_dir", help="directory with train.csv from `generate`")
    p.add_argument("--out", required=True, help="output run directory")
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--neurons", type=int, default=None)
    train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="hyperparameter grid search")
    p.add_argument("data_dir")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--lr-grid", default=None, help="comma-separated learning rates")
    p.add_argument("--layers-grid", default=None, help="comma-separated depths")
    p.add_argument("--neurons-grid", default=None, help="comma-separated widths")
    p.add_argument("--jobs", type=int, default=1)
    train_flags(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("evaluate", help="score a model or the threshold baseline")
    p.add_argument("data_dir")
    p.add_argument("--model", default=None, help="model.json from `train`/`tune`")
    p.add_argument("--detector", choices=("threshold",), default=None)
    p.add_argument("--t", type=float, default=1.0, help="threshold in dB")
    p.add_argument("--aggregation", choices=baseline.AGGREGATIONS, default="mean-delta")
    p.add_argument("--split", choices=("train", "test"), default="test")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="merge run histories into one CSV")
    p.add_argument("run_dirs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "evaluate" and bool(args.model) == bool(args.detector):
        print("error: evaluate needs exactly one of --model or --detector", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
