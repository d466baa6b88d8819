#!/usr/bin/env python3
"""Headline experiment: 3-station WD detector on the default full-size
dataset (2259 train / 969 test rows), trained at the shipped reference
settings, compared against the best threshold baseline.

Usage: python scripts/run_headline.py [--seed 1] [--workdir runs/headline]
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

import numpy as np

from spoofbench.cli import main as cli
from spoofbench import baseline, dataset
from spoofbench.presets import best_settings


def run(seed: int, workdir: Path) -> None:
    workdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    assert cli(["init", "--out", str(workdir), "--method", "wd", "--n-bs", "3",
                "--seed", str(seed)]) == 0
    assert cli(["generate", "--spec", str(workdir / "spec.json"),
                "--out", str(workdir / "data")]) == 0
    lr, layers, neurons = best_settings("wd", 3)
    assert cli(["train", str(workdir / "data"), "--out", str(workdir / "run"),
                "--lr", str(lr), "--layers", str(layers), "--neurons", str(neurons),
                "--seed", str(seed)]) == 0
    assert cli(["evaluate", str(workdir / "data"),
                "--model", str(workdir / "run" / "model.json"),
                "--out", str(workdir / "report.json")]) == 0
    report = json.loads((workdir / "report.json").read_text())
    elapsed = time.perf_counter() - t0

    # Threshold baseline on the same windows, best T over a fine grid.
    spec = dataset.spec_from_dict(json.loads((workdir / "spec.json").read_text()))
    rows = list(dataset.iter_delta_rows(spec, "test"))
    curve = baseline.sweep_threshold(rows, np.linspace(0.0, 6.0, 121))
    best = baseline.best_operating_point(curve)

    print(f"\nWD-MLP (3 BS) test accuracy : {report['test_accuracy']:.4f}")
    print(f"WD-MLP test MSE             : {report['test_mse']:.5f}")
    print(f"confusion                   : {report['confusion']}")
    print(f"best threshold baseline     : acc {best.accuracy:.4f} at T={best.threshold_db:.2f} dB")
    print(f"MLP margin over baseline    : {report['test_accuracy'] - best.accuracy:+.4f}")
    print(f"wall clock                  : {elapsed:.1f} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workdir", type=Path, default=Path("runs/headline"))
    run(**vars(ap.parse_args()))
