#!/usr/bin/env python3
"""Train all nine (feature method, station count) detectors at the shipped
reference settings and merge their training curves into one report CSV.

Usage: python scripts/run_scenario_sweep.py [--seed 1] [--workdir runs/sweep]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from spoofbench.cli import main as cli
from spoofbench.features import METHODS
from spoofbench.presets import best_settings


def run(seed: int, workdir: Path) -> None:
    workdir.mkdir(parents=True, exist_ok=True)
    assert cli(["init", "--out", str(workdir), "--seed", str(seed)]) == 0
    spec = str(workdir / "spec.json")
    run_dirs = []
    results = {}
    for n_bs in (3, 2, 1):
        data = workdir / f"data_{n_bs}bs"
        for method in METHODS:
            assert cli(["generate", "--spec", spec, "--out", str(data / method),
                        "--method", method, "--n-bs", str(n_bs)]) == 0
            lr, layers, neurons = best_settings(method, n_bs)
            run_dir = workdir / f"run_{method}_{n_bs}bs"
            assert cli(["train", str(data / method), "--out", str(run_dir),
                        "--lr", str(lr), "--layers", str(layers),
                        "--neurons", str(neurons), "--seed", str(seed)]) == 0
            report = run_dir / "report.json"
            assert cli(["evaluate", str(data / method),
                        "--model", str(run_dir / "model.json"),
                        "--out", str(report)]) == 0
            results[(method, n_bs)] = json.loads(report.read_text())["test_accuracy"]
            run_dirs.append(str(run_dir))
    assert cli(["report", *run_dirs, "--out", str(workdir / "curves.csv")]) == 0

    print("\ntest accuracy by scenario:")
    print(f"{'':8s}" + "".join(f"{m:>8s}" for m in METHODS))
    for n_bs in (3, 2, 1):
        print(f"{n_bs} BS    " + "".join(f"{results[(m, n_bs)]:8.4f}" for m in METHODS))
    print(f"\ncurves: {workdir / 'curves.csv'}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workdir", type=Path, default=Path("runs/sweep"))
    run(**vars(ap.parse_args()))
