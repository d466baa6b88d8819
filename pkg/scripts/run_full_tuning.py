#!/usr/bin/env python3
"""Full hyperparameter search: 6 learning rates x 6 depths x 6 widths = 216
configurations per (method, station count). Long-running; restrict with
--methods/--n-bs or parallelize with --jobs.

Usage: python scripts/run_full_tuning.py --methods wd --n-bs 3 --jobs 4
"""

from __future__ import annotations

import argparse
from pathlib import Path

from spoofbench.cli import main as cli
from spoofbench.features import METHODS


def run(seed: int, workdir: Path, methods: list[str], n_bs: list[int], jobs: int) -> None:
    workdir.mkdir(parents=True, exist_ok=True)
    assert cli(["init", "--out", str(workdir), "--seed", str(seed)]) == 0
    spec = str(workdir / "spec.json")
    for k in n_bs:
        for method in methods:
            data = workdir / f"data_{method}_{k}bs"
            assert cli(["generate", "--spec", spec, "--out", str(data),
                        "--method", method, "--n-bs", str(k)]) == 0
            out = workdir / f"tuned_{method}_{k}bs"
            assert cli(["tune", str(data), "--out", str(out),
                        "--jobs", str(jobs), "--seed", str(seed)]) == 0
            assert cli(["evaluate", str(data), "--model", str(out / "model.json"),
                        "--out", str(out / "report.json")]) == 0
            print(f"-> {out}/grid_report.csv")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workdir", type=Path, default=Path("runs/tuning"))
    ap.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    ap.add_argument("--n-bs", nargs="+", type=int, choices=(1, 2, 3), default=[3, 2, 1])
    ap.add_argument("--jobs", type=int, default=1)
    run(**vars(ap.parse_args()))
