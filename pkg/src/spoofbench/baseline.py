"""Threshold-based hypothesis test: flag a position as spoofed when the
path-loss difference exceeds a fixed threshold T.

This is the non-learned baseline the MLP detectors are compared against.
It consumes the same decision windows: per station, the window mean of
|measured - theoretical| is tested against T, either averaged across
stations ("mean-delta") or by strict majority vote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .features import DeltaSeries

AGGREGATIONS = ("mean-delta", "majority-vote")


@dataclass(frozen=True)
class ThresholdDetector:
    threshold_db: float
    aggregation: str = "mean-delta"

    def __post_init__(self):
        if self.threshold_db < 0:
            raise ValueError("threshold must be >= 0")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")


def decide(detector: ThresholdDetector, deltas: list[DeltaSeries]) -> bool:
    """True (spoofed) when the aggregated window-mean delta exceeds T."""
    if not deltas:
        raise ValueError("no delta series given")
    means = np.array([float(np.mean(d.values)) for d in deltas])
    if detector.aggregation == "mean-delta":
        return bool(np.mean(means) > detector.threshold_db)
    return int(np.sum(means > detector.threshold_db)) * 2 > len(means)


@dataclass(frozen=True)
class OperatingPoint:
    threshold_db: float
    accuracy: float
    fp_rate: float
    fn_rate: float


def sweep_threshold(
    rows: list[tuple[list[DeltaSeries], bool]],
    t_grid,
    aggregation: str = "mean-delta",
) -> list[OperatingPoint]:
    """Operating curve of the detector over a grid of thresholds.

    rows pairs each window's per-station delta series with its true label
    (True = spoofed). FP rate is taken over legitimate rows, FN rate over
    spoofed rows.
    """
    if not rows:
        raise ValueError("empty dataset")
    t_grid = list(t_grid)
    if not t_grid:
        raise ValueError("empty threshold grid")
    labels = np.array([bool(lab) for _, lab in rows])
    n_spoofed = int(labels.sum())
    n_legit = len(labels) - n_spoofed
    curve = []
    for t in t_grid:
        detector = ThresholdDetector(float(t), aggregation)
        verdicts = np.array([decide(detector, deltas) for deltas, _ in rows])
        fp = int(np.sum(verdicts & ~labels))
        fn = int(np.sum(~verdicts & labels))
        curve.append(
            OperatingPoint(
                threshold_db=float(t),
                accuracy=float(np.mean(verdicts == labels)),
                fp_rate=fp / n_legit if n_legit else 0.0,
                fn_rate=fn / n_spoofed if n_spoofed else 0.0,
            )
        )
    return curve


def best_operating_point(curve: list[OperatingPoint]) -> OperatingPoint:
    """Highest-accuracy point; ties broken toward the smaller threshold."""
    finite_first = sorted(
        curve, key=lambda p: (-p.accuracy, math.inf if math.isinf(p.threshold_db) else p.threshold_db)
    )
    return finite_first[0]
