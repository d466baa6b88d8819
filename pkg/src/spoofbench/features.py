"""Statistical features of measured-vs-theoretical path loss windows.

Three feature families summarize each station's series of absolute
measured-vs-theoretical differences:

  mvsk -- mean, variance, skewness, kurtosis
  box  -- five-number summary (min, quartiles, max)
  wd   -- 1-D Wasserstein distance between the difference distribution and
          the all-zero reference of an unspoofed link (one value per
          station); optionally the raw measured sample is compared against
          the raw theoretical sample instead

Feature vectors concatenate the per-station blocks in ascending station id,
so the input width is n_stations * {4, 5, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import PathLossSample

METHODS = ("mvsk", "box", "wd")
FEATURES_PER_BS = {"mvsk": 4, "box": 5, "wd": 1}


def check_method(method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"unknown feature method {method!r}; expected one of {METHODS}")
    return method


@dataclass(frozen=True)
class DeltaSeries:
    """Per-instant |measured - theoretical| path loss for one station."""

    bs_id: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 1 or len(v) == 0:
            raise ValueError("delta series must be a non-empty 1-D array")
        if np.any(v < 0):
            raise ValueError("delta series values must be >= 0")


def delta_series(window: list[PathLossSample]) -> DeltaSeries:
    """Absolute measured-vs-theoretical differences for a single station."""
    if not window:
        raise ValueError("empty window")
    ids = {s.bs_id for s in window}
    if len(ids) != 1:
        raise ValueError(f"window mixes base stations {sorted(ids)}")
    values = np.array([abs(s.measured_db - s.theoretical_db) for s in window])
    return DeltaSeries(bs_id=window[0].bs_id, values=values)


def mvsk(series) -> tuple[float, float, float, float]:
    """Mean, sample variance (n-1), skewness g1 and excess kurtosis g2.

    g1 = m3 / m2^1.5 and g2 = m4 / m2^2 - 3 with central moments m_k taken
    over n. A constant series has zero variance; its skewness and kurtosis
    are defined as 0.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError("mvsk needs a 1-D series of length >= 2")
    x = np.sort(x)  # canonical summation order: bit-exact under permutation
    n = len(x)
    mean = float(np.mean(x))
    centered = x - mean
    variance = float(np.sum(centered**2) / (n - 1))
    m2 = float(np.sum(centered**2) / n)
    if m2 == 0.0:
        return mean, 0.0, 0.0, 0.0
    m3 = float(np.sum(centered**3) / n)
    m4 = float(np.sum(centered**4) / n)
    return mean, variance, m3 / m2**1.5, m4 / m2**2 - 3.0


def box(series) -> tuple[float, float, float, float, float]:
    """Five-number summary with linearly interpolated quartiles."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("box needs a non-empty 1-D series")
    q = np.quantile(x, [0.0, 0.25, 0.5, 0.75, 1.0])
    return tuple(float(v) for v in q)


def wasserstein_1d(a, b) -> float:
    """Order-1 Wasserstein distance between two equal-size empirical samples:
    the mean absolute difference of the sorted values."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1 or len(a) == 0:
        raise ValueError("need non-empty 1-D samples")
    if len(a) != len(b):
        raise ValueError(f"sample sizes differ: {len(a)} vs {len(b)}")
    return float(np.mean(np.abs(np.sort(a) - np.sort(b))))


@dataclass(frozen=True)
class FeatureVector:
    """Flattened per-station features for one window, with its label."""

    method: str
    per_bs: tuple[tuple[int, tuple[float, ...]], ...]  # (bs_id, block), ascending id
    flattened: np.ndarray
    label: bool

    def __post_init__(self):
        object.__setattr__(self, "flattened", np.asarray(self.flattened, dtype=float))
        check_method(self.method)
        ids = [bs_id for bs_id, _ in self.per_bs]
        if ids != sorted(ids) or len(set(ids)) != len(ids):
            raise ValueError("per-station blocks must be ordered by unique bs_id")
        expected = len(self.per_bs) * FEATURES_PER_BS[self.method]
        if len(self.flattened) != expected:
            raise ValueError(
                f"{self.method} features for {len(self.per_bs)} stations "
                f"must have width {expected}, got {len(self.flattened)}"
            )
        if not np.all(np.isfinite(self.flattened)):
            raise ValueError("features must be finite")

    @property
    def width(self) -> int:
        return len(self.flattened)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return (
            self.method == other.method
            and self.label == other.label
            and self.per_bs == other.per_bs
            and np.array_equal(self.flattened, other.flattened)
        )


def extract(
    windows: list[list[PathLossSample]],
    method: str,
    label: bool,
    wd_on_raw: bool = False,
) -> FeatureVector:
    """Feature vector for one decision instant from per-station windows.

    mvsk and box summarize each station's |measured - theoretical| series;
    wd measures how far that series' distribution sits from the all-zero
    reference (or, with wd_on_raw, compares the raw measured sample against
    the raw theoretical one).
    """
    check_method(method)
    if not windows:
        raise ValueError("no windows given")
    lengths = {len(w) for w in windows}
    if len(lengths) != 1:
        raise ValueError(f"windows have inconsistent lengths {sorted(lengths)}")
    blocks: list[tuple[int, tuple[float, ...]]] = []
    for window in windows:
        deltas = delta_series(window)
        if method == "mvsk":
            block = mvsk(deltas.values)
        elif method == "box":
            block = box(deltas.values)
        else:
            if wd_on_raw:
                measured = [s.measured_db for s in window]
                theoretical = [s.theoretical_db for s in window]
                block = (wasserstein_1d(measured, theoretical),)
            else:
                block = (wasserstein_1d(deltas.values, np.zeros_like(deltas.values)),)
        blocks.append((deltas.bs_id, tuple(float(v) for v in block)))
    blocks.sort(key=lambda item: item[0])
    flattened = np.concatenate([np.asarray(blk, dtype=float) for _, blk in blocks])
    return FeatureVector(method=method, per_bs=tuple(blocks), flattened=flattened, label=label)
