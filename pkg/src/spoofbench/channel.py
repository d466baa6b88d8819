"""Aerial path-loss channel between a UAV and ground base stations.

Theoretical path loss follows the urban-macro aerial model for elevated
user terminals (22.5 m to 300 m):

    LoS:  PL = 28.0 + 22 log10(d3d) + 20 log10(fc)
    NLoS: PL = -17.5 + (46 - 7 log10(h)) log10(d3d) + 20 log10(40 pi fc / 3)

with d3d in meters, fc in GHz and h the UAV height in meters. Above 100 m
the link is line-of-sight with probability one; between 22.5 m and 100 m
the LoS probability uses the model's d1/p1 height rule (below 22.5 m the
height is clamped to 22.5 for that rule). LoS shadow fading has standard
deviation 4.64 exp(-0.0066 h) dB; NLoS shadow fading is configurable.

"Measured" path loss is synthesized from the true UAV position plus shadow
fading plus independent measurement noise; the theoretical value is computed
noise-free from the reported GPS position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import BaseStation, SpoofingScenario, positions_at

LOS_PROBABILITY_MIN_HEIGHT = 22.5  # rule below this clamps to the model floor


@dataclass(frozen=True)
class ChannelParams:
    """Stochastic channel configuration; all sigmas in dB."""

    carrier_frequency: float  # GHz
    los_shadow_formula: bool = True  # height-dependent LoS shadow sigma on/off
    nlos_shadow_sigma: float = 6.0
    meas_noise_sigma: float = 0.5
    rng_seed: int = 1
    sampled_los: bool = False  # draw the LoS/NLoS branch instead of thresholding

    def __post_init__(self):
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be > 0")
        if self.nlos_shadow_sigma < 0 or self.meas_noise_sigma < 0:
            raise ValueError("noise sigmas must be >= 0")


@dataclass(frozen=True)
class PathLossSample:
    """One aligned (measured, theoretical) path-loss pair for one station."""

    bs_id: int
    t: int  # sample index within the window
    measured_db: float
    theoretical_db: float

    def __post_init__(self):
        if not (math.isfinite(self.measured_db) and math.isfinite(self.theoretical_db)):
            raise ValueError("path loss values must be finite")


def distance_3d(p, q) -> float:
    return float(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


def los_probability(uav_height: float, d2d: float) -> float:
    """Probability that the UAV-to-station link is line-of-sight."""
    if uav_height <= 0:
        raise ValueError("uav_height must be > 0")
    return float(_los_probability_array(np.asarray([uav_height]), np.asarray([d2d]))[0])


def _los_probability_array(heights: np.ndarray, d2d: np.ndarray) -> np.ndarray:
    h = np.maximum(np.asarray(heights, dtype=float), LOS_PROBABILITY_MIN_HEIGHT)
    d2d = np.asarray(d2d, dtype=float)
    d1 = np.maximum(460.0 * np.log10(h) - 700.0, 18.0)
    p1 = 4300.0 * np.log10(h) - 3800.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        far = d1 / d2d + np.exp(-d2d / p1) * (1.0 - d1 / d2d)
    prob = np.where(d2d <= d1, 1.0, far)
    return np.where(heights > 100.0, 1.0, np.clip(prob, 0.0, 1.0))


def los_shadow_sigma(uav_height: float) -> float:
    """Height-dependent LoS shadow-fading standard deviation in dB."""
    return 4.64 * math.exp(-0.0066 * uav_height)


def _path_loss_arrays(
    positions: np.ndarray, bs: BaseStation, params: ChannelParams, rng=None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Path loss, LoS mask and heights for an (n, 3) array of UAV positions."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    delta = positions - bs.position
    d3d = np.linalg.norm(delta, axis=1)
    if np.any(d3d == 0.0):
        raise ValueError("UAV position coincides with the base station")
    d2d = np.linalg.norm(delta[:, :2], axis=1)
    heights = positions[:, 2]
    prob = _los_probability_array(heights, d2d)
    if params.sampled_los and rng is not None:
        los = rng.random(len(prob)) < prob
    else:
        los = prob >= 0.5
    fc = params.carrier_frequency
    pl_los = 28.0 + 22.0 * np.log10(d3d) + 20.0 * np.log10(fc)
    if np.all(los):
        return pl_los, los, heights
    if np.any(heights[~los] <= 0):
        raise ValueError("NLoS path loss undefined at zero height")
    pl_nlos = (
        -17.5
        + (46.0 - 7.0 * np.log10(heights)) * np.log10(d3d)
        + 20.0 * np.log10(40.0 * math.pi * fc / 3.0)
    )
    return np.where(los, pl_los, pl_nlos), los, heights


def theoretical_path_loss(uav, bs: BaseStation, params: ChannelParams) -> float:
    """Model path loss in dB for a UAV at the given position."""
    pl, _, _ = _path_loss_arrays(np.asarray(uav, dtype=float), bs, params)
    return float(pl[0])


def _shadow_sigmas(heights: np.ndarray, los: np.ndarray, params: ChannelParams) -> np.ndarray:
    if params.los_shadow_formula:
        sigma_los = 4.64 * np.exp(-0.0066 * heights)
    else:
        sigma_los = np.zeros_like(heights)
    return np.where(los, sigma_los, params.nlos_shadow_sigma)


def measured_path_loss(
    uav_true, bs: BaseStation, params: ChannelParams, rng: np.random.Generator
) -> float:
    """Noisy path loss as a station would report it for the true position."""
    pl, los, heights = _path_loss_arrays(np.asarray(uav_true, dtype=float), bs, params, rng)
    sigma = _shadow_sigmas(heights, los, params)
    shadow = rng.normal(0.0, sigma[0])
    noise = rng.normal(0.0, params.meas_noise_sigma)
    return float(pl[0] + shadow + noise)


def window_rng(params: ChannelParams, noise_seed: int, bs_id: int) -> np.random.Generator:
    """Fixed seed derivation: one independent stream per (seed, flight, station)."""
    return np.random.default_rng([params.rng_seed, noise_seed, bs_id])


def sample_window(
    scenario: SpoofingScenario,
    bs: BaseStation,
    params: ChannelParams,
    n_samples: int | None = None,
) -> list[PathLossSample]:
    """One decision window: aligned (measured, theoretical) pairs.

    Measured values come from the true trajectory with shadow fading and
    measurement noise; theoretical values are the noise-free model output at
    the reported trajectory. Deterministic given (scenario, params) because
    the random stream is derived from their seeds.
    """
    traj = scenario.true_trajectory
    if n_samples is None:
        n_samples = traj.n_samples()
    if n_samples < 1:
        raise ValueError("window needs at least one sample")
    period = traj.sample_period
    ts = np.arange(n_samples) * period
    if ts[-1] > traj.duration or ts[-1] > scenario.reported_trajectory.duration:
        raise ValueError(
            f"trajectory too short for a {n_samples}-sample window"
        )
    rng = window_rng(params, scenario.noise_seed, bs.id)
    true_pos = positions_at(scenario.true_trajectory, ts)
    rep_pos = positions_at(scenario.reported_trajectory, ts)
    pl_true, los, heights = _path_loss_arrays(true_pos, bs, params, rng)
    sigma = _shadow_sigmas(heights, los, params)
    measured = pl_true + rng.normal(0.0, sigma) + rng.normal(0.0, params.meas_noise_sigma, n_samples)
    theoretical, _, _ = _path_loss_arrays(rep_pos, bs, params)
    return [
        PathLossSample(bs.id, k, float(measured[k]), float(theoretical[k]))
        for k in range(n_samples)
    ]
