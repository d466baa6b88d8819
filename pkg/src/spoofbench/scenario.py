"""Scene geometry: base stations, flight trajectories, destination layouts
and spoofing scenarios.

A flight goes from a fixed start point to one of several destinations spread
on a sphere around the start. The GPS receiver reports a trajectory toward
the planned destination (index 0); under spoofing the vehicle physically
flies toward a different destination while still reporting the planned path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

ELEVATION_SPREAD_DEG = 15.0  # destinations sit at +/- this elevation angle


def _as_vec3(p) -> np.ndarray:
    v = np.asarray(p, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class BaseStation:
    """A fixed ground station at (x, y, h) meters, h above ground."""

    id: int
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec3(self.position))
        if self.position[2] <= 0:
            raise ValueError(f"base station {self.id} height must be > 0")

    def __eq__(self, other):
        if not isinstance(other, BaseStation):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.position, other.position)


@dataclass(frozen=True, eq=False)
class Waypoint:
    position: np.ndarray
    time: float  # seconds since mission start

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec3(self.position))
        if self.position[2] < 0:
            raise ValueError("waypoint altitude must be >= 0")
        if self.time < 0:
            raise ValueError("waypoint time must be >= 0")

    def __eq__(self, other):
        if not isinstance(other, Waypoint):
            return NotImplemented
        return self.time == other.time and np.array_equal(self.position, other.position)


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear path through waypoints, sampled every sample_period."""

    waypoints: tuple[Waypoint, ...]
    sample_period: float

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise ValueError("trajectory needs at least 2 waypoints")
        times = [w.time for w in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("waypoint times must be strictly increasing")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be > 0")

    @property
    def duration(self) -> float:
        return self.waypoints[-1].time - self.waypoints[0].time

    def times(self) -> np.ndarray:
        return np.array([w.time for w in self.waypoints])

    def points(self) -> np.ndarray:
        return np.stack([w.position for w in self.waypoints])

    def n_samples(self) -> int:
        """Number of sample instants k*sample_period that fit in the flight."""
        return int(math.floor(self.waypoints[-1].time / self.sample_period)) + 1


def position_at(trajectory: Trajectory, t: float) -> np.ndarray:
    """Position at time t, linearly interpolated between waypoints."""
    return positions_at(trajectory, np.asarray([t], dtype=float))[0]


def positions_at(trajectory: Trajectory, ts: np.ndarray) -> np.ndarray:
    """Vectorized position_at: returns an (n, 3) array for n query times."""
    ts = np.asarray(ts, dtype=float)
    times = trajectory.times()
    if np.any(ts < times[0]) or np.any(ts > times[-1]):
        raise ValueError(
            f"query time outside trajectory range [{times[0]}, {times[-1]}]"
        )
    pts = trajectory.points()
    return np.stack([np.interp(ts, times, pts[:, k]) for k in range(3)], axis=1)


def _trajectories_equal(a: Trajectory, b: Trajectory) -> bool:
    return (
        len(a.waypoints) == len(b.waypoints)
        and a.sample_period == b.sample_period
        and all(
            wa.time == wb.time and np.array_equal(wa.position, wb.position)
            for wa, wb in zip(a.waypoints, b.waypoints)
        )
    )


@dataclass(frozen=True)
class SpoofingScenario:
    """One flight: where the UAV really is vs. where its GPS says it is.

    label is True when the reported trajectory diverges from the true one
    (spoofed). spoof_onset is the time at which the two paths start to
    diverge; noise_seed individualizes the measurement noise of this flight.
    """

    true_trajectory: Trajectory
    reported_trajectory: Trajectory
    label: bool
    spoof_onset: float = 0.0
    noise_seed: int = 0

    def __post_init__(self):
        same = _trajectories_equal(self.true_trajectory, self.reported_trajectory)
        if not self.label:
            if not same:
                raise ValueError("legitimate scenario must have identical trajectories")
            return
        if same:
            raise ValueError("spoofed scenario must have divergent trajectories")
        # Paths must agree strictly before onset and differ somewhere after.
        period = self.true_trajectory.sample_period
        end = min(self.true_trajectory.duration, self.reported_trajectory.duration)
        ts = np.arange(0.0, end + 0.5 * period, period)
        ts = ts[ts <= end]
        p_true = positions_at(self.true_trajectory, ts)
        p_rep = positions_at(self.reported_trajectory, ts)
        diverged = np.any(p_true != p_rep, axis=1)
        if np.any(diverged & (ts < self.spoof_onset)):
            raise ValueError("trajectories diverge before spoof_onset")
        if not np.any(diverged & (ts >= self.spoof_onset)):
            raise ValueError("spoofed trajectories never diverge after onset")


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Every knob of the simulated mission, serializable to a config file."""

    base_stations: tuple[BaseStation, ...]
    start: np.ndarray
    mission_radius: float  # meters from start to every destination
    n_destinations: int
    carrier_frequency: float  # GHz
    window_size: int  # samples per decision window
    rng_seed: int
    sample_period: float = 1.0  # seconds between path-loss samples

    def __post_init__(self):
        object.__setattr__(self, "base_stations", tuple(self.base_stations))
        object.__setattr__(self, "start", _as_vec3(self.start))
        ids = [bs.id for bs in self.base_stations]
        if len(set(ids)) != len(ids):
            raise ValueError("base station ids must be unique")
        if self.n_destinations < 2:
            raise ValueError("need at least 2 destinations")
        if self.window_size < 2:
            raise ValueError("window_size must be >= 2")
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be > 0")
        if self.mission_radius <= 0:
            raise ValueError("mission_radius must be > 0")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be > 0")

    def __eq__(self, other):
        if not isinstance(other, ScenarioConfig):
            return NotImplemented
        return (
            self.base_stations == other.base_stations
            and np.array_equal(self.start, other.start)
            and (
                self.mission_radius,
                self.n_destinations,
                self.carrier_frequency,
                self.window_size,
                self.rng_seed,
                self.sample_period,
            )
            == (
                other.mission_radius,
                other.n_destinations,
                other.carrier_frequency,
                other.window_size,
                other.rng_seed,
                other.sample_period,
            )
        )

    def base_station_by_id(self, bs_id: int) -> BaseStation:
        for bs in self.base_stations:
            if bs.id == bs_id:
                return bs
        raise KeyError(f"no base station with id {bs_id}")

    @property
    def flight_duration(self) -> float:
        # One full decision window per flight.
        return self.window_size * self.sample_period


def default_config(rng_seed: int = 1) -> ScenarioConfig:
    """Reference setup: three 35 m stations, start at (150,150,150), sixteen
    destinations 100 m away, 2.0 GHz, 100-sample windows."""
    return ScenarioConfig(
        base_stations=(
            BaseStation(1, np.array([0.0, 0.0, 35.0])),
            BaseStation(2, np.array([150.0, 150.0, 35.0])),
            BaseStation(3, np.array([300.0, 150.0, 35.0])),
        ),
        start=np.array([150.0, 150.0, 150.0]),
        mission_radius=100.0,
        n_destinations=16,
        carrier_frequency=2.0,
        window_size=100,
        rng_seed=rng_seed,
    )


def spherical_point(
    start: np.ndarray, radius: float, azimuth: float, elevation: float
) -> np.ndarray:
    """Point at the given distance and angles from start (angles in radians)."""
    start = _as_vec3(start)
    return start + radius * np.array(
        [
            math.cos(elevation) * math.cos(azimuth),
            math.cos(elevation) * math.sin(azimuth),
            math.sin(elevation),
        ]
    )


def destination_layout(start: np.ndarray, radius: float, n: int) -> list[np.ndarray]:
    """n destinations at exactly `radius` from start, evenly spread in angle.

    n == 1 places a single point at zero azimuth / zero elevation. Even n
    uses n/2 azimuths times two elevation rings at +/-ELEVATION_SPREAD_DEG.
    """
    if n == 1:
        angles = [(0.0, 0.0)]
    elif n >= 2 and n % 2 == 0:
        el = math.radians(ELEVATION_SPREAD_DEG)
        azimuths = [2.0 * math.pi * k / (n // 2) for k in range(n // 2)]
        angles = [(az, e) for az in azimuths for e in (el, -el)]
    else:
        raise ValueError(f"cannot lay out {n} destinations on two elevation rings")
    points = [spherical_point(start, radius, az, el) for az, el in angles]
    for p in points:
        if p[2] <= 0:
            raise ValueError("destination altitude would be <= 0")
    return points


def destination_grid(config: ScenarioConfig) -> list[np.ndarray]:
    """The config's destination set; index 0 is the planned (real) one."""
    return destination_layout(config.start, config.mission_radius, config.n_destinations)


def flight_to(config: ScenarioConfig, destination: np.ndarray) -> Trajectory:
    return Trajectory(
        waypoints=(
            Waypoint(config.start, 0.0),
            Waypoint(destination, config.flight_duration),
        ),
        sample_period=config.sample_period,
    )


def build_scenarios(config: ScenarioConfig) -> list[SpoofingScenario]:
    """One flight per destination (reported destination is always #0), plus
    legitimate replicas with fresh noise seeds so classes come out balanced.
    """
    destinations = destination_grid(config)
    reported = flight_to(config, destinations[0])
    scenarios: list[SpoofingScenario] = []
    for i, dest in enumerate(destinations):
        scenarios.append(
            SpoofingScenario(
                true_trajectory=flight_to(config, dest),
                reported_trajectory=reported,
                label=i != 0,
                spoof_onset=0.0,
                noise_seed=i,
            )
        )
    # 1 legitimate vs n-1 spoofed so far: replicate the legitimate flight.
    n_spoofed = len(destinations) - 1
    for k in range(n_spoofed - 1):
        scenarios.append(
            SpoofingScenario(
                true_trajectory=reported,
                reported_trajectory=reported,
                label=False,
                spoof_onset=0.0,
                noise_seed=len(destinations) + k,
            )
        )
    return scenarios
