"""Reading and writing the human-editable scenario config file.

One JSON document holds both the scene geometry and the channel noise
settings, under fixed keys:

    base_stations, start, mission_radius_m, n_destinations,
    carrier_frequency_ghz, window_size, rng_seed, sample_period_s,
    nlos_shadow_sigma_db, los_shadow_formula, meas_noise_sigma_db,
    sampled_los
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import ChannelParams
from .scenario import BaseStation, ScenarioConfig


class ConfigError(ValueError):
    """Malformed or incomplete config file."""


def config_to_dict(config: ScenarioConfig, channel: ChannelParams) -> dict:
    return {
        "base_stations": [
            {"id": bs.id, "x": bs.position[0], "y": bs.position[1], "h": bs.position[2]}
            for bs in config.base_stations
        ],
        "start": list(config.start),
        "mission_radius_m": config.mission_radius,
        "n_destinations": config.n_destinations,
        "carrier_frequency_ghz": config.carrier_frequency,
        "window_size": config.window_size,
        "rng_seed": config.rng_seed,
        "sample_period_s": config.sample_period,
        "nlos_shadow_sigma_db": channel.nlos_shadow_sigma,
        "los_shadow_formula": channel.los_shadow_formula,
        "meas_noise_sigma_db": channel.meas_noise_sigma,
        "sampled_los": channel.sampled_los,
    }


def config_from_dict(doc: dict) -> tuple[ScenarioConfig, ChannelParams]:
    required = [
        "base_stations",
        "start",
        "mission_radius_m",
        "n_destinations",
        "carrier_frequency_ghz",
        "window_size",
        "rng_seed",
    ]
    missing = [k for k in required if k not in doc]
    if missing:
        raise ConfigError(f"config missing keys: {', '.join(missing)}")
    try:
        stations = tuple(
            BaseStation(int(b["id"]), np.array([float(b["x"]), float(b["y"]), float(b["h"])]))
            for b in doc["base_stations"]
        )
        config = ScenarioConfig(
            base_stations=stations,
            start=np.asarray(doc["start"], dtype=float),
            mission_radius=float(doc["mission_radius_m"]),
            n_destinations=int(doc["n_destinations"]),
            carrier_frequency=float(doc["carrier_frequency_ghz"]),
            window_size=int(doc["window_size"]),
            rng_seed=int(doc["rng_seed"]),
            sample_period=float(doc.get("sample_period_s", 1.0)),
        )
        channel = ChannelParams(
            carrier_frequency=config.carrier_frequency,
            los_shadow_formula=bool(doc.get("los_shadow_formula", True)),
            nlos_shadow_sigma=float(doc.get("nlos_shadow_sigma_db", 6.0)),
            meas_noise_sigma=float(doc.get("meas_noise_sigma_db", 0.5)),
            rng_seed=int(doc["rng_seed"]),
            sampled_los=bool(doc.get("sampled_los", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    return config, channel


def save_config(path, config: ScenarioConfig, channel: ChannelParams) -> None:
    Path(path).write_text(
        json.dumps(config_to_dict(config, channel), sort_keys=True, indent=2) + "\n"
    )


def load_config(path) -> tuple[ScenarioConfig, ChannelParams]:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return config_from_dict(doc)
