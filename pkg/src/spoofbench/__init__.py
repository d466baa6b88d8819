"""Workbench for cellular-assisted GPS spoofing detection on UAVs:
flight simulation, path-loss synthesis, statistical features and MLP
detectors, reproducible end to end from a single seed."""

from .baseline import OperatingPoint, ThresholdDetector, decide, sweep_threshold
from .channel import (
    ChannelParams,
    PathLossSample,
    distance_3d,
    los_probability,
    measured_path_loss,
    sample_window,
    theoretical_path_loss,
)
from .dataset import DatasetSpec, LabeledDataset, generate, select_bs_subset, spec_hash
from .features import (
    DeltaSeries,
    FeatureVector,
    box,
    delta_series,
    extract,
    mvsk,
    wasserstein_1d,
)
from .mlp import (
    MlpArchitecture,
    MlpModel,
    TrainConfig,
    accuracy,
    backprop_gradients,
    forward,
    forward_batch,
    loss_mse,
    train,
    tune,
)
from .scenario import (
    BaseStation,
    ScenarioConfig,
    SpoofingScenario,
    Trajectory,
    Waypoint,
    build_scenarios,
    default_config,
    destination_grid,
    position_at,
)

__version__ = "0.1.0"
