import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spoofbench.channel import (
    ChannelParams,
    PathLossSample,
    distance_3d,
    los_probability,
    los_shadow_sigma,
    measured_path_loss,
    sample_window,
    theoretical_path_loss,
    window_rng,
)
from spoofbench.scenario import (
    BaseStation,
    SpoofingScenario,
    Trajectory,
    Waypoint,
    build_scenarios,
    default_config,
)

PARAMS = ChannelParams(carrier_frequency=2.0, rng_seed=1)
QUIET = ChannelParams(
    carrier_frequency=2.0,
    los_shadow_formula=False,
    nlos_shadow_sigma=0.0,
    meas_noise_sigma=0.0,
    rng_seed=1,
)
BS1 = BaseStation(1, [0.0, 0.0, 35.0])
BS2 = BaseStation(2, [150.0, 150.0, 35.0])


def test_distance_3d():
    assert distance_3d([0, 0, 0], [0, 0, 0]) == 0.0
    assert distance_3d([150, 150, 150], [150, 150, 35]) == pytest.approx(115.0)
    assert distance_3d([150, 150, 150], [0, 0, 35]) == pytest.approx(241.29857024027308)


def test_los_probability_above_100m_is_one():
    assert los_probability(150.0, 0.0) == 1.0
    assert los_probability(150.0, 5000.0) == 1.0
    assert los_probability(100.1, 123.0) == 1.0


def test_los_probability_mid_heights():
    p = los_probability(50.0, 10.0)
    assert 0.0 <= p <= 1.0
    # close range, 50 m up: inside the always-LoS radius of the height rule
    assert p == 1.0
    # far away at low altitude the link should usually be obstructed
    assert los_probability(30.0, 5000.0) < 0.5


@settings(max_examples=200)
@given(
    h=st.floats(min_value=0.1, max_value=300.0),
    d=st.floats(min_value=0.0, max_value=10_000.0),
)
def test_los_probability_is_a_probability(h, d):
    assert 0.0 <= los_probability(h, d) <= 1.0


def test_theoretical_path_loss_frozen_values():
    # start position against the station right underneath (d3d = 115 m)
    assert theoretical_path_loss([150, 150, 150], BS2, PARAMS) == pytest.approx(
        79.35595240105908, rel=1e-12
    )
    # start position against the corner station (d3d = sqrt(58225) m)
    assert theoretical_path_loss([150, 150, 150], BS1, PARAMS) == pytest.approx(
        86.43680438255353, rel=1e-12
    )


def test_doubling_frequency_adds_6db():
    four = ChannelParams(carrier_frequency=4.0)
    gain = theoretical_path_loss([150, 150, 150], BS1, four) - theoretical_path_loss(
        [150, 150, 150], BS1, PARAMS
    )
    assert gain == pytest.approx(20.0 * math.log10(2.0), rel=1e-12)


def test_nlos_branch_value():
    # 30 m up, 5 km out: obstructed. Hand evaluation of the NLoS expression.
    uav = [5000.0, 0.0, 30.0]
    d3d = math.dist(uav, [0.0, 0.0, 35.0])
    expected = (
        -17.5
        + (46.0 - 7.0 * math.log10(30.0)) * math.log10(d3d)
        + 20.0 * math.log10(40.0 * math.pi * 2.0 / 3.0)
    )
    assert theoretical_path_loss(uav, BS1, PARAMS) == pytest.approx(expected, rel=1e-12)


def test_zero_distance_rejected():
    with pytest.raises(ValueError):
        theoretical_path_loss([0.0, 0.0, 35.0], BS1, PARAMS)


@settings(max_examples=100)
@given(
    d_near=st.floats(min_value=10.0, max_value=4000.0),
    factor=st.floats(min_value=1.001, max_value=10.0),
)
def test_path_loss_increases_with_distance_in_los(d_near, factor):
    # fly level at 150 m (always LoS) and move horizontally outward
    h = 150.0
    bs = BaseStation(1, [0.0, 0.0, 35.0])
    horiz = lambda d3d: math.sqrt(d3d**2 - (h - 35.0) ** 2)
    d_far = d_near * factor
    near = theoretical_path_loss([horiz(d_near + 200), 0, h], bs, PARAMS)
    far = theoretical_path_loss([horiz(d_far + 200), 0, h], bs, PARAMS)
    assert far > near


@settings(max_examples=100)
@given(
    shift=st.tuples(
        st.floats(min_value=-1e4, max_value=1e4),
        st.floats(min_value=-1e4, max_value=1e4),
        st.floats(min_value=-20.0, max_value=100.0),
    )
)
def test_path_loss_translation_invariant(shift):
    uav = np.array([150.0, 150.0, 150.0])
    c = np.array(shift)
    moved_bs = BaseStation(1, BS1.position + c)
    assert theoretical_path_loss(uav + c, moved_bs, PARAMS) == pytest.approx(
        theoretical_path_loss(uav, BS1, PARAMS), rel=1e-9
    )


def test_los_shadow_sigma_at_150m():
    assert los_shadow_sigma(150.0) == pytest.approx(1.724115846342292, rel=1e-12)


def test_measured_equals_theoretical_without_noise():
    rng = np.random.default_rng(0)
    uav = [150.0, 150.0, 150.0]
    assert measured_path_loss(uav, BS1, QUIET, rng) == theoretical_path_loss(
        uav, BS1, QUIET
    )


def test_measured_noise_is_zero_mean():
    uav = [150.0, 150.0, 150.0]
    rng = np.random.default_rng(1234)
    n = 100_000
    pl = theoretical_path_loss(uav, BS1, PARAMS)
    draws = np.array([measured_path_loss(uav, BS1, PARAMS, rng) - pl for k in range(n)])
    sigma = math.hypot(los_shadow_sigma(150.0), PARAMS.meas_noise_sigma)
    assert abs(draws.mean()) <= 3.0 * sigma / math.sqrt(n)
    assert draws.std() == pytest.approx(sigma, rel=0.02)


def _scenarios():
    return build_scenarios(default_config())


def test_sample_window_length_and_alignment():
    legit = _scenarios()[0]
    window = sample_window(legit, BS1, PARAMS, 100)
    assert len(window) == 100
    assert [s.t for s in window] == list(range(100))
    assert all(s.bs_id == 1 for s in window)


def test_sample_window_legitimate_zero_noise_is_exact():
    legit = _scenarios()[0]
    window = sample_window(legit, BS1, QUIET, 100)
    assert all(s.measured_db == s.theoretical_db for s in window)


def test_sample_window_spoofed_zero_noise_diverges():
    spoofed = _scenarios()[1]
    window = sample_window(spoofed, BS1, QUIET, 100)
    assert any(s.measured_db != s.theoretical_db for s in window)


def test_sample_window_seeded_determinism():
    spoofed = _scenarios()[2]
    a = sample_window(spoofed, BS1, PARAMS, 100)
    b = sample_window(spoofed, BS1, PARAMS, 100)
    assert a == b
    other_seed = ChannelParams(carrier_frequency=2.0, rng_seed=2)
    c = sample_window(spoofed, BS1, other_seed, 100)
    assert any(x.measured_db != y.measured_db for x, y in zip(a, c))


def test_sample_window_streams_differ_across_stations_and_flights():
    s = _scenarios()
    w1 = sample_window(s[0], BS1, PARAMS, 100)
    w2 = sample_window(s[0], BS2, PARAMS, 100)
    assert any(a.measured_db - a.theoretical_db != b.measured_db - b.theoretical_db
               for a, b in zip(w1, w2))
    w3 = sample_window(s[16], BS1, PARAMS, 100)  # legitimate replica, fresh seed
    assert any(a.measured_db != b.measured_db for a, b in zip(w1, w3))


def test_sample_window_rejects_short_trajectory():
    with pytest.raises(ValueError, match="too short"):
        sample_window(_scenarios()[0], BS1, PARAMS, 102)


def test_sampled_los_mode_is_deterministic():
    low = Trajectory(
        waypoints=(Waypoint([2000.0, 0.0, 60.0], 0.0), Waypoint([2100.0, 0.0, 60.0], 100.0)),
        sample_period=1.0,
    )
    scenario = SpoofingScenario(low, low, label=False)
    params = ChannelParams(carrier_frequency=2.0, rng_seed=3, sampled_los=True)
    a = sample_window(scenario, BS1, params, 100)
    assert a == sample_window(scenario, BS1, params, 100)


def test_path_loss_sample_requires_finite_values():
    with pytest.raises(ValueError):
        PathLossSample(1, 0, float("nan"), 80.0)


def test_window_rng_is_stable_derivation():
    a = window_rng(PARAMS, 7, 1).normal(size=3)
    b = window_rng(PARAMS, 7, 1).normal(size=3)
    c = window_rng(PARAMS, 8, 1).normal(size=3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
