import math

import numpy as np
import pytest

from chopkit.config import TipPose, default_params
from chopkit.workspace import (
    BacklashModel,
    WorkspaceSample,
    default_box,
    read_samples_csv,
    reachable_points,
    sample_workspace,
    simulate_observed,
    write_samples_csv,
)

PARAMS = default_params()
ZERO_Z = PARAMS.l_c + PARAMS.z_offset


def test_default_box_spans_travel_band():
    (x0, x1), (y0, y1), (z0, z1) = default_box(PARAMS)
    assert (x0, x1) == (-40.0, 40.0)
    assert (y0, y1) == (-40.0, 40.0)
    assert z0 == ZERO_Z
    assert z1 - z0 == 35.0


def test_sampling_is_deterministic():
    a = sample_workspace(PARAMS, 50, seed=9)
    b = sample_workspace(PARAMS, 50, seed=9)
    assert a == b
    c = sample_workspace(PARAMS, 50, seed=10)
    assert a != c


def test_single_sample_zero_pose_box():
    tiny = ((-1e-9, 1e-9), (-1e-9, 1e-9), (ZERO_Z, ZERO_Z + 1e-9))
    samples = sample_workspace(PARAMS, 1, box=tiny, seed=0)
    assert samples[0].reachable


def test_far_box_unreachable_with_reason():
    far = ((199.0, 201.0), (-1.0, 1.0), (ZERO_Z, ZERO_Z + 1.0))
    samples = sample_workspace(PARAMS, 5, box=far, seed=0)
    assert all(not s.reachable and s.failure == "OutOfReach" for s in samples)


def test_default_box_mostly_reachable():
    samples = sample_workspace(PARAMS, 400, seed=1)
    frac = sum(s.reachable for s in samples) / len(samples)
    assert 0.75 < frac < 1.0
    # the unreachable remainder is the high-z / large-radius corner
    assert all(s.failure == "TravelExceeded" for s in samples if not s.reachable)


def test_sample_validation():
    with pytest.raises(ValueError):
        sample_workspace(PARAMS, 0)
    with pytest.raises(ValueError):
        sample_workspace(PARAMS, 5, box=((0, 0), (0, 1), (0, 1)))
    with pytest.raises(ValueError):
        WorkspaceSample(TipPose(0, 0, 0), True, "OutOfReach")


def test_zero_noise_reproduces_commands():
    targets = [TipPose(5.0, -3.0, 170.0), TipPose(-20.0, 10.0, 180.0)]
    pairs = simulate_observed(PARAMS, targets, BacklashModel(epsilon_servo=0.0, seed=4))
    for rec in pairs:
        assert rec.l2_error < 1e-6


def test_origin_error_bounded_by_cone():
    bound = PARAMS.l_c * math.sin(math.radians(2 * 0.25))
    model = BacklashModel(epsilon_servo=0.25, seed=5)
    targets = [TipPose(0.0, 0.0, ZERO_Z + 5.0)] * 50
    pairs = simulate_observed(PARAMS, targets, model)
    for rec in pairs:
        assert rec.l2_error <= bound


def test_error_grows_with_radius():
    samples = sample_workspace(PARAMS, 400, seed=6)
    targets = [s.target for s in samples if s.reachable]
    pairs = simulate_observed(PARAMS, targets, BacklashModel(seed=6))
    err = np.array([p.l2_error for p in pairs])
    rad = np.array([p.commanded_radius for p in pairs])
    assert np.corrcoef(rad, err)[0, 1] > 0.7
    near = err[rad < np.quantile(rad, 0.2)].mean()
    far = err[rad > np.quantile(rad, 0.8)].mean()
    assert near < far


def test_droop_defaults_scale_with_deadband():
    assert BacklashModel(epsilon_servo=0.0).effective_droop == 0.0
    assert BacklashModel(epsilon_servo=0.25).effective_droop == pytest.approx(0.08)
    assert BacklashModel(droop_gain=0.02).effective_droop == 0.02


def test_simulation_is_deterministic():
    targets = [TipPose(10.0, 4.0, 172.0), TipPose(-8.0, 2.0, 168.0)]
    a = simulate_observed(PARAMS, targets, BacklashModel(seed=7))
    b = simulate_observed(PARAMS, targets, BacklashModel(seed=7))
    assert a == b


def test_samples_csv_round_trip(tmp_path):
    samples = sample_workspace(PARAMS, 30, seed=8)
    path = tmp_path / "samples.csv"
    write_samples_csv(samples, path)
    again = read_samples_csv(path)
    assert again == samples
    pts = reachable_points(again)
    assert pts.shape[1] == 3
