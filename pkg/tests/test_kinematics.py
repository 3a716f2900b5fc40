import math

import numpy as np
import pytest

from chopkit.config import MechanismParams, PlatformCommand, TipPose, default_params
from chopkit.errors import (
    LinkageInfeasible,
    MultipleBranches,
    NoConvergence,
    OutOfReach,
    RomViolated,
    TravelExceeded,
)
from chopkit.kinematics import (
    forward_kinematics,
    inverse_kinematics,
    solve_tilt,
    travel_to_servo_rotation,
)

from _oracles import axis_delta_oracle, fk_closed_form

PARAMS = default_params()
ZERO_Z = PARAMS.l_c + PARAMS.z_offset  # commanded z of the zero pose


def test_zero_pose_command_is_zero():
    sol = inverse_kinematics(PARAMS, TipPose(0.0, 0.0, ZERO_Z))
    assert sol.command.delta_p == pytest.approx(0.0, abs=1e-9)
    assert sol.command.delta_y == pytest.approx(0.0, abs=1e-9)
    assert sol.command.d_p == pytest.approx(0.0, abs=1e-12)
    assert sol.dir.phi == 0.0
    assert sol.dir.psi == 0.0


def test_reference_target_20_20():
    sol = inverse_kinematics(PARAMS, TipPose(20.0, 20.0, 175.0))
    assert math.degrees(sol.dir.psi) == pytest.approx(45.0, abs=1e-12)
    assert sol.z_calc == pytest.approx(math.sqrt(162.0**2 - 800.0), rel=1e-12)
    assert sol.z_calc == pytest.approx(159.511755, abs=1e-6)
    assert math.degrees(sol.dir.phi) == pytest.approx(10.055048, abs=1e-6)
    assert sol.command.d_p == pytest.approx(175.0 - sol.z_calc, rel=1e-12)


def test_out_of_reach():
    with pytest.raises(OutOfReach):
        inverse_kinematics(PARAMS, TipPose(165.0, 0.0, ZERO_Z))
    # boundary radius is also out of reach (stick would be horizontal)
    with pytest.raises(OutOfReach):
        inverse_kinematics(PARAMS, TipPose(162.0, 0.0, ZERO_Z))


def test_travel_exceeded():
    with pytest.raises(TravelExceeded):
        inverse_kinematics(PARAMS, TipPose(0.0, 0.0, ZERO_Z + 36.0))
    with pytest.raises(TravelExceeded):
        inverse_kinematics(PARAMS, TipPose(0.0, 0.0, ZERO_Z - 1.0))


def test_rom_violated_with_narrow_rom():
    narrow = MechanismParams(servo_rom=(-2.0, 2.0))
    with pytest.raises(RomViolated):
        inverse_kinematics(narrow, TipPose(30.0, 30.0, 190.0))


def test_linkage_infeasible_with_short_linkage():
    short = MechanismParams(l_j=5.0)
    with pytest.raises(LinkageInfeasible):
        inverse_kinematics(short, TipPose(0.0, 0.0, ZERO_Z))


def test_closed_form_matches_root_find_oracle():
    rng = np.random.default_rng(21)
    for _ in range(60):
        x, y = rng.uniform(-40, 40, 2)
        z = rng.uniform(ZERO_Z, ZERO_Z + 20.0)
        try:
            sol = inverse_kinematics(PARAMS, TipPose(x, y, z))
        except TravelExceeded:
            continue
        for axis, delta in (("pitch", sol.command.delta_p),
                            ("yaw", sol.command.delta_y)):
            oracle = axis_delta_oracle(PARAMS, sol.dir, axis)
            assert oracle is not None
            assert delta == pytest.approx(oracle, abs=1e-6)


def test_round_trip_identity():
    rng = np.random.default_rng(22)
    worst = 0.0
    for _ in range(200):
        x, y = rng.uniform(-40, 40, 2)
        z = rng.uniform(ZERO_Z, ZERO_Z + 35.0)
        try:
            sol = inverse_kinematics(PARAMS, TipPose(x, y, z))
        except TravelExceeded:
            continue
        pose = forward_kinematics(PARAMS, sol.command)
        worst = max(worst, math.dist(pose.as_tuple(), (x, y, z)))
    assert worst < 1e-6


def test_forward_zero_command():
    pose = forward_kinematics(PARAMS, PlatformCommand(0.0, 0.0, 0.0))
    assert pose.x == pytest.approx(0.0, abs=1e-9)
    assert pose.y == pytest.approx(0.0, abs=1e-9)
    assert pose.z == pytest.approx(ZERO_Z, abs=1e-9)


def test_forward_matches_linear_algebra_oracle():
    rng = np.random.default_rng(23)
    for _ in range(40):
        cmd = PlatformCommand(rng.uniform(-12, 12), rng.uniform(-12, 12),
                              rng.uniform(0, 35))
        tilt = solve_tilt(PARAMS, cmd)
        branches = fk_closed_form(PARAMS, cmd)
        in_window = [b for b in branches if math.degrees(b.phi) < 45.0]
        assert len(in_window) == 1
        assert tilt.phi == pytest.approx(in_window[0].phi, abs=1e-9)
        if tilt.phi > 1e-9:
            dpsi = (tilt.psi - in_window[0].psi + math.pi) % (2 * math.pi) - math.pi
            assert abs(dpsi) < 1e-9


def test_second_closure_branch_stays_outside_window():
    rng = np.random.default_rng(24)
    for _ in range(80):
        x, y = rng.uniform(-40, 40, 2)
        try:
            sol = inverse_kinematics(PARAMS, TipPose(x, y, ZERO_Z))
        except TravelExceeded:
            continue
        branches = fk_closed_form(PARAMS, sol.command)
        outside = [b for b in branches if math.degrees(b.phi) >= 45.0]
        assert len(outside) >= 1
        assert min(math.degrees(b.phi) for b in outside) > 55.0


def test_multiple_branches_reported_with_wide_window():
    with pytest.raises(MultipleBranches) as info:
        forward_kinematics(PARAMS, PlatformCommand(0.0, 0.0, 0.0), max_tilt_deg=80.0)
    assert len(info.value.solutions) >= 2


def test_no_convergence_for_impossible_command():
    with pytest.raises(NoConvergence) as info:
        forward_kinematics(PARAMS, PlatformCommand(90.0, -90.0, 0.0))
    assert info.value.residual is None or info.value.residual > 0


def test_forward_checks_command_bounds():
    with pytest.raises(RomViolated):
        forward_kinematics(PARAMS, PlatformCommand(120.0, 0.0, 0.0))
    with pytest.raises(TravelExceeded):
        forward_kinematics(PARAMS, PlatformCommand(0.0, 0.0, -1.0))


def test_continuity_of_commands():
    base = TipPose(25.0, -13.0, 180.0)
    sol0 = inverse_kinematics(PARAMS, base)
    for dx, dy in ((1e-3, 0.0), (0.0, 1e-3), (-1e-3, 1e-3)):
        sol1 = inverse_kinematics(PARAMS, TipPose(base.x + dx, base.y + dy, base.z))
        assert abs(sol1.command.delta_p - sol0.command.delta_p) < 0.01
        assert abs(sol1.command.delta_y - sol0.command.delta_y) < 0.01


def test_travel_affine_in_z_with_unit_slope():
    lo = inverse_kinematics(PARAMS, TipPose(10.0, 5.0, 170.0))
    hi = inverse_kinematics(PARAMS, TipPose(10.0, 5.0, 180.0))
    assert hi.command.d_p - lo.command.d_p == pytest.approx(10.0, abs=1e-12)
    assert hi.command.delta_p == lo.command.delta_p
    assert hi.command.delta_y == lo.command.delta_y


def test_axis_coupling_is_real_and_surfaced():
    # A pure +y target still requires a small yaw correction because the yaw
    # mount swings out of its servo plane; the per-axis construction handles
    # it exactly (closure residuals stay at numerical zero).
    sol = inverse_kinematics(PARAMS, TipPose(0.0, 28.0, 175.0))
    assert abs(sol.command.delta_y) > 0.1
    assert abs(sol.diagnostics["pitch"].residual_mm) < 1e-9
    assert abs(sol.diagnostics["yaw"].residual_mm) < 1e-9
    # Likewise pure pitch does not keep the tip exactly in the x = 0 plane.
    pose = forward_kinematics(PARAMS, PlatformCommand(5.0, 0.0, 10.0))
    oracle = [b for b in fk_closed_form(PARAMS, PlatformCommand(5.0, 0.0, 10.0))
              if math.degrees(b.phi) < 45.0][0]
    expected_x = PARAMS.l_c * math.sin(oracle.phi) * math.sin(oracle.psi)
    assert pose.x == pytest.approx(expected_x, abs=1e-6)
    assert 0.1 < abs(pose.x) < 2.0


def test_ik_diagnostics_shape():
    sol = inverse_kinematics(PARAMS, TipPose(12.0, -7.0, 172.0))
    for axis in ("pitch", "yaw"):
        diag = sol.diagnostics[axis]
        assert len(diag.points) == 2
        assert diag.chosen in diag.points
        assert abs(diag.residual_mm) < 1e-9


def test_travel_to_servo_rotation():
    assert travel_to_servo_rotation(PARAMS, 2.0) == pytest.approx(1.0)
    assert travel_to_servo_rotation(PARAMS, 35.0) == pytest.approx(17.5)
    with pytest.raises(TravelExceeded):
        travel_to_servo_rotation(PARAMS, 40.0)
