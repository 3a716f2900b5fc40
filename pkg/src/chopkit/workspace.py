"""Reachability sampling and the synthetic positioning-error model.

The validated workspace box spans +/-40 mm in X and Y and the 35 mm linear
travel in Z.  Commanded Z is referenced so that the zero pose (tip straight
down, travel 0) sits at z = l_c + z_offset, so the default band is
[l_c + z_offset, l_c + z_offset + 35].

The error model is synthetic: the real drive train's slop is not published,
so simulate_observed perturbs each servo angle with a uniform deadband draw
and then applies a deterministic tilt droop (the loaded gear flank settling
under the tilt-proportional gravity moment).  The droop gain is a fitted
quantity -- scaled off the deadband so that a 0.25 deg deadband lands the
mean error near the published 2.93 mm scale -- and error grows with radial
distance the way the hardware's does.  Reports must label these numbers
synthetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import MechanismParams, PlatformCommand, TipPose
from .errors import ChopkitError
from .geometry import SphericalDir
from .kinematics import inverse_kinematics, solve_tilt, tip_pose_from_tilt
from .validation import PosePairRecord

VALIDATION_XY_HALF = 40.0  # mm, per-axis half width of the validated box
DROOP_PER_DEG = 0.32       # fitted tilt-droop gain per degree of deadband

Box = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class WorkspaceSample:
    target: TipPose
    reachable: bool
    failure: Optional[str] = None  # error kind when not reachable

    def __post_init__(self):
        if self.reachable == (self.failure is not None):
            raise ValueError("exactly one of reachable / failure must hold")


@dataclass(frozen=True)
class BacklashModel:
    """Synthetic drive-train slop for one platform.

    epsilon_servo  uniform deadband half-width per rotary servo, degrees
    droop_gain     deterministic tilt droop (phi multiplier - 1); None means
                   the fitted default DROOP_PER_DEG * epsilon_servo
    epsilon_linear uniform travel play half-width, mm (off by default)
    """

    epsilon_servo: float = 0.25
    droop_gain: Optional[float] = None
    epsilon_linear: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.epsilon_servo < 0.0:
            raise ValueError("epsilon_servo must be >= 0")
        if self.epsilon_linear < 0.0:
            raise ValueError("epsilon_linear must be >= 0")

    @property
    def effective_droop(self) -> float:
        if self.droop_gain is not None:
            return self.droop_gain
        return DROOP_PER_DEG * self.epsilon_servo


def default_box(params: MechanismParams) -> Box:
    """The validated sampling box in the platform frame."""
    z0 = params.l_c + params.z_offset + params.linear_travel[0]
    z1 = params.l_c + params.z_offset + params.linear_travel[1]
    return (
        (-VALIDATION_XY_HALF, VALIDATION_XY_HALF),
        (-VALIDATION_XY_HALF, VALIDATION_XY_HALF),
        (z0, z1),
    )


def sample_workspace(
    params: MechanismParams,
    n: int,
    box: Optional[Box] = None,
    seed: int = 0,
) -> list[WorkspaceSample]:
    """Classify n seeded uniform targets in the box by running IK."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    box = box if box is not None else default_box(params)
    for lo, hi in box:
        if not hi > lo:
            raise ValueError(f"degenerate box interval [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    lows = np.array([b[0] for b in box])
    highs = np.array([b[1] for b in box])
    draws = rng.uniform(lows, highs, size=(n, 3))
    samples = []
    for x, y, z in draws:
        target = TipPose(float(x), float(y), float(z))
        try:
            inverse_kinematics(params, target)
        except ChopkitError as exc:
            samples.append(WorkspaceSample(target, False, type(exc).__name__))
        else:
            samples.append(WorkspaceSample(target, True))
    return samples


def reachable_points(samples: list[WorkspaceSample]) -> np.ndarray:
    return np.array([s.target.as_tuple() for s in samples if s.reachable])


def write_samples_csv(samples: list[WorkspaceSample], path) -> None:
    """Sample CSV schema: x,y,z,reachable,failure."""
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z", "reachable", "failure"])
        for s in samples:
            writer.writerow([f"{s.target.x:.17g}", f"{s.target.y:.17g}",
                             f"{s.target.z:.17g}",
                             "1" if s.reachable else "0", s.failure or ""])


def read_samples_csv(path) -> list[WorkspaceSample]:
    import csv

    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            reachable = row["reachable"] == "1"
            out.append(WorkspaceSample(
                target=TipPose(float(row["x"]), float(row["y"]), float(row["z"])),
                reachable=reachable,
                failure=(row.get("failure") or None) if not reachable else None,
            ))
    return out


def simulate_observed(
    params: MechanismParams,
    targets: list[TipPose],
    model: BacklashModel,
) -> list[PosePairRecord]:
    """Commanded/observed pose pairs under the synthetic slop model.

    Per target: solve IK, offset both horn angles by independent uniform
    deadband draws, re-solve the closure for the perturbed command, then
    droop the realized tilt.  IK/FK failures propagate (targets are
    expected to be reachable).
    """
    rng = np.random.default_rng(model.seed)
    eps = model.epsilon_servo
    droop = model.effective_droop
    pairs = []
    for target in targets:
        sol = inverse_kinematics(params, target)
        cmd = sol.command
        u = rng.uniform(-1.0, 1.0, size=3)
        observed_cmd = PlatformCommand(
            delta_p=cmd.delta_p + eps * u[0],
            delta_y=cmd.delta_y + eps * u[1],
            d_p=cmd.d_p + model.epsilon_linear * u[2],
        )
        tilt = solve_tilt(params, observed_cmd)
        drooped = SphericalDir(tilt.phi * (1.0 + droop), tilt.psi)
        observed = tip_pose_from_tilt(params, drooped, observed_cmd.d_p)
        pairs.append(PosePairRecord(commanded=target, observed=observed))
    return pairs
