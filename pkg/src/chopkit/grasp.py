"""Dual-platform pinch planning, trial trajectories, and slip prediction.

The host arm is abstracted as a pose carrier: a trial trajectory is a timed
sequence of end-effector frames, and the per-platform chopstick commands
stay constant once the pinch closes (the grip is held rigid while the arm
moves).  World frame: origin midway between the platforms, grasp axis X,
vertical Z.

Slip prediction is an analytic point-contact Coulomb check with two
contacts: available tangential capacity 2 * mu * grip_force against the
worst-case phase load m * (g + |a_peak|), with gravity re-oriented across
rotation sweeps.  Torsional slip about the contact normal is ignored.  The
trial protocol mirrors the benchmark: lift 250 mm, translate 200 mm at
0.2 m/s for three cycles, 90 deg rotations about Y and Z at the lift apex.

Food item parameters are user-supplied estimates; the bundled fixture's
friction and stiffness columns are synthetic plausible values, not
measurements.  Fixture CSV schema:

    name,mass_g,L,W,H,mu,k
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .config import DualConfig, TipPose
from .errors import (
    ChopkitError,
    InfeasibleProfile,
    ObjectTooWide,
    UnreachablePinch,
)
from .kinematics import inverse_kinematics

GRAVITY_MM_S2 = 9810.0
DEFAULT_GRIP_FORCE_N = 2.0
DEFAULT_ROTATE_SPEED_DEG_S = 45.0
DEFAULT_ROTATE_ACCEL_DEG_S2 = 180.0


@dataclass(frozen=True)
class FoodItem:
    name: str
    mass_g: float
    dims: tuple[float, float, float]  # (L, W, H) mm; W is the grasp width
    mu: float                         # friction coefficient at the silicone tip
    stiffness: float                  # contact stiffness, N/mm

    def __post_init__(self):
        if not self.mass_g > 0:
            raise ValueError(f"{self.name}: mass must be > 0")
        if not all(d > 0 for d in self.dims):
            raise ValueError(f"{self.name}: dims must be > 0")
        if not self.mu > 0:
            raise ValueError(f"{self.name}: mu must be > 0")
        if not self.stiffness > 0:
            raise ValueError(f"{self.name}: stiffness must be > 0")

    @property
    def width(self) -> float:
        return self.dims[1]


@dataclass(frozen=True)
class PinchPlan:
    left_tip: TipPose          # left platform frame
    right_tip: TipPose         # right platform frame
    grip_force: float          # N
    approach_axis: tuple[float, float, float]  # world-frame grasp axis
    separation: float          # commanded tip separation, mm


def plan_pinch(
    config: DualConfig,
    object_center,
    width: float,
    grip_force: float,
    stiffness: float,
) -> PinchPlan:
    """Symmetric two-tip pinch about an object center (world frame).

    Tips close to width/2 - grip_force/stiffness on each side (linear
    contact) along the world X grasp axis; both tip targets are verified
    reachable by per-platform IK.
    """
    if grip_force < 0:
        raise ValueError("grip_force must be >= 0")
    if not stiffness > 0:
        raise ValueError("stiffness must be > 0")
    if width >= config.baseline:
        raise ObjectTooWide(
            f"object width {width} mm >= platform baseline {config.baseline} mm")
    penetration = grip_force / stiffness
    half_sep = width / 2.0 - penetration
    if half_sep < 0:
        raise UnreachablePinch(
            f"grip penetration {penetration:.3f} mm exceeds half width {width / 2:.3f} mm")
    cx, cy, cz = object_center
    tips_world = {
        "left": (cx - half_sep, cy, cz),
        "right": (cx + half_sep, cy, cz),
    }
    tips_platform = {}
    for side, world in tips_world.items():
        local = config.world_to_platform(side, world)
        pose = TipPose(*local)
        params = config.left if side == "left" else config.right
        try:
            inverse_kinematics(params, pose)
        except ChopkitError as exc:
            raise UnreachablePinch(
                f"{side} tip {local} unreachable: {exc}",
                platform=side, cause=exc) from exc
        tips_platform[side] = pose
    return PinchPlan(
        left_tip=tips_platform["left"],
        right_tip=tips_platform["right"],
        grip_force=grip_force,
        approach_axis=(1.0, 0.0, 0.0),
        separation=2.0 * half_sep,
    )


# --- trajectory ---------------------------------------------------------------

@dataclass(frozen=True)
class TrapezoidProfile:
    """Trapezoidal speed profile over a fixed path length.

    Degenerates to a triangular profile when the acceleration cannot reach
    the requested peak within half the distance.
    """

    distance: float  # mm (or degrees for rotations)
    peak: float      # mm/s (or deg/s)
    accel: float     # mm/s^2 (or deg/s^2)

    def __post_init__(self):
        if not (self.distance >= 0 and self.peak > 0 and self.accel > 0):
            raise InfeasibleProfile(
                f"profile needs distance >= 0, peak > 0, accel > 0; got "
                f"d={self.distance}, v={self.peak}, a={self.accel}")

    @property
    def actual_peak(self) -> float:
        return min(self.peak, math.sqrt(self.distance * self.accel))

    @property
    def ramp_time(self) -> float:
        return self.actual_peak / self.accel

    @property
    def cruise_time(self) -> float:
        ramp_dist = self.actual_peak * self.ramp_time
        return (self.distance - ramp_dist) / self.actual_peak if self.actual_peak > 0 else 0.0

    @property
    def duration(self) -> float:
        return 2.0 * self.ramp_time + self.cruise_time

    def breakpoints(self) -> tuple[float, ...]:
        return (0.0, self.ramp_time, self.ramp_time + self.cruise_time, self.duration)

    def speed(self, t: float) -> float:
        t = min(max(t, 0.0), self.duration)
        if t < self.ramp_time:
            return self.accel * t
        if t <= self.ramp_time + self.cruise_time:
            return self.actual_peak
        return max(self.accel * (self.duration - t), 0.0)

    def position(self, t: float) -> float:
        t = min(max(t, 0.0), self.duration)
        tr, tc, v = self.ramp_time, self.cruise_time, self.actual_peak
        if t < tr:
            return 0.5 * self.accel * t * t
        if t <= tr + tc:
            return 0.5 * v * tr + v * (t - tr)
        td = t - tr - tc
        return 0.5 * v * tr + v * tc + v * td - 0.5 * self.accel * td * td


@dataclass(frozen=True)
class TrajectorySegment:
    phase: str                 # grasp | lift | translate | rotate
    t0: float
    t1: float
    kind: str                  # dwell | line | rotate
    direction: tuple[float, float, float] = (0.0, 0.0, 0.0)  # unit, line only
    axis: Optional[str] = None                                # rotate only
    profile: Optional[TrapezoidProfile] = None
    start_position: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def position(self, t: float):
        p = np.array(self.start_position)
        if self.kind == "line" and self.profile is not None:
            p = p + np.array(self.direction) * self.profile.position(t - self.t0)
        return p

    def angle(self, t: float) -> float:
        if self.kind == "rotate" and self.profile is not None:
            return self.profile.position(t - self.t0)
        return 0.0


@dataclass(frozen=True)
class Waypoint:
    t: float
    position: tuple[float, float, float]  # mm
    axis: Optional[str]                   # active rotation axis, if any
    angle_deg: float


@dataclass(frozen=True)
class TrialTrajectory:
    segments: tuple[TrajectorySegment, ...]

    @property
    def duration(self) -> float:
        return self.segments[-1].t1

    @property
    def phases(self) -> list[tuple[str, float, float]]:
        return [(s.phase, s.t0, s.t1) for s in self.segments]

    def waypoints(self, dt: float = 0.01) -> list[Waypoint]:
        """Sample poses at dt, always including segment boundaries."""
        points = []
        for seg in self.segments:
            times = list(np.arange(seg.t0, seg.t1, dt))
            if not times or times[-1] < seg.t1:
                times.append(seg.t1)
            if seg.profile is not None:
                times.extend(seg.t0 + b for b in seg.profile.breakpoints())
            for t in sorted(set(round(t, 9) for t in times)):
                pos = tuple(float(v) for v in seg.position(t))
                points.append(Waypoint(t, pos, seg.axis, seg.angle(t)))
        points.sort(key=lambda w: w.t)
        out = [points[0]]
        for w in points[1:]:
            if w.t > out[-1].t:
                out.append(w)
        return out


def build_trial_trajectory(
    lift_mm: float = 250.0,
    translate_mm: float = 200.0,
    speed_m_s: float = 0.2,
    cycles: int = 3,
    rotations: tuple[tuple[str, float], ...] = (("y", 90.0), ("z", 90.0)),
    accel: float = 1.0,           # m/s^2
    grasp_dwell_s: float = 0.5,
    rotate_speed_deg_s: float = DEFAULT_ROTATE_SPEED_DEG_S,
    rotate_accel_deg_s2: float = DEFAULT_ROTATE_ACCEL_DEG_S2,
) -> TrialTrajectory:
    """The grasp-trial protocol as a timed end-effector trajectory.

    grasp dwell -> lift -> rotations at the apex -> back-and-forth
    translation cycles.  Translation peaks at exactly speed_m_s and each
    one-way segment integrates to exactly translate_mm.
    """
    if lift_mm <= 0 or translate_mm <= 0 or speed_m_s <= 0 or accel <= 0:
        raise InfeasibleProfile("lift, translation, speed, and accel must be positive")
    if cycles < 0:
        raise InfeasibleProfile("cycles must be >= 0")
    speed = speed_m_s * 1000.0
    accel_mm = accel * 1000.0
    segments = []
    t = 0.0
    position = np.zeros(3)

    segments.append(TrajectorySegment("grasp", t, t + grasp_dwell_s, "dwell",
                                      start_position=tuple(position)))
    t += grasp_dwell_s

    lift_profile = TrapezoidProfile(lift_mm, speed, accel_mm)
    segments.append(TrajectorySegment("lift", t, t + lift_profile.duration, "line",
                                      direction=(0.0, 0.0, 1.0), profile=lift_profile,
                                      start_position=tuple(position)))
    t += lift_profile.duration
    position = position + np.array([0.0, 0.0, lift_mm])

    for axis, angle in rotations:
        rot_profile = TrapezoidProfile(angle, rotate_speed_deg_s, rotate_accel_deg_s2)
        segments.append(TrajectorySegment("rotate", t, t + rot_profile.duration,
                                          "rotate", axis=axis, profile=rot_profile,
                                          start_position=tuple(position)))
        t += rot_profile.duration

    direction = 1.0
    for _ in range(2 * cycles):
        profile = TrapezoidProfile(translate_mm, speed, accel_mm)
        segments.append(TrajectorySegment("translate", t, t + profile.duration, "line",
                                          direction=(0.0, direction, 0.0),
                                          profile=profile,
                                          start_position=tuple(position)))
        t += profile.duration
        position = position + np.array([0.0, direction * translate_mm, 0.0])
        direction = -direction

    return TrialTrajectory(segments=tuple(segments))


# --- slip prediction ----------------------------------------------------------

_ROT = {
    "x": lambda c, s: np.array([[1, 0, 0], [0, c, -s], [0, s, c]]),
    "y": lambda c, s: np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]]),
    "z": lambda c, s: np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]),
}


@dataclass(frozen=True)
class PhaseVerdict:
    phase: str
    hold: bool
    required_n: float
    available_n: float

    @property
    def margin_n(self) -> float:
        return self.available_n - self.required_n


def predict_slip(
    item: FoodItem,
    plan: PinchPlan,
    trajectory: TrialTrajectory,
    g_mm_s2: float = GRAVITY_MM_S2,
) -> list[PhaseVerdict]:
    """Hold/slip verdict per trajectory segment.

    Tangential capacity is 2 * mu * grip_force; the load is the worst-case
    m * (g + |a_peak|) for transport phases and the worst gravity component
    perpendicular to the grasp axis across rotation sweeps (1 deg steps).
    """
    mass_kg = item.mass_g / 1000.0
    g = g_mm_s2 / 1000.0  # m/s^2
    available = 2.0 * item.mu * plan.grip_force
    axis0 = np.array(plan.approach_axis, dtype=float)
    gravity_dir = np.array([0.0, 0.0, -1.0])

    verdicts = []
    for seg in trajectory.segments:
        if seg.kind == "rotate":
            worst = 0.0
            total = seg.profile.distance if seg.profile else 0.0
            rot = _ROT[seg.axis]
            for step in range(int(round(total)) + 1):
                theta = math.radians(min(step, total))
                axis = rot(math.cos(theta), math.sin(theta)) @ axis0
                tangential = math.sqrt(max(1.0 - float(gravity_dir @ axis) ** 2, 0.0))
                worst = max(worst, tangential)
            required = mass_kg * g * worst
        elif seg.kind == "line":
            a_peak = (seg.profile.accel if seg.profile else 0.0) / 1000.0
            required = mass_kg * (g + abs(a_peak))
        else:  # dwell
            required = mass_kg * g
        verdicts.append(PhaseVerdict(seg.phase, available >= required,
                                     required, available))
    return verdicts


# --- trial suite --------------------------------------------------------------

@dataclass(frozen=True)
class TrialRow:
    name: str
    mass_g: float
    dims: tuple[float, float, float]
    rotation_hold: Optional[bool]
    translation_hold: Optional[bool]
    limiting_phase: Optional[str]
    margin_n: Optional[float]
    error: Optional[str] = None


def run_trial_suite(
    config: DualConfig,
    items: list[FoodItem],
    grip_force: float | dict[str, float] = DEFAULT_GRIP_FORCE_N,
    trajectory: Optional[TrialTrajectory] = None,
    grasp_height: Optional[float] = None,
) -> list[TrialRow]:
    """Plan, predict, and tabulate one trial per item; failures don't abort."""
    trajectory = trajectory if trajectory is not None else build_trial_trajectory()
    rows = []
    for item in items:
        force = grip_force.get(item.name, DEFAULT_GRIP_FORCE_N) \
            if isinstance(grip_force, dict) else grip_force
        z = grasp_height
        if z is None:
            params = config.left
            z = params.l_c + params.z_offset + sum(params.linear_travel) / 2.0
        try:
            plan = plan_pinch(config, (0.0, 0.0, z), item.width, force, item.stiffness)
            verdicts = predict_slip(item, plan, trajectory)
        except ChopkitError as exc:
            rows.append(TrialRow(item.name, item.mass_g, item.dims,
                                 None, None, None, None,
                                 error=f"{type(exc).__name__}: {exc}"))
            continue
        transport = [v for v in verdicts if v.phase in ("grasp", "lift")]
        rotation = transport + [v for v in verdicts if v.phase == "rotate"]
        translation = transport + [v for v in verdicts if v.phase == "translate"]
        limiting = min(verdicts, key=lambda v: v.margin_n)
        rows.append(TrialRow(
            name=item.name, mass_g=item.mass_g, dims=item.dims,
            rotation_hold=all(v.hold for v in rotation),
            translation_hold=all(v.hold for v in translation),
            limiting_phase=limiting.phase,
            margin_n=limiting.margin_n,
        ))
    return rows


def render_trial_report(rows: list[TrialRow], format: str = "csv") -> str:
    """Serialize trial rows as CSV or JSON."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["name", "mass_g", "L", "W", "H", "rot", "lin",
                         "limiting_phase", "margin_n", "error"])
        for r in rows:
            flag = lambda v: "" if v is None else ("Y" if v else "N")
            writer.writerow([
                r.name, r.mass_g, r.dims[0], r.dims[1], r.dims[2],
                flag(r.rotation_hold), flag(r.translation_hold),
                r.limiting_phase or "",
                "" if r.margin_n is None else f"{r.margin_n:.6g}",
                r.error or "",
            ])
        return buf.getvalue()
    if format == "json":
        docs = []
        for r in rows:
            docs.append({
                "name": r.name, "mass_g": r.mass_g,
                "dims": list(r.dims),
                "rot": r.rotation_hold, "lin": r.translation_hold,
                "limiting_phase": r.limiting_phase,
                "margin_n": r.margin_n, "error": r.error,
            })
        return json.dumps(docs, indent=2) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def load_food_items(path=None) -> list[FoodItem]:
    """Load a food-item fixture CSV; defaults to the bundled synthetic set."""
    if path is None:
        ref = resources.files("chopkit.data").joinpath("food_items_synthetic.csv")
        text = ref.read_text(encoding="utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    items = []
    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        items.append(FoodItem(
            name=row["name"],
            mass_g=float(row["mass_g"]),
            dims=(float(row["L"]), float(row["W"]), float(row["H"])),
            mu=float(row["mu"]),
            stiffness=float(row["k"]),
        ))
    return items
