"""Mechanism parameters, platform frames, and config loading.

Each chopstick platform is described by a MechanismParams record. All
coordinates live in the platform's spherical-joint frame:

  origin : center of the chopstick pivot ball joint
  +Z     : platform vertical (tip hangs toward -Z at the zero pose)
  pitch servo horn rotates in the plane x = 0, coordinates (y, z)
  yaw servo horn rotates in the plane y = 0, coordinates (x, z)

Units are millimeters and degrees throughout the config surface.

The default servo pivots place each horn pointing straight down (-Z) at the
zero pose with the horn tip exactly one linkage length from the matching
backend mount, so the assembly closes at zero tilt with both horn angles at
0 deg. The physical pivot offsets of the real hardware are not published;
these defaults are chosen so a default-built mechanism is assemblable and
calibrated at the zero pose. All of them are config-overridable.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field, asdict

import yaml

from .errors import ConfigError

# Table-driven geometric constants of the reference build (mm).
CHOPSTICK_LENGTH = 162.0
LINKAGE_LENGTH = 32.5
PITCH_HORN_LENGTH = 28.0
YAW_HORN_LENGTH = 32.0
LINEAR_TRAVEL_MM = 35.0
DEFAULT_BASELINE = 100.0
DEFAULT_LEADSCREW_LEAD = 2.0  # mm per revolution
DEFAULT_SERVO_ROM = (-90.0, 90.0)


@dataclass(frozen=True)
class TipPose:
    """Cartesian chopstick-tip position in the platform frame, mm."""

    x: float
    y: float
    z: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class PlatformCommand:
    """Servo-space command for one platform."""

    delta_p: float  # pitch horn angle, degrees
    delta_y: float  # yaw horn angle, degrees
    d_p: float      # platform linear travel, mm


@dataclass(frozen=True)
class MechanismParams:
    """All geometric constants of one chopstick platform."""

    l_c: float = CHOPSTICK_LENGTH          # chopstick length, pivot to tip
    l_j: float = LINKAGE_LENGTH            # ball-joint linkage length
    l_p: float = PITCH_HORN_LENGTH         # pitch horn length = pitch mount offset
    l_y: float = YAW_HORN_LENGTH           # yaw horn length = yaw mount offset
    z_offset: float = 0.0                  # commanded-Z origin shift
    pitch_pivot: tuple[float, float] = (-LINKAGE_LENGTH, 0.0)  # (y, z)
    yaw_pivot: tuple[float, float] = (-LINKAGE_LENGTH, 0.0)    # (x, z)
    servo_rom: tuple[float, float] = DEFAULT_SERVO_ROM         # degrees
    linear_travel: tuple[float, float] = (0.0, LINEAR_TRAVEL_MM)
    leadscrew_lead: float = DEFAULT_LEADSCREW_LEAD

    def __post_init__(self):
        object.__setattr__(self, "pitch_pivot", tuple(float(v) for v in self.pitch_pivot))
        object.__setattr__(self, "yaw_pivot", tuple(float(v) for v in self.yaw_pivot))
        object.__setattr__(self, "servo_rom", tuple(float(v) for v in self.servo_rom))
        object.__setattr__(self, "linear_travel", tuple(float(v) for v in self.linear_travel))
        self._validate()

    def _validate(self):
        for name in ("l_c", "l_j", "l_p", "l_y", "leadscrew_lead"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ConfigError(f"{name} must be strictly positive, got {value}")
        lo, hi = self.linear_travel
        if lo < 0.0:
            raise ConfigError(f"linear_travel lower bound must be >= 0, got {lo}")
        if not hi > lo:
            raise ConfigError(f"linear_travel must be a nonempty interval, got [{lo}, {hi}]")
        rlo, rhi = self.servo_rom
        if not (rlo < rhi and rlo <= 0.0 <= rhi):
            raise ConfigError(f"servo_rom must be a nonempty interval containing 0, got [{rlo}, {rhi}]")
        if len(self.pitch_pivot) != 2 or len(self.yaw_pivot) != 2:
            raise ConfigError("servo pivots must be 2D points")
        # Linkage must be able to span pivot-to-mount at the zero pose.
        if not self.l_j < self.l_p + math.hypot(*self.pitch_pivot):
            raise ConfigError(
                f"l_j={self.l_j} must be < l_p + |pitch_pivot| = "
                f"{self.l_p + math.hypot(*self.pitch_pivot)}")
        if not self.l_j < self.l_y + math.hypot(*self.yaw_pivot):
            raise ConfigError(
                f"l_j={self.l_j} must be < l_y + |yaw_pivot| = "
                f"{self.l_y + math.hypot(*self.yaw_pivot)}")

    def check_command(self, command: PlatformCommand) -> None:
        """Raise if a servo-space command violates the platform bounds."""
        from .errors import RomViolated, TravelExceeded

        rlo, rhi = self.servo_rom
        for name, value in (("delta_p", command.delta_p), ("delta_y", command.delta_y)):
            if not rlo <= value <= rhi:
                raise RomViolated(f"{name}={value:.6g} deg outside servo ROM [{rlo}, {rhi}]")
        tlo, thi = self.linear_travel
        if not tlo <= command.d_p <= thi:
            raise TravelExceeded(f"d_p={command.d_p:.6g} mm outside travel [{tlo}, {thi}]")


@dataclass(frozen=True)
class DualConfig:
    """Two platforms plus their relative placement.

    The dual (world) frame sits midway between the platform pivot axes with
    the grasp axis along X: the left platform origin is at x = -baseline/2,
    the right at +baseline/2.  With mirror=True the right platform's frame
    is reflected so +x points back toward the midplane on both sides.
    """

    left: MechanismParams = field(default_factory=MechanismParams)
    right: MechanismParams = field(default_factory=MechanismParams)
    baseline: float = DEFAULT_BASELINE  # separation of the pivot axes, mm
    mirror: bool = True

    def __post_init__(self):
        if not self.baseline > 0.0:
            raise ConfigError(f"baseline must be strictly positive, got {self.baseline}")

    def world_to_platform(self, side: str, point) -> tuple[float, float, float]:
        """Map a world-frame point into the named platform's frame."""
        x, y, z = point
        half = self.baseline / 2.0
        if side == "left":
            return (x + half, y, z)
        if side == "right":
            if self.mirror:
                return (half - x, y, z)
            return (x - half, y, z)
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def default_params() -> MechanismParams:
    """Reference-build parameters with all documented defaults."""
    return MechanismParams()


def default_dual_config() -> DualConfig:
    return DualConfig()


_PARAM_KEYS = {
    "l_c", "l_j", "l_p", "l_y", "z_offset", "pitch_pivot", "yaw_pivot",
    "servo_rom", "linear_travel", "leadscrew_lead",
}
_TOP_KEYS = {"left", "right", "baseline", "mirror"}


def _params_from_mapping(data: dict, where: str) -> MechanismParams:
    unknown = set(data) - _PARAM_KEYS
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    kwargs = {}
    for key, value in data.items():
        if key in ("pitch_pivot", "yaw_pivot", "servo_rom", "linear_travel"):
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise ConfigError(f"{where}.{key} must be a 2-element list")
            kwargs[key] = tuple(float(v) for v in value)
        else:
            try:
                kwargs[key] = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"{where}.{key} must be numeric, got {value!r}") from None
    return MechanismParams(**kwargs)


def parse_config(text: str) -> DualConfig:
    """Parse a YAML config document into a validated DualConfig.

    Schema (all keys optional; omitted values take the documented defaults):

        baseline: 100.0          # mm, > 0
        mirror: true
        left:                    # per-platform MechanismParams overrides
          l_c: 162.0
          l_j: 32.5
          l_p: 28.0
          l_y: 32.0
          z_offset: 0.0
          pitch_pivot: [-32.5, 0.0]   # (y, z) mm
          yaw_pivot: [-32.5, 0.0]     # (x, z) mm
          servo_rom: [-90.0, 90.0]    # degrees
          linear_travel: [0.0, 35.0]  # mm
          leadscrew_lead: 2.0         # mm / revolution
        right: { }               # same keys as left
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {sorted(unknown)}")
    left = _params_from_mapping(data.get("left") or {}, "left")
    right = _params_from_mapping(data.get("right") or {}, "right")
    baseline = float(data.get("baseline", DEFAULT_BASELINE))
    mirror = bool(data.get("mirror", True))
    return DualConfig(left=left, right=right, baseline=baseline, mirror=mirror)


def load_config(source) -> DualConfig:
    """Load a config from a path or an open text stream."""
    if hasattr(source, "read"):
        return parse_config(source.read())
    if isinstance(source, (str, os.PathLike)):
        with io.open(source, "r", encoding="utf-8") as fh:
            return parse_config(fh.read())
    raise TypeError(f"cannot load config from {type(source).__name__}")


def dump_config(config: DualConfig) -> str:
    """Serialize a DualConfig to YAML; parse_config(dump_config(c)) == c."""
    def params_doc(params: MechanismParams) -> dict:
        doc = asdict(params)
        for key in ("pitch_pivot", "yaw_pivot", "servo_rom", "linear_travel"):
            doc[key] = list(doc[key])
        return doc

    doc = {
        "baseline": config.baseline,
        "mirror": config.mirror,
        "left": params_doc(config.left),
        "right": params_doc(config.right),
    }
    return yaml.safe_dump(doc, sort_keys=True)


def save_config(config: DualConfig, path) -> None:
    with io.open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_config(config))
