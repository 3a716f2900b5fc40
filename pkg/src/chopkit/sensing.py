"""Simulated 6-axis force/torque sensing for one chopstick.

The modeled sensor matches the mounted device's envelope: +/-25 N force and
+/-125 mNm torque full scale, 10-bit resolution, 1 kHz sampling.  Gripping
an elastic object is modeled as a linear spring: normal force along the
grip axis equals stiffness times penetration past the object's rest width,
then noise, drift, and quantization are applied.  Contact stiffness (N/mm)
is the measurable proxy for material hardness -- a two-point pinch cannot
recover a durometer value without contact-patch geometry, so only the
ordering of materials is meaningful, and reports should label these numbers
synthetic.

Stream CSV schema (units: s, N, mNm):

    t,fx,fy,fz,tx,ty,tz,flags     flags bit 0 = quantized, bit 1 = saturated

Closure CSV schema:

    t,separation_mm
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoContact, WindowTooShort

FORCE_FULL_SCALE = 25.0     # N
TORQUE_FULL_SCALE = 125.0   # mNm
RESOLUTION_BITS = 10
SAMPLE_RATE_HZ = 1000.0

DEFAULT_NOISE_STD = 0.02    # N, synthetic
DEFAULT_DRIFT_RATE = 0.001  # N/s, synthetic
DEFAULT_CONTACT_THRESHOLD = 0.15   # N (3x default noise std)
DEFAULT_CONTACT_HYSTERESIS = 0.05  # N
DEFAULT_LEVER_ARM_MM = 40.0        # contact point to sensor frame


@dataclass(frozen=True)
class FtSample:
    t: float                                # s
    force: tuple[float, float, float]       # N
    torque: tuple[float, float, float]      # mNm
    quantized: bool = False
    saturated: bool = False

    @property
    def force_magnitude(self) -> float:
        return math.hypot(*self.force)


@dataclass(frozen=True)
class SensorModel:
    full_scale_force: float = FORCE_FULL_SCALE
    full_scale_torque: float = TORQUE_FULL_SCALE
    resolution_bits: int = RESOLUTION_BITS
    rate_hz: float = SAMPLE_RATE_HZ
    noise_std: float = DEFAULT_NOISE_STD
    drift_rate: float = DEFAULT_DRIFT_RATE

    def __post_init__(self):
        if self.resolution_bits < 1:
            raise ValueError("resolution_bits must be >= 1")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be > 0")

    @property
    def force_lsb(self) -> float:
        return 2.0 * self.full_scale_force / (2 ** self.resolution_bits)

    @property
    def torque_lsb(self) -> float:
        return 2.0 * self.full_scale_torque / (2 ** self.resolution_bits)


def _quantize_value(value: float, full_scale: float, bits: int) -> tuple[float, bool]:
    """Map value onto the 2^bits uniform levels spanning [-FS, +FS).

    Level k has value -FS + k * LSB, k in [0, 2^bits - 1]; zero is level
    2^(bits-1), and +FS itself is not representable (asymmetric by one
    level).  Returns (level value, saturated).
    """
    lsb = 2.0 * full_scale / (2 ** bits)
    level = round((value + full_scale) / lsb)
    saturated = False
    if level < 0:
        level, saturated = 0, True
    elif level > 2 ** bits - 1:
        level, saturated = 2 ** bits - 1, True
    return -full_scale + level * lsb, saturated


def quantize(model: SensorModel, sample: FtSample) -> FtSample:
    """Clamp and round a sample to the sensor's representable levels."""
    force, torque, saturated = [], [], False
    for v in sample.force:
        q, sat = _quantize_value(v, model.full_scale_force, model.resolution_bits)
        force.append(q)
        saturated |= sat
    for v in sample.torque:
        q, sat = _quantize_value(v, model.full_scale_torque, model.resolution_bits)
        torque.append(q)
        saturated |= sat
    return FtSample(sample.t, tuple(force), tuple(torque),
                    quantized=True, saturated=saturated or sample.saturated)


def tare(stream: list[FtSample], window_s: float, min_samples: int = 10) -> np.ndarray:
    """Per-channel bias: mean over the leading still window (>= 10 samples)."""
    if not stream:
        raise WindowTooShort("empty stream")
    t0 = stream[0].t
    window = [s for s in stream if s.t <= t0 + window_s]
    if len(window) < min_samples:
        raise WindowTooShort(
            f"tare window holds {len(window)} samples, need >= {min_samples}")
    data = np.array([s.force + s.torque for s in window])
    return data.mean(axis=0)


def subtract_bias(stream: list[FtSample], bias) -> list[FtSample]:
    bias = np.asarray(bias, dtype=float)
    out = []
    for s in stream:
        f = tuple(v - b for v, b in zip(s.force, bias[:3]))
        tq = tuple(v - b for v, b in zip(s.torque, bias[3:]))
        out.append(FtSample(s.t, f, tq, s.quantized, s.saturated))
    return out


@dataclass(frozen=True)
class ContactEvent:
    onset_t: float
    release_t: float
    onset_index: int
    release_index: int


def detect_contact(
    stream: list[FtSample],
    threshold: float = DEFAULT_CONTACT_THRESHOLD,
    hysteresis: float = DEFAULT_CONTACT_HYSTERESIS,
    smooth_window: int = 8,
) -> list[ContactEvent]:
    """Hysteretic contact events on the force magnitude.

    Onset when |f| crosses above threshold; release when it falls below
    threshold - hysteresis.  The magnitude is smoothed with a trailing
    moving average (smooth_window samples) first; without it, sensor noise
    inside the hysteresis band can chatter on slow release ramps.  A stream
    that ends in contact closes its last event at the final sample.
    """
    if not threshold > hysteresis > 0:
        raise ValueError("need threshold > hysteresis > 0")
    if smooth_window < 1:
        raise ValueError("smooth_window must be >= 1")
    mags = np.array([s.force_magnitude for s in stream])
    if smooth_window > 1 and len(mags) > smooth_window:
        kernel = np.ones(smooth_window) / smooth_window
        smoothed = np.convolve(mags, kernel, mode="full")[:len(mags)]
        # trailing window; pad-in region uses the partial mean
        counts = np.minimum(np.arange(1, len(mags) + 1), smooth_window)
        smoothed = smoothed * smooth_window / counts
        mags = smoothed
    events = []
    onset_i = None
    for i, mag in enumerate(mags):
        if onset_i is None:
            if mag > threshold:
                onset_i = i
        elif mag < threshold - hysteresis:
            events.append(ContactEvent(stream[onset_i].t, stream[i].t, onset_i, i))
            onset_i = None
    if onset_i is not None:
        events.append(ContactEvent(stream[onset_i].t, stream[-1].t,
                                   onset_i, len(stream) - 1))
    return events


@dataclass(frozen=True)
class GripCycle:
    """Commanded closure profile against one test object."""

    times: np.ndarray        # s, strictly increasing
    separation: np.ndarray   # commanded stick separation, mm
    stiffness: float         # object contact stiffness, N/mm
    rest_width: float        # object rest width, mm

    def __post_init__(self):
        if not self.stiffness > 0:
            raise ValueError("stiffness must be > 0")
        if np.any(np.asarray(self.separation) < 0):
            raise ValueError("separation must be >= 0")
        if self.rest_width <= 0:
            raise ValueError("rest_width must be > 0")


def make_grip_cycles(
    stiffness: float,
    rest_width: float = 30.0,
    depth: float = 2.0,
    cycles: int = 8,
    open_gap: float = 5.0,
    lead_s: float = 0.5,
    close_s: float = 0.6,
    hold_s: float = 0.3,
    open_s: float = 0.6,
    dwell_s: float = 0.5,
    rate_hz: float = SAMPLE_RATE_HZ,
) -> GripCycle:
    """Build an n-cycle trapezoidal closure profile (open/close/hold/open)."""
    dt = 1.0 / rate_hz
    open_sep = rest_width + open_gap
    closed_sep = rest_width - depth
    if closed_sep < 0:
        raise ValueError("closure depth exceeds rest width")
    knots_t = [0.0, lead_s]
    knots_s = [open_sep, open_sep]
    t = lead_s
    for _ in range(cycles):
        t += close_s
        knots_t.append(t); knots_s.append(closed_sep)
        t += hold_s
        knots_t.append(t); knots_s.append(closed_sep)
        t += open_s
        knots_t.append(t); knots_s.append(open_sep)
        t += dwell_s
        knots_t.append(t); knots_s.append(open_sep)
    times = np.arange(0.0, t + dt / 2, dt)
    separation = np.interp(times, knots_t, knots_s)
    return GripCycle(times=times, separation=separation,
                     stiffness=stiffness, rest_width=rest_width)


def simulate_grip_cycle(
    model: SensorModel,
    cycle: GripCycle,
    seed: int = 0,
    lever_arm_mm: float = DEFAULT_LEVER_ARM_MM,
) -> list[FtSample]:
    """Synthesize the sensor stream for a closure profile.

    Grip normal force acts along +x; the torque reading is force times the
    contact lever arm about +y.  Noise, drift, and quantization applied.
    """
    rng = np.random.default_rng(seed)
    t = np.asarray(cycle.times, dtype=float)
    pen = np.maximum(0.0, cycle.rest_width - np.asarray(cycle.separation, dtype=float))
    fx = cycle.stiffness * pen
    drift = model.drift_rate * t
    noise_f = rng.normal(0.0, model.noise_std, size=(len(t), 3))
    noise_t = rng.normal(0.0, model.noise_std, size=(len(t), 3))
    force = np.stack([fx + drift + noise_f[:, 0],
                      drift + noise_f[:, 1],
                      drift + noise_f[:, 2]], axis=1)
    torque = np.stack([noise_t[:, 0],
                       fx * lever_arm_mm + noise_t[:, 1],
                       noise_t[:, 2]], axis=1)
    out = []
    for i in range(len(t)):
        raw = FtSample(float(t[i]), tuple(force[i]), tuple(torque[i]))
        out.append(quantize(model, raw))
    return out


@dataclass(frozen=True)
class StiffnessEstimate:
    k_hat: float          # N/mm
    r_squared: float
    contact_onset: float  # s


def estimate_stiffness(
    stream: list[FtSample],
    closure: GripCycle,
    threshold: float = DEFAULT_CONTACT_THRESHOLD,
    hysteresis: float = DEFAULT_CONTACT_HYSTERESIS,
    tare_window_s: float = 0.25,
) -> StiffnessEstimate:
    """Contact stiffness from force vs commanded separation.

    Tares on the leading still window, detects contact events, then fits
    force magnitude against separation over the in-contact samples; in
    contact, force = k * (rest_width - separation), so k is minus the
    fitted slope.  Raises NoContact when no event is found.
    """
    bias = tare(stream, tare_window_s)
    tared = subtract_bias(stream, bias)
    events = detect_contact(tared, threshold, hysteresis)
    if not events:
        raise NoContact("no contact event above threshold")
    idx = np.concatenate([np.arange(e.onset_index, e.release_index + 1) for e in events])
    mags = np.array([tared[i].force_magnitude for i in idx])
    t_samples = np.array([tared[i].t for i in idx])
    sep = np.interp(t_samples, closure.times, closure.separation)
    if float(np.ptp(sep)) <= 0.0:
        raise NoContact("no separation sweep during contact; cannot fit a slope")
    slope, intercept = np.polyfit(sep, mags, 1)
    predicted = slope * sep + intercept
    ss_res = float(np.sum((mags - predicted) ** 2))
    ss_tot = float(np.sum((mags - mags.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return StiffnessEstimate(k_hat=float(-slope), r_squared=r_squared,
                             contact_onset=events[0].onset_t)


def slice_stream(stream: list[FtSample], t0: float, t1: float) -> list[FtSample]:
    """Samples with t in [t0, t1]."""
    return [s for s in stream if t0 <= s.t <= t1]


# --- CSV io -------------------------------------------------------------------

def write_stream_csv(stream: list[FtSample], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "fx", "fy", "fz", "tx", "ty", "tz", "flags"])
        for s in stream:
            flags = (1 if s.quantized else 0) | (2 if s.saturated else 0)
            writer.writerow([f"{s.t:.6f}"] +
                            [f"{v:.17g}" for v in s.force + s.torque] + [flags])


def read_stream_csv(path) -> list[FtSample]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            flags = int(row["flags"])
            out.append(FtSample(
                t=float(row["t"]),
                force=(float(row["fx"]), float(row["fy"]), float(row["fz"])),
                torque=(float(row["tx"]), float(row["ty"]), float(row["tz"])),
                quantized=bool(flags & 1),
                saturated=bool(flags & 2),
            ))
    return out


def write_closure_csv(cycle: GripCycle, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "separation_mm"])
        for t, s in zip(cycle.times, cycle.separation):
            writer.writerow([f"{t:.6f}", f"{s:.17g}"])


def read_closure_csv(path, stiffness: float = 1.0, rest_width: Optional[float] = None):
    """Load a closure CSV; stiffness/rest_width are carried metadata only."""
    times, sep = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            times.append(float(row["t"]))
            sep.append(float(row["separation_mm"]))
    times = np.array(times)
    sep = np.array(sep)
    rest = rest_width if rest_width is not None else float(sep.max())
    return GripCycle(times=times, separation=sep, stiffness=stiffness, rest_width=rest)
