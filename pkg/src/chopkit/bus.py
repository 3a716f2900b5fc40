"""Servo bus wire codec and loopback simulator.

Frame layout (all multi-byte fields little-endian):

    0xFE 0xED | id u8 | len u8 | opcode u8 | payload | crc16 u16

  id       servo address 0-253; 254 broadcasts (no reply)
  len      payload byte count (<= 250)
  crc16    poly 0x1021, init 0xFFFF, no reflection, no final xor,
           computed over id..payload inclusive

Opcodes:

  0x01 SET_GOAL_ANGLE   payload i16, centi-degrees
  0x02 SET_GOAL_TRAVEL  payload u16, centi-millimeters
  0x03 READ_STATE       empty payload
  0x81 STATE_REPLY      payload i16 position, i16 goal (centi-units of the
                        servo's native axis: degrees for rotary, mm linear)

The loopback bus stands in for the physical actuator chain: five simulated
servos (1/2 pitch+yaw left, 3/4 pitch+yaw right, 5 linear) with first-order
lag dynamics and a backlash deadband.  The deadband gates motion: a servo
whose position is within the deadband of its goal does not move, so settled
positions sit within one deadband of the goal.  Time constant and deadband
are modeling choices, not measured values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import PayloadTooLong, UnknownOpcode

SYNC = b"\xfe\xed"
BROADCAST_ID = 254
MAX_PAYLOAD = 250

OP_SET_GOAL_ANGLE = 0x01
OP_SET_GOAL_TRAVEL = 0x02
OP_READ_STATE = 0x03
OP_STATE_REPLY = 0x81

_PAYLOAD_LEN = {
    OP_SET_GOAL_ANGLE: 2,
    OP_SET_GOAL_TRAVEL: 2,
    OP_READ_STATE: 0,
    OP_STATE_REPLY: 4,
}

DEFAULT_TAU_S = 0.05
DEFAULT_DEADBAND_DEG = 0.25


def crc16(data: bytes) -> int:
    """CRC-16 with poly 0x1021, init 0xFFFF, no reflection, no final xor."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


@dataclass(frozen=True)
class BusFrame:
    servo_id: int
    opcode: int
    payload: bytes = b""


def encode(frame: BusFrame) -> bytes:
    """Serialize a frame; raises PayloadTooLong / UnknownOpcode."""
    if len(frame.payload) > MAX_PAYLOAD:
        raise PayloadTooLong(f"payload {len(frame.payload)} bytes > {MAX_PAYLOAD}")
    if frame.opcode not in _PAYLOAD_LEN:
        raise UnknownOpcode(f"opcode 0x{frame.opcode:02x} not in protocol")
    expected = _PAYLOAD_LEN[frame.opcode]
    if len(frame.payload) != expected:
        raise ValueError(
            f"opcode 0x{frame.opcode:02x} needs a {expected}-byte payload, "
            f"got {len(frame.payload)}")
    if not 0 <= frame.servo_id <= BROADCAST_ID:
        raise ValueError(f"servo id {frame.servo_id} outside 0..{BROADCAST_ID}")
    body = bytes([frame.servo_id, len(frame.payload), frame.opcode]) + frame.payload
    return SYNC + body + crc16(body).to_bytes(2, "little")


@dataclass(frozen=True)
class DecodeResult:
    frames: list[BusFrame]
    remainder: bytes
    diagnostics: list[tuple[int, str]]  # (byte offset, "crc_mismatch" | "truncated")


def decode(data: bytes) -> DecodeResult:
    """Scan arbitrary bytes for frames; never raises.

    Bad-CRC candidates are reported and skipped by resynchronizing at the
    next sync candidate.  An incomplete frame at the end of the buffer is
    reported as truncated and returned in the remainder so the caller can
    retry once more bytes arrive.
    """
    frames: list[BusFrame] = []
    diagnostics: list[tuple[int, str]] = []
    i = 0
    n = len(data)
    while True:
        j = data.find(SYNC, i)
        if j < 0:
            # a lone trailing 0xFE may be a split sync
            if n and data[-1] == SYNC[0]:
                return DecodeResult(frames, data[n - 1:], diagnostics)
            return DecodeResult(frames, b"", diagnostics)
        if j + 5 > n:
            diagnostics.append((j, "truncated"))
            return DecodeResult(frames, data[j:], diagnostics)
        plen = data[j + 3]
        end = j + 7 + plen
        if end > n:
            diagnostics.append((j, "truncated"))
            return DecodeResult(frames, data[j:], diagnostics)
        body = data[j + 2:j + 5 + plen]
        stored = int.from_bytes(data[j + 5 + plen:end], "little")
        if crc16(body) != stored:
            diagnostics.append((j, "crc_mismatch"))
            i = j + 2
            continue
        frames.append(BusFrame(servo_id=body[0], opcode=body[2], payload=bytes(body[3:])))
        i = end


def frame_dump(data: bytes) -> str:
    """Textual frame dump: hex bytes, one frame per line."""
    result = decode(data)
    lines = []
    for frame in result.frames:
        raw = encode(frame)
        lines.append(raw.hex(" "))
    return "\n".join(lines) + ("\n" if lines else "")


# --- typed frame helpers ------------------------------------------------------

def set_goal_angle(servo_id: int, angle_deg: float) -> BusFrame:
    raw = round(angle_deg * 100.0)
    if not -32768 <= raw <= 32767:
        raise ValueError(f"angle {angle_deg} deg outside wire range +/-327.67")
    return BusFrame(servo_id, OP_SET_GOAL_ANGLE, raw.to_bytes(2, "little", signed=True))


def set_goal_travel(servo_id: int, travel_mm: float) -> BusFrame:
    raw = round(travel_mm * 100.0)
    if not 0 <= raw <= 0xFFFF:
        raise ValueError(f"travel {travel_mm} mm outside wire range 0..655.35")
    return BusFrame(servo_id, OP_SET_GOAL_TRAVEL, raw.to_bytes(2, "little"))


def read_state(servo_id: int) -> BusFrame:
    return BusFrame(servo_id, OP_READ_STATE, b"")


def parse_state_reply(frame: BusFrame) -> tuple[float, float]:
    """(position, goal) in the servo's native units from a STATE_REPLY."""
    if frame.opcode != OP_STATE_REPLY:
        raise ValueError(f"not a STATE_REPLY: opcode 0x{frame.opcode:02x}")
    pos = int.from_bytes(frame.payload[0:2], "little", signed=True)
    goal = int.from_bytes(frame.payload[2:4], "little", signed=True)
    return pos / 100.0, goal / 100.0


# --- servo simulation ---------------------------------------------------------

@dataclass(frozen=True)
class ServoSimState:
    """First-order servo with a backlash deadband."""

    position: float                     # native units (deg or mm)
    goal: float
    tau: float = DEFAULT_TAU_S          # s
    deadband: float = DEFAULT_DEADBAND_DEG
    rom: tuple[float, float] = (-90.0, 90.0)

    def __post_init__(self):
        lo, hi = self.rom
        if not lo <= self.position <= hi:
            raise ValueError(f"position {self.position} outside rom [{lo}, {hi}]")
        if not lo <= self.goal <= hi:
            raise ValueError(f"goal {self.goal} outside rom [{lo}, {hi}]")


def step_servo(state: ServoSimState, dt: float) -> ServoSimState:
    """Advance the lag dynamics by dt.

    Motion happens only while |goal - position| exceeds the deadband, and
    the lag tracks the deadband-shifted goal, so the position settles just
    at the deadband boundary on the approach side.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    err = state.goal - state.position
    if abs(err) <= state.deadband:
        return state
    goal_eff = state.goal - math.copysign(state.deadband, err)
    alpha = 1.0 - math.exp(-dt / state.tau)
    new_pos = state.position + (goal_eff - state.position) * alpha
    if abs(goal_eff - new_pos) < 1e-9:
        new_pos = goal_eff
    lo, hi = state.rom
    new_pos = min(max(new_pos, lo), hi)
    return replace(state, position=new_pos)


class LoopbackBus:
    """Five simulated servos behind the wire protocol.

    Addresses 1/2 are the left platform's pitch/yaw, 3/4 the right's, and
    5 the linear axis (native unit mm, SET_GOAL_TRAVEL).  Each processed
    frame advances the simulation clock by dt; unknown addresses stay
    silent like a real bus.
    """

    ROTARY_IDS = (1, 2, 3, 4)
    LINEAR_ID = 5

    def __init__(
        self,
        tau: float = DEFAULT_TAU_S,
        deadband_deg: float = DEFAULT_DEADBAND_DEG,
        deadband_linear_mm: float = 0.0,
        rom_deg: tuple[float, float] = (-90.0, 90.0),
        travel_mm: tuple[float, float] = (0.0, 35.0),
    ):
        self.servos: dict[int, ServoSimState] = {}
        for sid in self.ROTARY_IDS:
            self.servos[sid] = ServoSimState(0.0, 0.0, tau, deadband_deg, rom_deg)
        self.servos[self.LINEAR_ID] = ServoSimState(
            travel_mm[0], travel_mm[0], tau, deadband_linear_mm, travel_mm)
        self.clock = 0.0

    def _clamp_goal(self, sid: int, value: float) -> float:
        lo, hi = self.servos[sid].rom
        return min(max(value, lo), hi)

    def _targets(self, servo_id: int, rotary: bool) -> list[int]:
        pool = self.ROTARY_IDS if rotary else (self.LINEAR_ID,)
        if servo_id == BROADCAST_ID:
            return list(pool)
        return [servo_id] if servo_id in pool else []

    def step(self, dt: float) -> None:
        for sid, state in self.servos.items():
            self.servos[sid] = step_servo(state, dt)
        self.clock += dt

    def settle(self, duration: float, dt: float = 0.001) -> None:
        steps = max(int(round(duration / dt)), 1)
        for _ in range(steps):
            self.step(dt)

    def exchange(self, data: bytes, dt: float = 0.001) -> bytes:
        """Feed raw bytes in, get raw reply bytes out.

        Every decoded frame advances the dynamics by dt before it is
        handled, standing in for inter-message wall-clock time.
        """
        replies = b""
        for frame in decode(data).frames:
            self.step(dt)
            if frame.opcode == OP_SET_GOAL_ANGLE:
                goal = int.from_bytes(frame.payload, "little", signed=True) / 100.0
                for sid in self._targets(frame.servo_id, rotary=True):
                    self.servos[sid] = replace(self.servos[sid],
                                               goal=self._clamp_goal(sid, goal))
            elif frame.opcode == OP_SET_GOAL_TRAVEL:
                goal = int.from_bytes(frame.payload, "little") / 100.0
                for sid in self._targets(frame.servo_id, rotary=False):
                    self.servos[sid] = replace(self.servos[sid],
                                               goal=self._clamp_goal(sid, goal))
            elif frame.opcode == OP_READ_STATE:
                if frame.servo_id in self.servos:  # broadcast reads stay silent
                    state = self.servos[frame.servo_id]
                    payload = (round(state.position * 100).to_bytes(2, "little", signed=True)
                               + round(state.goal * 100).to_bytes(2, "little", signed=True))
                    replies += encode(BusFrame(frame.servo_id, OP_STATE_REPLY, payload))
            # unknown opcodes with valid CRC are ignored
        return replies
