"""Closed-form inverse kinematics and numeric forward kinematics.

One platform positions its chopstick tip by tilting the stick about its
pivot (two servo horns driving the backend through ball-joint linkages) and
raising the whole platform on a leadscrew.  Inverse kinematics is solved in
closed form:

  1. azimuth        psi    = atan2(x, y)           (0 when x = y = 0)
  2. stick height   z_calc = sqrt(l_c^2 - r^2),    r = hypot(x, y)
  3. polar angle    phi    = acos(z_calc / l_c)
  4. travel         d_p    = z - z_calc - z_offset
  5. per axis: the backend mount traces a sphere of radius l_j; intersect it
     with the servo plane, intersect the resulting circle with the horn
     circle, keep the in-ROM point, and read off the horn angle.

The pitch horn lives in the plane x = 0 and the yaw horn in y = 0; each
closure uses the full 3D mount position, so the out-of-plane swing of the
opposite axis is accounted for exactly (the projected circle shrinks and
shifts as the backend leaves the servo plane).

Forward kinematics has no closed form here and is solved numerically: a
damped Newton iteration on the two closure residuals over the tilt vector
(a, b) = sin(phi) * (sin(psi), cos(psi)), seeded from a coarse grid.  The
closure system admits a second, physically unassemblable branch at large
tilt; the solver restricts itself to a configurable tilt window (default
45 deg) that isolates the branch connected to the zero pose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import MechanismParams, PlatformCommand, TipPose
from .errors import (
    ConcentricCircles,
    ContainedCircles,
    DisjointCircles,
    LinkageInfeasible,
    MultipleBranches,
    NoConvergence,
    NoFeasibleSolution,
    NoIntersection,
    OutOfReach,
    RomViolated,
    TravelExceeded,
)
from .geometry import (
    Circle2,
    SphericalDir,
    Sphere3,
    backend_mount_position,
    circle_circle_intersect,
    horn_angle,
    pick_feasible_intersection,
    sphere_plane_circle,
)

FK_RESIDUAL_TOL = 1e-9      # mm
FK_MAX_ITER = 100
FK_GRID = 16                # coarse seed grid is FK_GRID x FK_GRID
FK_JACOBIAN_STEP = 1e-6     # central-difference step on (a, b)
DEFAULT_MAX_TILT_DEG = 45.0

_AXES = ("pitch", "yaw")


@dataclass(frozen=True)
class AxisSolve:
    """Diagnostics of one servo-plane construction."""

    axis: str                                   # "pitch" | "yaw"
    mount: tuple[float, float, float]           # backend mount, 3D
    mount_circle: Circle2                       # projected linkage circle
    servo_circle: Circle2                       # horn-tip circle
    points: tuple[tuple[float, float], tuple[float, float]]
    angles_deg: tuple[float, float]
    chosen: tuple[float, float]
    delta_deg: float
    residual_mm: float                          # closure residual at the chosen point


@dataclass(frozen=True)
class IkSolution:
    command: PlatformCommand
    dir: SphericalDir
    z_calc: float
    diagnostics: dict[str, AxisSolve]


def _axis_frame(params: MechanismParams, axis: str):
    """(plane_axis, horn_length, mount_offset, pivot) for one servo axis."""
    if axis == "pitch":
        return "x", params.l_p, params.l_p, params.pitch_pivot
    return "y", params.l_y, params.l_y, params.yaw_pivot


def horn_tip_3d(params: MechanismParams, axis: str, delta_deg: float) -> tuple[float, float, float]:
    """Horn tip in the platform frame for a given horn angle."""
    plane_axis, horn_len, _, pivot = _axis_frame(params, axis)
    d = math.radians(delta_deg)
    h = pivot[0] + horn_len * math.sin(d)
    v = pivot[1] - horn_len * math.cos(d)
    if plane_axis == "x":
        return (0.0, h, v)
    return (h, 0.0, v)


def solve_axis(params: MechanismParams, direction: SphericalDir, axis: str) -> AxisSolve:
    """Run the circle construction for one servo axis at a given tilt."""
    plane_axis, horn_len, mount_off, pivot = _axis_frame(params, axis)
    mount = backend_mount_position(direction, mount_off)
    try:
        mount_circle = sphere_plane_circle(Sphere3(mount, params.l_j), plane_axis, 0.0)
    except NoIntersection as exc:
        raise LinkageInfeasible(
            f"{axis} linkage sphere does not reach the servo plane: {exc}") from exc
    servo_circle = Circle2(pivot, horn_len)
    try:
        points = circle_circle_intersect(mount_circle, servo_circle)
    except (DisjointCircles, ContainedCircles, ConcentricCircles) as exc:
        raise LinkageInfeasible(f"{axis} circles do not intersect: {exc}") from exc
    chosen = pick_feasible_intersection(points, pivot, params.servo_rom)
    angles = tuple(math.degrees(horn_angle(p, pivot)) for p in points)
    delta = math.degrees(horn_angle(chosen, pivot))
    lo, hi = params.servo_rom
    delta = min(max(delta, lo), hi)
    tip = horn_tip_3d(params, axis, delta)
    residual = math.dist(tip, mount) - params.l_j
    return AxisSolve(axis, tuple(mount), mount_circle, servo_circle,
                     points, angles, chosen, delta, residual)


def inverse_kinematics(params: MechanismParams, target: TipPose) -> IkSolution:
    """Solve servo-space command for a tip target in the platform frame.

    Raises OutOfReach / TravelExceeded / LinkageInfeasible / RomViolated.
    """
    r = math.hypot(target.x, target.y)
    if r >= params.l_c:
        raise OutOfReach(
            f"target radius {r:.3f} mm >= chopstick length {params.l_c:.3f} mm")
    psi = math.atan2(target.x, target.y) if (target.x, target.y) != (0.0, 0.0) else 0.0
    z_calc = math.sqrt(params.l_c * params.l_c - r * r)
    phi = math.acos(min(z_calc / params.l_c, 1.0))
    d_p = target.z - z_calc - params.z_offset
    lo, hi = params.linear_travel
    if not lo <= d_p <= hi:
        raise TravelExceeded(
            f"required travel {d_p:.3f} mm outside [{lo}, {hi}] "
            f"(target z={target.z:.3f}, stick height {z_calc:.3f})")
    direction = SphericalDir(phi, psi)
    try:
        pitch = solve_axis(params, direction, "pitch")
        yaw = solve_axis(params, direction, "yaw")
    except NoFeasibleSolution as exc:
        raise RomViolated(str(exc)) from exc
    command = PlatformCommand(delta_p=pitch.delta_deg, delta_y=yaw.delta_deg, d_p=d_p)
    return IkSolution(command=command, dir=direction, z_calc=z_calc,
                      diagnostics={"pitch": pitch, "yaw": yaw})


# --- forward kinematics ------------------------------------------------------

def _closure_residuals(params, a, b, tips):
    """Closure residuals (mm) at tilt vector (a, b); vectorized over a, b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.sqrt(np.maximum(1.0 - a * a - b * b, 0.0))
    out = []
    for (tip, mount_off) in tips:
        dx = -mount_off * a - tip[0]
        dy = -mount_off * b - tip[1]
        dz = -mount_off * c - tip[2]
        out.append(np.sqrt(dx * dx + dy * dy + dz * dz) - params.l_j)
    return out


def _residual_pair(params, a, b, tips):
    c2 = 1.0 - a * a - b * b
    c = math.sqrt(c2) if c2 > 0.0 else 0.0
    res = []
    for (tip, mount_off) in tips:
        dx = -mount_off * a - tip[0]
        dy = -mount_off * b - tip[1]
        dz = -mount_off * c - tip[2]
        res.append(math.sqrt(dx * dx + dy * dy + dz * dz) - params.l_j)
    return res


def _newton_tilt(params, tips, a0, b0, r_max):
    """Damped Newton on the 2-residual closure system from one seed.

    Returns (a, b, residual_inf) or None when the iteration stagnates.
    """
    a, b = a0, b0
    r1, r2 = _residual_pair(params, a, b, tips)
    norm = max(abs(r1), abs(r2))
    step = FK_JACOBIAN_STEP
    for _ in range(FK_MAX_ITER):
        if norm < FK_RESIDUAL_TOL:
            return a, b, norm
        f1a, f2a = _residual_pair(params, a + step, b, tips)
        g1a, g2a = _residual_pair(params, a - step, b, tips)
        f1b, f2b = _residual_pair(params, a, b + step, tips)
        g1b, g2b = _residual_pair(params, a, b - step, tips)
        j11 = (f1a - g1a) / (2 * step)
        j12 = (f1b - g1b) / (2 * step)
        j21 = (f2a - g2a) / (2 * step)
        j22 = (f2b - g2b) / (2 * step)
        det = j11 * j22 - j12 * j21
        if abs(det) < 1e-14:
            return None
        da = -(j22 * r1 - j12 * r2) / det
        db = -(-j21 * r1 + j11 * r2) / det
        # backtracking line search, iterates clipped into the tilt disc
        lam, improved = 1.0, False
        for _ in range(9):
            na, nb = a + lam * da, b + lam * db
            rad = math.hypot(na, nb)
            if rad > r_max:
                na, nb = na * r_max / rad, nb * r_max / rad
            n1, n2 = _residual_pair(params, na, nb, tips)
            nnorm = max(abs(n1), abs(n2))
            if nnorm < norm:
                a, b, r1, r2, norm = na, nb, n1, n2, nnorm
                improved = True
                break
            lam *= 0.5
        if not improved:
            return None
    return (a, b, norm) if norm < FK_RESIDUAL_TOL else None


def solve_tilt(
    params: MechanismParams,
    command: PlatformCommand,
    max_tilt_deg: float = DEFAULT_MAX_TILT_DEG,
) -> SphericalDir:
    """Find the tilt (phi, psi) realizing a servo command.

    Seeds a damped Newton iteration from a FK_GRID x FK_GRID grid over the
    tilt window and verifies the solution is unique inside the window.
    """
    params.check_command(command)
    tips = (
        (horn_tip_3d(params, "pitch", command.delta_p), params.l_p),
        (horn_tip_3d(params, "yaw", command.delta_y), params.l_y),
    )
    r_max = math.sin(math.radians(max_tilt_deg))

    phis = np.linspace(0.0, math.radians(max_tilt_deg), FK_GRID)
    psis = np.linspace(-math.pi, math.pi, FK_GRID, endpoint=False)
    pp, ss = np.meshgrid(phis, psis)
    seed_a = (np.sin(pp) * np.sin(ss)).ravel()
    seed_b = (np.sin(pp) * np.cos(ss)).ravel()
    res1, res2 = _closure_residuals(params, seed_a, seed_b, tips)
    seed_norm = np.maximum(np.abs(res1), np.abs(res2))
    order = np.argsort(seed_norm)

    solution = None
    best_norm = float(seed_norm[order[0]])
    for idx in order[:8]:
        hit = _newton_tilt(params, tips, float(seed_a[idx]), float(seed_b[idx]), r_max)
        if hit is not None:
            solution = hit
            break
        best_norm = min(best_norm, float(seed_norm[idx]))
    if solution is None:
        raise NoConvergence(
            f"closure residual did not reach {FK_RESIDUAL_TOL} mm "
            f"(best {best_norm:.3g} mm)", residual=best_norm)

    a, b, _ = solution
    # probe distant seeds for a second closure branch inside the window
    distinct = []
    dist = np.hypot(seed_a - a, seed_b - b)
    far = order[dist[order] > 0.25]
    for idx in far[:2]:
        hit = _newton_tilt(params, tips, float(seed_a[idx]), float(seed_b[idx]), r_max)
        if hit is not None and math.hypot(hit[0] - a, hit[1] - b) > 1e-6:
            distinct.append(hit)
    if distinct:
        sols = [(a, b)] + [(h[0], h[1]) for h in distinct]
        dirs = [SphericalDir(math.asin(min(math.hypot(aa, bb), 1.0)),
                             math.atan2(aa, bb)) for aa, bb in sols]
        raise MultipleBranches(
            f"{len(sols)} closure branches inside the {max_tilt_deg} deg window",
            solutions=dirs)

    sin_phi = math.hypot(a, b)
    phi = math.asin(min(sin_phi, 1.0))
    psi = math.atan2(a, b) if sin_phi > 1e-12 else 0.0
    return SphericalDir(phi, psi)


def forward_kinematics(
    params: MechanismParams,
    command: PlatformCommand,
    max_tilt_deg: float = DEFAULT_MAX_TILT_DEG,
) -> TipPose:
    """Tip pose realized by a servo command (numeric closure solve)."""
    direction = solve_tilt(params, command, max_tilt_deg)
    return tip_pose_from_tilt(params, direction, command.d_p)


def tip_pose_from_tilt(params: MechanismParams, direction: SphericalDir, d_p: float) -> TipPose:
    """Tip pose for a known tilt and platform travel."""
    sp = math.sin(direction.phi)
    z_calc = params.l_c * math.cos(direction.phi)
    return TipPose(
        x=params.l_c * sp * math.sin(direction.psi),
        y=params.l_c * sp * math.cos(direction.psi),
        z=d_p + z_calc + params.z_offset,
    )


def travel_to_servo_rotation(params: MechanismParams, d_p: float) -> float:
    """Linear-axis servo rotation (revolutions) for a platform travel."""
    lo, hi = params.linear_travel
    if not lo <= d_p <= hi:
        raise TravelExceeded(f"d_p={d_p:.6g} mm outside travel [{lo}, {hi}]")
    return d_p / params.leadscrew_lead
