"""Pure geometric primitives for the per-axis linkage construction.

Conventions:

  * A chopstick direction is a spherical direction (phi, psi), phi measured
    from the -Z axis (phi = 0 points straight down), psi the azimuth.
  * Planar work happens in a coordinate plane of the platform frame; planar
    points are (h, v) = (horizontal, vertical) pairs:
        plane x = c  ->  (h, v) = (y, z)
        plane y = c  ->  (h, v) = (x, z)
        plane z = c  ->  (h, v) = (x, y)
  * A servo horn angle is measured from the straight-down horn pose,
    positive when the horn tip swings toward +h.

All lengths in millimeters, all angles in radians unless suffixed _deg.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ConcentricCircles,
    ContainedCircles,
    DisjointCircles,
    NoFeasibleSolution,
    NoIntersection,
)

# Absolute slack (mm) for "circles touch" decisions near workspace edges.
BOUNDARY_TOL = 1e-9

_PLANE_COORDS = {"x": (1, 2), "y": (0, 2), "z": (0, 1)}
_PLANE_NORMAL = {"x": 0, "y": 1, "z": 2}


@dataclass(frozen=True)
class SphericalDir:
    """Chopstick direction: polar angle phi from -Z, azimuth psi (radians)."""

    phi: float
    psi: float


@dataclass(frozen=True)
class Circle2:
    center: tuple[float, float]  # (h, v)
    radius: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise ValueError(f"circle radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class Sphere3:
    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError(f"sphere radius must be > 0, got {self.radius}")


def backend_mount_position(direction: SphericalDir, l_b: float) -> tuple[float, float, float]:
    """Linkage mount point on the chopstick backend, platform frame.

    The mount sits at distance l_b from the pivot, azimuthally opposite the
    tip:  (-l_b sin(phi) sin(psi), -l_b sin(phi) cos(psi), -l_b cos(phi)).
    """
    if not l_b > 0.0:
        raise ValueError(f"l_b must be > 0, got {l_b}")
    sp = math.sin(direction.phi)
    return (
        -l_b * sp * math.sin(direction.psi),
        -l_b * sp * math.cos(direction.psi),
        -l_b * math.cos(direction.phi),
    )


def sphere_plane_circle(sphere: Sphere3, plane_axis: str, plane_offset: float = 0.0) -> Circle2:
    """Intersect a sphere with a coordinate plane.

    Returns the intersection circle in the plane's (h, v) coordinates with
    radius sqrt(r^2 - dist^2), dist the center-to-plane distance.  Raises
    NoIntersection when the sphere does not reach the plane.
    """
    try:
        ih, iv = _PLANE_COORDS[plane_axis]
    except KeyError:
        raise ValueError(f"plane_axis must be one of x/y/z, got {plane_axis!r}") from None
    dist = sphere.center[_PLANE_NORMAL[plane_axis]] - plane_offset
    reach = sphere.radius * sphere.radius - dist * dist
    if reach < -BOUNDARY_TOL * max(sphere.radius, 1.0):
        raise NoIntersection(
            f"sphere (r={sphere.radius:.6g}) is {abs(dist):.6g} mm from plane "
            f"{plane_axis}={plane_offset:.6g}")
    radius = math.sqrt(max(reach, 0.0))
    return Circle2((sphere.center[ih], sphere.center[iv]), radius)


def circle_circle_intersect(
    c1: Circle2, c2: Circle2
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Intersection points of two coplanar circles.

    Uses the radical-line construction: with d the center distance,
    l = (r1^2 - r2^2 + d^2) / (2 d) is the distance from c1's center to the
    radical line along the center line, and h = sqrt(r1^2 - l^2) the half
    chord.  The two points are returned as (base + h*perp, base - h*perp)
    so each satisfies both circle equations.  Tangency within BOUNDARY_TOL
    collapses to two coincident points.
    """
    (h1, v1), r1 = c1.center, c1.radius
    (h2, v2), r2 = c2.center, c2.radius
    d = math.hypot(h2 - h1, v2 - v1)
    if d <= BOUNDARY_TOL:
        raise ConcentricCircles(f"circle centers coincide (d={d:.3g} mm)")
    if d > r1 + r2 + BOUNDARY_TOL:
        raise DisjointCircles(f"d={d:.6g} exceeds r1+r2={r1 + r2:.6g}")
    if d < abs(r1 - r2) - BOUNDARY_TOL:
        raise ContainedCircles(f"d={d:.6g} below |r1-r2|={abs(r1 - r2):.6g}")
    l = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    half_chord_sq = r1 * r1 - l * l
    h = math.sqrt(max(half_chord_sq, 0.0))
    eh, ev = (h2 - h1) / d, (v2 - v1) / d   # unit center line
    bh, bv = h1 + l * eh, v1 + l * ev       # foot on the radical line
    # perpendicular (-ev, eh); pairing (+h, -h) keeps both points on both circles
    return ((bh - h * ev, bv + h * eh), (bh + h * ev, bv - h * eh))


def horn_angle(point: tuple[float, float], pivot: tuple[float, float]) -> float:
    """Horn angle (radians) of a horn-tip point about its pivot.

    Zero points straight down (-v); positive swings the tip toward +h.
    """
    dh = point[0] - pivot[0]
    dv = point[1] - pivot[1]
    return math.atan2(dh, -dv)


def pick_feasible_intersection(
    points: tuple[tuple[float, float], tuple[float, float]],
    pivot: tuple[float, float],
    rom_deg: tuple[float, float],
) -> tuple[float, float]:
    """Select the intersection point whose horn angle lies inside the ROM.

    When both qualify the point with the smaller |angle| wins; exact ties
    break toward the negative angle.  Raises NoFeasibleSolution when neither
    point is admissible.
    """
    lo, hi = rom_deg
    candidates = []
    for point in points:
        angle = math.degrees(horn_angle(point, pivot))
        if lo - 1e-9 <= angle <= hi + 1e-9:
            candidates.append((abs(angle), angle, point))
    if not candidates:
        angles = [math.degrees(horn_angle(p, pivot)) for p in points]
        raise NoFeasibleSolution(
            f"both intersection angles {angles[0]:.3f} deg / {angles[1]:.3f} deg "
            f"outside ROM [{lo}, {hi}]")
    candidates.sort(key=lambda item: item[0])
    if len(candidates) > 1 and candidates[1][0] - candidates[0][0] < 1e-9:
        return min(candidates[:2], key=lambda item: item[1])[2]
    return candidates[0][2]
