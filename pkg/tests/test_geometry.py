import math

import numpy as np
import pytest

from chopkit.errors import (
    ConcentricCircles,
    ContainedCircles,
    DisjointCircles,
    NoFeasibleSolution,
    NoIntersection,
)
from chopkit.geometry import (
    Circle2,
    Sphere3,
    SphericalDir,
    backend_mount_position,
    circle_circle_intersect,
    horn_angle,
    pick_feasible_intersection,
    sphere_plane_circle,
)


# --- backend mount -------------------------------------------------------------

def test_mount_zero_pose_points_straight_down():
    for psi in (0.0, 1.0, -2.5):
        assert backend_mount_position(SphericalDir(0.0, psi), 28.0) == (0.0, 0.0, -28.0)


def test_mount_quarter_tilt():
    x, y, z = backend_mount_position(SphericalDir(math.pi / 2, 0.0), 28.0)
    assert x == pytest.approx(0.0, abs=1e-12)
    assert y == pytest.approx(-28.0, abs=1e-12)
    assert z == pytest.approx(0.0, abs=1e-12)


def test_mount_general_direction():
    phi, psi = math.radians(10.06), math.radians(45.0)
    x, y, z = backend_mount_position(SphericalDir(phi, psi), 28.0)
    assert x == pytest.approx(-28.0 * math.sin(phi) * math.sin(psi), abs=1e-12)
    assert y == pytest.approx(-28.0 * math.sin(phi) * math.cos(psi), abs=1e-12)
    assert z == pytest.approx(-28.0 * math.cos(phi), abs=1e-12)
    # the printed three-decimal values of this case
    assert round(x, 3) == -3.458
    assert round(z, 3) == -27.570


def test_mount_norm_equals_offset():
    rng = np.random.default_rng(11)
    for _ in range(500):
        phi = rng.uniform(0.0, math.pi / 2 * 0.999)
        psi = rng.uniform(-math.pi, math.pi)
        l_b = rng.uniform(0.1, 100.0)
        m = backend_mount_position(SphericalDir(phi, psi), l_b)
        assert math.hypot(*m) == pytest.approx(l_b, rel=1e-12)


def test_mount_requires_positive_offset():
    with pytest.raises(ValueError):
        backend_mount_position(SphericalDir(0.0, 0.0), 0.0)


# --- sphere/plane ---------------------------------------------------------------

def test_sphere_center_in_plane():
    c = sphere_plane_circle(Sphere3((0.0, 3.0, -4.0), 5.0), "x")
    assert c.center == (3.0, -4.0)
    assert c.radius == 5.0


def test_sphere_three_four_five():
    c = sphere_plane_circle(Sphere3((3.0, 1.0, 2.0), 5.0), "x")
    assert c.radius == pytest.approx(4.0, abs=1e-12)
    assert c.center == (1.0, 2.0)


def test_sphere_misses_plane():
    with pytest.raises(NoIntersection):
        sphere_plane_circle(Sphere3((6.0, 0.0, 0.0), 5.0), "x")


def test_sphere_projection_pythagoras():
    rng = np.random.default_rng(12)
    for _ in range(300):
        center = rng.uniform(-10, 10, 3)
        radius = rng.uniform(0.5, 20.0)
        axis = "xyz"[rng.integers(3)]
        offset = {"x": center[0], "y": center[1], "z": center[2]}[axis]
        dist = offset - rng.uniform(-radius, radius)
        c = sphere_plane_circle(Sphere3(tuple(center), radius), axis, dist)
        gap = {"x": center[0], "y": center[1], "z": center[2]}[axis] - dist
        assert c.radius**2 + gap**2 == pytest.approx(radius**2, rel=1e-12)


def test_sphere_plane_other_axes():
    c = sphere_plane_circle(Sphere3((1.0, 3.0, 2.0), 5.0), "y")
    assert c.center == (1.0, 2.0)
    assert c.radius == pytest.approx(4.0, abs=1e-12)
    c = sphere_plane_circle(Sphere3((1.0, 2.0, 4.0), 5.0), "z")
    assert c.center == (1.0, 2.0)
    assert c.radius == pytest.approx(3.0, abs=1e-12)


# --- circle/circle ---------------------------------------------------------------

def test_unit_circles_equilateral():
    p1, p2 = circle_circle_intersect(Circle2((0.0, 0.0), 1.0), Circle2((1.0, 0.0), 1.0))
    ys = sorted((p1[1], p2[1]))
    assert p1[0] == pytest.approx(0.5, abs=1e-12)
    assert p2[0] == pytest.approx(0.5, abs=1e-12)
    assert ys[0] == pytest.approx(-math.sqrt(3) / 2, abs=1e-12)
    assert ys[1] == pytest.approx(math.sqrt(3) / 2, abs=1e-12)


def test_five_five_eight():
    p1, p2 = circle_circle_intersect(Circle2((0.0, 0.0), 5.0), Circle2((8.0, 0.0), 5.0))
    assert p1[0] == pytest.approx(4.0, abs=1e-12)
    assert p2[0] == pytest.approx(4.0, abs=1e-12)
    assert sorted((p1[1], p2[1])) == pytest.approx([-3.0, 3.0], abs=1e-12)


def test_concentric_rejected():
    with pytest.raises(ConcentricCircles):
        circle_circle_intersect(Circle2((0.0, 0.0), 1.0), Circle2((0.0, 0.0), 2.0))


def test_disjoint_and_contained():
    with pytest.raises(DisjointCircles):
        circle_circle_intersect(Circle2((0.0, 0.0), 1.0), Circle2((5.0, 0.0), 1.0))
    with pytest.raises(ContainedCircles):
        circle_circle_intersect(Circle2((0.0, 0.0), 5.0), Circle2((0.5, 0.0), 1.0))


def test_tangent_circles_coincide():
    p1, p2 = circle_circle_intersect(Circle2((0.0, 0.0), 1.0), Circle2((2.0, 0.0), 1.0))
    assert p1 == pytest.approx(p2, abs=1e-9)
    assert p1 == pytest.approx((1.0, 0.0), abs=1e-9)


def test_random_pairs_satisfy_both_circles():
    rng = np.random.default_rng(13)
    checked = 0
    while checked < 2000:
        c1 = rng.uniform(-50, 50, 2)
        r1 = rng.uniform(0.1, 40.0)
        theta = rng.uniform(0, 2 * math.pi)
        d = rng.uniform(0.05, r1 * 1.9)
        c2 = c1 + d * np.array([math.cos(theta), math.sin(theta)])
        r2 = rng.uniform(max(d - r1, r1 - d, 0) + 1e-3, d + r1 - 1e-3)
        points = circle_circle_intersect(Circle2(tuple(c1), r1), Circle2(tuple(c2), r2))
        for p in points:
            assert abs(math.dist(p, c1) - r1) < 1e-9
            assert abs(math.dist(p, c2) - r2) < 1e-9
        checked += 1


# --- feasible intersection --------------------------------------------------------

def _point_at(pivot, radius, angle_deg):
    a = math.radians(angle_deg)
    return (pivot[0] + radius * math.sin(a), pivot[1] - radius * math.cos(a))


def test_single_feasible_point_wins():
    pivot = (0.0, 0.0)
    pts = (_point_at(pivot, 10, 20.0), _point_at(pivot, 10, 160.0))
    chosen = pick_feasible_intersection(pts, pivot, (-90.0, 90.0))
    assert chosen == pts[0]


def test_tie_breaks_negative():
    pivot = (-3.0, 7.0)
    pts = (_point_at(pivot, 10, 10.0), _point_at(pivot, 10, -10.0))
    chosen = pick_feasible_intersection(pts, pivot, (-90.0, 90.0))
    assert math.degrees(horn_angle(chosen, pivot)) == pytest.approx(-10.0, abs=1e-12)


def test_both_outside_rom():
    pivot = (0.0, 0.0)
    pts = (_point_at(pivot, 10, 120.0), _point_at(pivot, 10, 170.0))
    with pytest.raises(NoFeasibleSolution):
        pick_feasible_intersection(pts, pivot, (-90.0, 90.0))


def test_smaller_magnitude_wins_when_both_feasible():
    pivot = (0.0, 0.0)
    pts = (_point_at(pivot, 10, 45.0), _point_at(pivot, 10, -30.0))
    chosen = pick_feasible_intersection(pts, pivot, (-90.0, 90.0))
    assert math.degrees(horn_angle(chosen, pivot)) == pytest.approx(-30.0, abs=1e-12)


def test_horn_angle_convention():
    assert horn_angle((0.0, -5.0), (0.0, 0.0)) == 0.0
    assert horn_angle((5.0, 0.0), (0.0, 0.0)) == pytest.approx(math.pi / 2)
    assert horn_angle((-5.0, 0.0), (0.0, 0.0)) == pytest.approx(-math.pi / 2)
