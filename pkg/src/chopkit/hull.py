"""Incremental 3D convex hull with epsilon-thick plane tests.

Quickhull-style construction sized for desk-scale point sets (<= ~1e5
points): start from an extreme tetrahedron, repeatedly lift the furthest
conflict point of a face and re-triangulate the visible patch along its
horizon.  Plane tests treat points within PLANE_EPS (mm) of a face as on
the face, which keeps coplanar inputs (cube faces, workspace shells) from
producing sliver faces.

Faces are index triples into the hull's compacted vertex array, oriented
outward (counterclockwise seen from outside).  Volume is a signed
tetrahedron sum about the vertex centroid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput

PLANE_EPS = 1e-9  # mm


@dataclass(frozen=True)
class ConvexHull3:
    vertices: np.ndarray  # (V, 3) float
    faces: np.ndarray     # (F, 3) int, outward-oriented
    volume: float

    def signed_distances(self, points) -> np.ndarray:
        """Max signed plane distance per point; <= 0 means inside or on."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a = self.vertices[self.faces[:, 0]]
        b = self.vertices[self.faces[:, 1]]
        c = self.vertices[self.faces[:, 2]]
        normals = np.cross(b - a, c - a)
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        offsets = np.einsum("ij,ij->i", normals, a)
        return (pts @ normals.T - offsets).max(axis=1)

    def contains(self, points, tol: float = PLANE_EPS) -> bool:
        return bool(np.all(self.signed_distances(points) <= tol))


class _Face:
    __slots__ = ("a", "b", "c", "normal", "offset", "outside", "alive")

    def __init__(self, a, b, c, normal, offset):
        self.a, self.b, self.c = a, b, c
        self.normal = normal
        self.offset = offset
        self.outside: list[int] = []
        self.alive = True

    def edges(self):
        return ((self.a, self.b), (self.b, self.c), (self.c, self.a))


def _make_face(pts, a, b, c, interior):
    normal = np.cross(pts[b] - pts[a], pts[c] - pts[a])
    norm = np.linalg.norm(normal)
    if norm <= 0.0:
        return None
    normal = normal / norm
    offset = float(normal @ pts[a])
    if float(normal @ interior) - offset > 0.0:
        a, b, c = a, c, b
        normal = -normal
        offset = float(normal @ pts[a])
    return _Face(a, b, c, normal, offset)


def _initial_simplex(pts, eps):
    n = len(pts)
    extremes = set()
    for axis in range(3):
        extremes.add(int(np.argmin(pts[:, axis])))
        extremes.add(int(np.argmax(pts[:, axis])))
    extremes = sorted(extremes)
    best, pair = -1.0, None
    for i in extremes:
        for j in extremes:
            d = float(np.linalg.norm(pts[i] - pts[j]))
            if d > best:
                best, pair = d, (i, j)
    if best <= eps:
        raise DegenerateInput("all points coincide within tolerance")
    i, j = pair
    axis = pts[j] - pts[i]
    axis_len = np.linalg.norm(axis)
    rel = pts - pts[i]
    line_dist = np.linalg.norm(np.cross(rel, axis), axis=1) / axis_len
    k = int(np.argmax(line_dist))
    if line_dist[k] <= eps:
        raise DegenerateInput("points are collinear within tolerance")
    normal = np.cross(pts[j] - pts[i], pts[k] - pts[i])
    normal /= np.linalg.norm(normal)
    plane_dist = rel @ normal
    m = int(np.argmax(np.abs(plane_dist)))
    if abs(plane_dist[m]) <= eps:
        raise DegenerateInput("points are coplanar within tolerance")
    return i, j, k, m


def convex_hull(points, eps: float = PLANE_EPS) -> ConvexHull3:
    """Convex hull of >= 4 affinely independent 3D points.

    Raises DegenerateInput for coincident / collinear / coplanar input.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"points must be (n, 3), got {pts.shape}")
    if len(pts) < 4:
        raise DegenerateInput(f"need at least 4 points, got {len(pts)}")

    i, j, k, m = _initial_simplex(pts, eps)
    interior = pts[[i, j, k, m]].mean(axis=0)
    faces = [f for f in (
        _make_face(pts, i, j, k, interior),
        _make_face(pts, i, j, m, interior),
        _make_face(pts, i, k, m, interior),
        _make_face(pts, j, k, m, interior),
    ) if f is not None]
    if len(faces) != 4:
        raise DegenerateInput("initial simplex is flat within tolerance")

    used = {i, j, k, m}
    for idx in range(len(pts)):
        if idx in used:
            continue
        for face in faces:
            if float(face.normal @ pts[idx]) - face.offset > eps:
                face.outside.append(idx)
                break

    stack = [f for f in faces if f.outside]
    guard = 0
    while stack:
        guard += 1
        if guard > 8 * len(pts) + 64:
            raise RuntimeError("convex hull failed to terminate")
        face = stack.pop()
        if not face.alive or not face.outside:
            continue
        dists = [float(face.normal @ pts[q]) - face.offset for q in face.outside]
        apex = face.outside[int(np.argmax(dists))]
        p = pts[apex]

        visible = [f for f in faces if f.alive and float(f.normal @ p) - f.offset > eps]
        if not visible:
            face.outside = [q for q in face.outside if q != apex]
            if face.outside:
                stack.append(face)
            continue
        visible_edges = set()
        for f in visible:
            visible_edges.update(f.edges())
        horizon = [e for e in visible_edges if (e[1], e[0]) not in visible_edges]

        orphans = set()
        for f in visible:
            orphans.update(f.outside)
            f.alive = False
            f.outside = []
        orphans.discard(apex)

        new_faces = []
        for (u, v) in horizon:
            nf = _make_face(pts, u, v, apex, interior)
            if nf is not None:
                new_faces.append(nf)
        for q in orphans:
            for nf in new_faces:
                if float(nf.normal @ pts[q]) - nf.offset > eps:
                    nf.outside.append(q)
                    break
        faces.extend(new_faces)
        stack.extend(nf for nf in new_faces if nf.outside)

    alive = [f for f in faces if f.alive]
    used_idx = sorted({v for f in alive for v in (f.a, f.b, f.c)})
    remap = {old: new for new, old in enumerate(used_idx)}
    vertices = pts[used_idx].copy()
    face_idx = np.array([[remap[f.a], remap[f.b], remap[f.c]] for f in alive], dtype=int)

    centroid = vertices.mean(axis=0)
    a = vertices[face_idx[:, 0]] - centroid
    b = vertices[face_idx[:, 1]] - centroid
    c = vertices[face_idx[:, 2]] - centroid
    volume = float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)
    return ConvexHull3(vertices=vertices, faces=face_idx, volume=volume)


def hull_to_off(hull: ConvexHull3) -> str:
    """Serialize a hull as an OFF triangle mesh (plain text, plottable)."""
    lines = ["OFF", f"{len(hull.vertices)} {len(hull.faces)} 0"]
    for v in hull.vertices:
        lines.append(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for f in hull.faces:
        lines.append(f"3 {f[0]} {f[1]} {f[2]}")
    return "\n".join(lines) + "\n"


def save_hull_off(hull: ConvexHull3, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(hull_to_off(hull))


def hull_edge_count(hull: ConvexHull3) -> int:
    edges = set()
    for a, b, c in hull.faces:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return len(edges)
