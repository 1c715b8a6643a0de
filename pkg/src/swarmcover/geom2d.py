"""2D geometry primitives: vectors, convex polygons, half-planes and polygon moments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from swarmcover._backend import kernels

TOL = 1e-9


class GeometryError(ValueError):
    """Raised for invalid or degenerate geometric input."""


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite vector ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> Vec2:
        return Vec2(self.x / s, self.y / s)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def perp(self) -> Vec2:
        """Counterclockwise perpendicular."""
        return Vec2(-self.y, self.x)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise GeometryError("cannot normalise the zero vector")
        return Vec2(self.x / n, self.y / n)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def as_vec(p) -> Vec2:
    if isinstance(p, Vec2):
        return p
    return Vec2(float(p[0]), float(p[1]))


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane ``{p : (p - point) . normal >= 0}``; ``normal`` is unit length."""

    point: Vec2
    normal: Vec2

    def __post_init__(self):
        if abs(self.normal.norm() - 1.0) > 1e-12:
            raise GeometryError(f"half-plane normal must be unit length, got {self.normal}")

    @classmethod
    def through(cls, point, direction) -> HalfPlane:
        """Half-plane through ``point`` whose permitted side lies along ``direction``."""
        return cls(as_vec(point), as_vec(direction).unit())

    def signed_distance(self, p) -> float:
        p = as_vec(p)
        return (p - self.point).dot(self.normal)

    def contains(self, p, tol: float = 0.0) -> bool:
        return self.signed_distance(p) >= -tol


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon stored as a counterclockwise vertex tuple.

    An empty vertex tuple is the empty polygon. The plain constructor trusts its
    input; use :meth:`checked` for untrusted vertex lists.
    """

    vertices: tuple[Vec2, ...] = ()

    @classmethod
    def empty(cls) -> ConvexPolygon:
        return cls(())

    @classmethod
    def from_array(cls, arr) -> ConvexPolygon:
        arr = np.asarray(arr, dtype=float).reshape(-1, 2)
        if len(arr) == 0:
            return cls(())
        return cls(tuple(Vec2(float(x), float(y)) for x, y in arr))

    @classmethod
    def checked(cls, points: Iterable) -> ConvexPolygon:
        """Validate and normalise a vertex list (clockwise input is reversed).

        Raises :class:`GeometryError` naming the offending vertex when the
        polygon is not strictly convex or has repeated vertices.
        """
        pts = [as_vec(p) for p in points]
        if len(pts) < 3:
            raise GeometryError(f"polygon needs at least 3 vertices, got {len(pts)}")
        m = len(pts)
        for i in range(m):
            if (pts[(i + 1) % m] - pts[i]).norm() < TOL:
                raise GeometryError(f"vertices {i} and {(i + 1) % m} coincide at {pts[i].as_tuple()}")
        signed = 0.5 * sum(pts[i].cross(pts[(i + 1) % m]) for i in range(m))
        if abs(signed) < TOL:
            raise GeometryError("polygon has zero area")
        if signed < 0:
            pts.reverse()
        for i in range(m):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % m]
            if (b - a).cross(c - b) < -TOL:
                raise GeometryError(f"polygon is not convex: reflex vertex {i} at {b.as_tuple()}")
        return cls(tuple(pts))

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def _array(self) -> np.ndarray:
        if self.is_empty:
            arr = np.empty((0, 2))
        else:
            arr = np.array([(v.x, v.y) for v in self.vertices], dtype=float)
        arr.flags.writeable = False
        return arr

    def as_array(self) -> np.ndarray:
        return self._array

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge start points and inward unit normals as ``(k, 2)`` arrays."""
        a = self._array
        d = np.roll(a, -1, axis=0) - a
        d /= np.hypot(d[:, 0], d[:, 1])[:, None]
        normals = np.column_stack((-d[:, 1], d[:, 0]))
        for arr in (a, normals):
            arr.flags.writeable = False
        return a, normals

    def signed_distances(self, points) -> np.ndarray:
        """``(n, k)`` signed distances of points to the edge lines, positive inside."""
        a, normals = self.edge_arrays
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return pts @ normals.T - np.einsum("kj,kj->k", a, normals)[None, :]

    def edges(self) -> list[tuple[Vec2, Vec2]]:
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def inward_halfplanes(self) -> list[HalfPlane]:
        """One half-plane per edge; their intersection is the polygon."""
        return [HalfPlane(a, (b - a).unit().perp()) for a, b in self.edges()]

    def bounds(self) -> tuple[float, float, float, float]:
        arr = self.as_array()
        return float(arr[:, 0].min()), float(arr[:, 1].min()), float(arr[:, 0].max()), float(arr[:, 1].max())


def clip_halfplane(poly: ConvexPolygon, hp: HalfPlane) -> ConvexPolygon:
    """Intersect ``poly`` with ``hp``; an empty result is returned as the empty polygon."""
    if poly.is_empty:
        return poly
    out = kernels.clip(poly.as_array(), hp.point.x, hp.point.y, hp.normal.x, hp.normal.y)
    return ConvexPolygon.from_array(out)


def polygon_area(poly: ConvexPolygon) -> float:
    if poly.is_empty:
        return 0.0
    return kernels.area_centroid(poly.as_array())[0]


def polygon_centroid(poly: ConvexPolygon) -> Vec2:
    """Centroid of a polygon with positive area.

    Raises:
        GeometryError: if the polygon is empty or has zero area.
    """
    if poly.is_empty:
        raise GeometryError("empty polygon has no centroid")
    area, cx, cy = kernels.area_centroid(poly.as_array())
    if not area > 0.0:
        raise GeometryError("degenerate polygon has no centroid")
    return Vec2(cx, cy)


def quadratic_moment(poly: ConvexPolygon, p) -> float:
    """Exact integral of ``|p - q|^2`` over the polygon."""
    if poly.is_empty:
        return 0.0
    p = as_vec(p)
    return kernels.second_moment(poly.as_array(), p.x, p.y)


def contains(poly: ConvexPolygon, p, tol: float = TOL) -> bool:
    """Point-in-polygon; boundary points count as inside."""
    if poly.is_empty:
        return False
    p = as_vec(p)
    for a, b in poly.edges():
        if (b - a).cross(p - a) < -tol * (b - a).norm():
            return False
    return True


def _segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ab = b - a
    t = (p - a).dot(ab) / ab.dot(ab)
    t = min(1.0, max(0.0, t))
    return (p - (a + ab * t)).norm()


def distance_to_boundary(poly: ConvexPolygon, p) -> float:
    """Distance from an interior point to the nearest edge.

    Raises:
        GeometryError: if ``p`` lies outside the polygon.
    """
    p = as_vec(p)
    if not contains(poly, p):
        raise GeometryError(f"point {p.as_tuple()} lies outside the polygon")
    return min(_segment_distance(p, a, b) for a, b in poly.edges())


def closest_point(poly: ConvexPolygon, p) -> Vec2:
    """``p`` itself when inside, otherwise the nearest boundary point."""
    p = as_vec(p)
    if contains(poly, p, tol=0.0):
        return p
    best, best_d = p, math.inf
    for a, b in poly.edges():
        ab = b - a
        t = min(1.0, max(0.0, (p - a).dot(ab) / ab.dot(ab)))
        q = a + ab * t
        d = (p - q).norm()
        if d < best_d:
            best, best_d = q, d
    return best
