"""Bounded Voronoi tessellation of a convex arena."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from swarmcover._backend import kernels
from swarmcover.geom2d import TOL, ConvexPolygon, GeometryError, Vec2, polygon_area


class DuplicateGeneratorError(GeometryError):
    def __init__(self, i: int, j: int, distance: float):
        super().__init__(f"generators {i} and {j} are {distance:.3g} apart (minimum {TOL})")
        self.pair = (i, j)


class GeneratorOutsideError(GeometryError):
    def __init__(self, i: int, point):
        super().__init__(f"generator {i} at ({point[0]:.6g}, {point[1]:.6g}) lies outside the arena")
        self.index = i


@dataclass(frozen=True)
class VoronoiDiagram:
    """One cell per generator, index-aligned with the generator list."""

    generators: tuple[Vec2, ...]
    cells: tuple[ConvexPolygon, ...]

    def __len__(self) -> int:
        return len(self.cells)

    def total_area(self) -> float:
        return sum(polygon_area(c) for c in self.cells)

    def owner(self, q) -> int:
        """Index of the nearest generator to ``q`` (lowest index on ties)."""
        g = np.array([p.as_tuple() for p in self.generators])
        d = np.hypot(g[:, 0] - q[0], g[:, 1] - q[1])
        return int(np.argmin(d))


def check_generators(generators, arena: ConvexPolygon) -> np.ndarray:
    """Validate a generator set and return it as an ``(n, 2)`` array.

    Raises:
        DuplicateGeneratorError: two generators closer than ``TOL``.
        GeneratorOutsideError: a generator outside ``arena``.
    """
    g = np.array([tuple(p) for p in generators], dtype=float).reshape(-1, 2)
    n = len(g)
    if n:
        diff = g[:, None, :] - g[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        dist[np.arange(n), np.arange(n)] = np.inf
        i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
        if dist[i, j] <= TOL:
            i, j = sorted((int(i), int(j)))
            raise DuplicateGeneratorError(i, j, float(dist[i, j]))
        outside = np.flatnonzero(np.any(arena.signed_distances(g) < -TOL, axis=1))
        if len(outside):
            raise GeneratorOutsideError(int(outside[0]), g[outside[0]])
    return g


def voronoi_cells(generators: Sequence, arena: ConvexPolygon) -> VoronoiDiagram:
    """Voronoi diagram of ``generators`` restricted to ``arena``.

    Cell ``i`` is ``arena`` clipped by the bisector half-plane facing generator
    ``i`` for every other generator; points on a bisector belong to both cells.
    """
    g = check_generators(generators, arena)
    cells = kernels.voronoi_cells(g, arena.as_array())
    return VoronoiDiagram(
        generators=tuple(Vec2(float(x), float(y)) for x, y in g),
        cells=tuple(ConvexPolygon.from_array(c) for c in cells),
    )
