"""Coverage cost, cell mass and centroid, its gradient, and the Lloyd control law."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from swarmcover._backend import kernels
from swarmcover.geom2d import ConvexPolygon, GeometryError, Vec2, as_vec, polygon_area, polygon_centroid
from swarmcover.voronoi import check_generators


@dataclass(frozen=True)
class UniformDensity:
    value: float = 1.0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"density must be positive, got {self.value}")


# Only uniform density is supported; the alias keeps call sites density-agnostic.
DensityField = UniformDensity
UNIT_DENSITY = UniformDensity(1.0)


@dataclass(frozen=True)
class CoverageReport:
    cost: float
    masses: tuple[float, ...]
    centroids: tuple[Vec2, ...]


def cell_mass(cell: ConvexPolygon, phi: DensityField = UNIT_DENSITY) -> float:
    return phi.value * polygon_area(cell)


def cell_center_of_mass(cell: ConvexPolygon, phi: DensityField = UNIT_DENSITY) -> Vec2:
    """Center of mass of a cell. With uniform density this is the polygon centroid.

    Raises:
        GeometryError: for an empty or zero-area cell.
    """
    return polygon_centroid(cell)


def cell_statistics(positions, arena: ConvexPolygon) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Areas, centroids and second moments (about each generator) of the Voronoi cells.

    Unit density; no validation of ``positions``. This is the per-step hot path.
    """
    return kernels.cell_stats(np.asarray(positions, dtype=float).reshape(-1, 2), arena.as_array())


def coverage_report(positions: Sequence, arena: ConvexPolygon, phi: DensityField = UNIT_DENSITY) -> CoverageReport:
    g = check_generators(positions, arena)
    areas, cents, moments = cell_statistics(g, arena)
    if np.any(areas <= 0):
        raise GeometryError("degenerate Voronoi cell")
    return CoverageReport(
        cost=float(phi.value * moments.sum()),
        masses=tuple(float(phi.value * a) for a in areas),
        centroids=tuple(Vec2(float(x), float(y)) for x, y in cents),
    )


def coverage_cost(positions: Sequence, arena: ConvexPolygon, phi: DensityField = UNIT_DENSITY) -> float:
    """Integral over the arena of squared distance to the nearest agent, weighted by density."""
    return coverage_report(positions, arena, phi).cost


def coverage_gradient(positions: Sequence, arena: ConvexPolygon, phi: DensityField = UNIT_DENSITY) -> list[Vec2]:
    """Per-agent gradient of :func:`coverage_cost`: ``2 M_j (x_j - CM_j)``."""
    rep = coverage_report(positions, arena, phi)
    out = []
    for p, m, cm in zip(positions, rep.masses, rep.centroids):
        p = as_vec(p)
        out.append((p - cm) * (2.0 * m))
    return out


def lloyd_velocity(x, cm, c: float) -> Vec2:
    """Preferred velocity ``c (cm - x)``; vanishes at the centroid."""
    if not c > 0:
        raise ValueError(f"gain must be positive, got {c}")
    return (as_vec(cm) - as_vec(x)) * c
