"""Reciprocal collision avoidance: truncated velocity-obstacle cones, ORCA half-planes
and the velocity program that picks the permitted velocity nearest the preferred one.

Velocities are relative velocities ``v_A - v_B`` unless stated otherwise, and the
cone for agent A is built from the relative position ``x_B - x_A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, NamedTuple, Sequence

import numpy as np

from swarmcover._backend import kernels
from swarmcover.geom2d import GeometryError, HalfPlane, Vec2, as_vec


@dataclass(frozen=True)
class TruncatedCone:
    """Velocity obstacle of A induced by B for the horizon ``tau``.

    The cone has its apex at the velocity-space origin, legs tangent to the
    disc ``D(p, R)`` and is truncated by ``D(p / tau, R / tau)``. ``leg_left``
    and ``leg_right`` are ``None`` when the agents already overlap.
    """

    relative_position: Vec2
    combined_radius: float
    tau: float
    disc_center: Vec2
    disc_radius: float
    leg_left: Vec2 | None
    leg_right: Vec2 | None
    apex: Vec2 = Vec2(0.0, 0.0)

    @property
    def overlapping(self) -> bool:
        return self.leg_left is None

    def member(self, v) -> bool:
        """True iff ``t v`` enters the open disc ``D(p, R)`` for some ``t`` in ``(0, tau]``."""
        v = as_vec(v)
        p = self.relative_position
        r2 = self.combined_radius**2
        vv = v.dot(v)
        t = v.dot(p) / vv if vv > 0.0 else 0.0
        if t <= 0.0:
            return p.dot(p) < r2
        t = min(t, self.tau)
        return (v * t - p).dot(v * t - p) < r2


class AvoidanceConstraint(NamedTuple):
    halfplane: HalfPlane
    w: Vec2
    source_agent: Hashable = None


class PermittedVelocity(NamedTuple):
    velocity: Vec2
    feasible: bool


def velocity_obstacle(xA, xB, rA: float, rB: float, tau: float) -> TruncatedCone:
    """Build the truncated collision cone of A induced by B.

    Raises:
        GeometryError: if the two positions coincide or ``tau`` is not positive.
    """
    if not tau > 0:
        raise GeometryError(f"time horizon must be positive, got {tau}")
    p = as_vec(xB) - as_vec(xA)
    dist = p.norm()
    if dist == 0.0:
        raise GeometryError("coincident positions leave the cone axis undefined")
    R = rA + rB
    left = right = None
    if dist > R:
        leg = math.sqrt(dist * dist - R * R)
        left = Vec2(p.x * leg - p.y * R, p.x * R + p.y * leg) / (dist * dist)
        right = Vec2(p.x * leg + p.y * R, -p.x * R + p.y * leg) / (dist * dist)
    return TruncatedCone(
        relative_position=p,
        combined_radius=R,
        tau=tau,
        disc_center=p / tau,
        disc_radius=R / tau,
        leg_left=left,
        leg_right=right,
    )


def closest_boundary_adjustment(cone: TruncatedCone, v_rel, dt_recover: float | None = None) -> tuple[Vec2, Vec2]:
    """Return ``(w, n)``: ``v_rel + w`` is the nearest point of the cone boundary and
    ``n`` the outward unit normal there.

    A relative velocity exactly at the truncation-disc center resolves to the
    left (counterclockwise) leg. For overlapping agents the boundary is that of
    ``D(p / dt_recover, R / dt_recover)`` (``dt_recover`` defaults to ``tau``),
    whose exterior separates the agents within ``dt_recover``.
    """
    v = as_vec(v_rel)
    p = cone.relative_position
    dt = cone.tau if dt_recover is None else dt_recover
    wx, wy, nx, ny = kernels.orca_adjust(p.x, p.y, v.x, v.y, cone.combined_radius, cone.tau, dt)
    return Vec2(wx, wy), Vec2(nx, ny)


def orca_halfplane(cone: TruncatedCone, vA, vB, source_agent: Hashable = None, dt_recover: float | None = None) -> AvoidanceConstraint:
    """Permitted velocities of A under shared responsibility: ``(v - (vA + w/2)) . n >= 0``."""
    vA = as_vec(vA)
    w, n = closest_boundary_adjustment(cone, vA - as_vec(vB), dt_recover)
    return AvoidanceConstraint(HalfPlane(vA + w * 0.5, n), w, source_agent)


def halfplane_rows(halfplanes: Sequence[HalfPlane]) -> np.ndarray:
    return np.array(
        [(h.point.x, h.point.y, h.normal.x, h.normal.y) for h in halfplanes], dtype=float
    ).reshape(-1, 4)


def permitted_velocity(
    constraints: Sequence[AvoidanceConstraint],
    v_max: float,
    v_pref,
    fixed: Sequence[HalfPlane] = (),
) -> PermittedVelocity:
    """Velocity nearest ``v_pref`` inside ``D(0, v_max)`` and every constraint half-plane.

    ``fixed`` half-planes are hard (never relaxed) and must admit the zero
    velocity. When the program is infeasible the returned velocity minimises
    the largest violation of the avoidance constraints, and ``feasible`` is
    False.
    """
    if not v_max > 0:
        raise ValueError(f"v_max must be positive, got {v_max}")
    v_pref = as_vec(v_pref)
    rows = halfplane_rows(list(fixed) + [c.halfplane for c in constraints])
    vx, vy, ok = kernels.solve_lp(rows, len(fixed), v_max, v_pref.x, v_pref.y)
    return PermittedVelocity(Vec2(vx, vy), bool(ok))
