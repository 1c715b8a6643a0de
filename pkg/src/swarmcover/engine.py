"""Multi-swarm simulation loop.

Every iteration, each agent computes its preferred (Lloyd) velocity from its own
swarm's Voronoi diagram, estimates every other agent's preferred velocity the same
way, builds one ORCA half-plane per other agent and picks the permitted velocity
nearest its preferred one. All agents are evaluated against the same position
snapshot and then moved simultaneously.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from swarmcover._backend import kernels
from swarmcover.coverage import cell_statistics
from swarmcover.geom2d import ConvexPolygon, GeometryError, Vec2, as_vec, closest_point
from swarmcover.voronoi import check_generators

COLLISION_TOL = 1e-9
CONVERGED_STREAK = 10


class Termination(str, enum.Enum):
    RUNNING = "running"
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class Agent:
    id: int
    swarm_id: int
    position: Vec2
    radius: float
    gain: float = 1.0
    v_max: float = 3.0
    # gain this agent assumes for every other agent; defaults to its own
    assumed_peer_gain: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", as_vec(self.position))
        if self.assumed_peer_gain is None:
            object.__setattr__(self, "assumed_peer_gain", self.gain)
        for name in ("radius", "gain", "v_max", "assumed_peer_gain"):
            if not getattr(self, name) > 0:
                raise ValueError(f"agent {self.id}: {name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class StepReport:
    new_velocities: tuple[Vec2, ...]
    infeasible_agents: tuple[int, ...]
    min_separation: float
    # (id_a, id_b, clearance) for every pair that overlapped during the step
    collisions: tuple[tuple[int, int, float], ...] = ()


@dataclass(frozen=True)
class _Snapshot:
    ids: np.ndarray
    swarm_of: np.ndarray
    pos: np.ndarray
    radii: np.ndarray
    gains: np.ndarray
    peer_gains: np.ndarray
    vmax: np.ndarray
    offsets: np.ndarray  # CM - x per agent, each from its own swarm's diagram
    costs: tuple[float, ...]  # coverage cost per swarm, unit density


@dataclass(frozen=True)
class WorldState:
    arena: ConvexPolygon
    swarms: tuple[tuple[Agent, ...], ...]
    time_step: float = 0.1
    tau: float | None = None
    iteration: int = 0
    avoidance_enabled: bool = True
    # max centroid offsets of the preceding states, most recent last
    offset_history: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.tau is None:
            object.__setattr__(self, "tau", self.time_step)
        if not (self.time_step > 0 and self.tau > 0):
            raise ValueError("time_step and tau must be positive")
        if not self.swarms or any(len(s) == 0 for s in self.swarms):
            raise ValueError("need at least one swarm, each with at least one agent")
        object.__setattr__(self, "swarms", tuple(tuple(s) for s in self.swarms))

    @property
    def agents(self) -> list[Agent]:
        return [a for s in self.swarms for a in s]

    def positions(self) -> np.ndarray:
        return self.snapshot.pos.copy()

    @cached_property
    def snapshot(self) -> _Snapshot:
        agents = self.agents
        pos = np.array([a.position.as_tuple() for a in agents], dtype=float)
        swarm_of = np.array([k for k, s in enumerate(self.swarms) for _ in s], dtype=int)
        offsets = np.empty_like(pos)
        costs = []
        for k in range(len(self.swarms)):
            idx = np.flatnonzero(swarm_of == k)
            check_generators(pos[idx], self.arena)
            _, cents, moments = cell_statistics(pos[idx], self.arena)
            offsets[idx] = cents - pos[idx]
            costs.append(float(moments.sum()))
        return _Snapshot(
            ids=np.array([a.id for a in agents]),
            swarm_of=swarm_of,
            pos=pos,
            radii=np.array([a.radius for a in agents], dtype=float),
            gains=np.array([a.gain for a in agents], dtype=float),
            peer_gains=np.array([a.assumed_peer_gain for a in agents], dtype=float),
            vmax=np.array([a.v_max for a in agents], dtype=float),
            offsets=offsets,
            costs=tuple(costs),
        )

    def max_offset(self) -> float:
        """Largest distance from an agent to its own cell centroid."""
        return float(np.max(np.hypot(self.snapshot.offsets[:, 0], self.snapshot.offsets[:, 1])))

    def preferred_velocities(self) -> np.ndarray:
        s = self.snapshot
        return s.gains[:, None] * s.offsets

    def index_of(self, swarm: int, agent: int) -> int:
        if not (0 <= swarm < len(self.swarms) and 0 <= agent < len(self.swarms[swarm])):
            raise IndexError(f"no agent {agent} in swarm {swarm}")
        return sum(len(s) for s in self.swarms[:swarm]) + agent


def estimate_peer_velocity(peer: Agent, peer_swarm_positions, arena: ConvexPolygon, assumed_gain: float | None = None) -> Vec2:
    """Preferred velocity of ``peer`` as reconstructed by an observer.

    The observer recomputes the peer swarm's Voronoi diagram and applies the
    Lloyd law with ``assumed_gain`` (the peer's own gain when omitted).
    """
    g = check_generators(peer_swarm_positions, arena)
    d = np.hypot(g[:, 0] - peer.position.x, g[:, 1] - peer.position.y)
    k = int(np.argmin(d))
    if d[k] > 1e-12:
        raise ValueError(f"agent {peer.id} is not among the given swarm positions")
    _, cents, _ = kernels.cell_stats(g, arena.as_array())
    c = peer.gain if assumed_gain is None else assumed_gain
    return Vec2(c * (cents[k, 0] - g[k, 0]), c * (cents[k, 1] - g[k, 1]))


def _boundary_rows(world: WorldState, i: int) -> np.ndarray:
    # keep the disc inside the arena; never excludes v = 0
    s = world.snapshot
    r = s.radii[i]
    d = world.arena.signed_distances(s.pos[i])[0]
    near = d < s.vmax[i] * world.time_step + r
    _, normals = world.arena.edge_arrays
    slack = np.maximum(d[near] - r, 0.0) / world.time_step
    n = normals[near]
    return np.column_stack((-n * slack[:, None], n))


def _solve_agent(world: WorldState, i: int, v_pref: np.ndarray) -> tuple[float, float, bool]:
    s = world.snapshot
    vx, vy = float(v_pref[i, 0]), float(v_pref[i, 1])
    if not world.avoidance_enabled:
        return vx, vy, True
    fixed = _boundary_rows(world, i)
    est = s.peer_gains[i] * s.offsets
    # recovering from an overlap takes one step
    rows = kernels.orca_rows(s.pos, s.radii, est, i, vx, vy, world.tau, world.time_step)
    return kernels.solve_lp(np.vstack((fixed, rows)), len(fixed), s.vmax[i], vx, vy)


def agent_velocity(world: WorldState, swarm: int, agent: int) -> Vec2:
    """Collision-free velocity of one agent for the current iteration."""
    i = world.index_of(swarm, agent)
    vx, vy, _ = _solve_agent(world, i, world.preferred_velocities())
    return Vec2(vx, vy)


def _clamp_inside(world: WorldState, pos: np.ndarray) -> np.ndarray:
    bad = np.flatnonzero(np.any(world.arena.signed_distances(pos) < 0.0, axis=1))
    if len(bad) == 0:
        return pos
    pos = pos.copy()
    for i in bad:
        pos[i] = closest_point(world.arena, pos[i]).as_tuple()
    return pos


def step(world: WorldState) -> tuple[WorldState, StepReport]:
    """Advance every agent by one time step from a common snapshot."""
    s = world.snapshot
    v_pref = world.preferred_velocities()
    n = len(s.pos)
    vel = np.empty((n, 2))
    infeasible = []
    for i in range(n):
        vx, vy, ok = _solve_agent(world, i, v_pref)
        vel[i] = vx, vy
        if not ok:
            infeasible.append(int(s.ids[i]))
    new_pos = _clamp_inside(world, s.pos + vel * world.time_step)

    clear = kernels.pair_clearance(s.pos, new_pos, s.radii)
    collisions = []
    min_sep = math.inf
    if len(clear):
        min_sep = float(clear.min())
        if min_sep < -COLLISION_TOL:
            k = 0
            for i in range(n):
                for j in range(i + 1, n):
                    if clear[k] < -COLLISION_TOL:
                        collisions.append((int(s.ids[i]), int(s.ids[j]), float(clear[k])))
                    k += 1

    it = iter(new_pos.tolist())
    swarms = tuple(tuple(replace(a, position=Vec2(*next(it))) for a in sw) for sw in world.swarms)
    history = (world.offset_history + (world.max_offset(),))[-(CONVERGED_STREAK - 1):]
    new_world = replace(world, swarms=swarms, iteration=world.iteration + 1, offset_history=history)
    report = StepReport(
        new_velocities=tuple(Vec2(float(a), float(b)) for a, b in vel),
        infeasible_agents=tuple(infeasible),
        min_separation=min_sep,
        collisions=tuple(collisions),
    )
    return new_world, report


def detect_collisions(world: WorldState) -> list[tuple[int, int]]:
    """Pairs of agent ids whose discs overlap (touching is not a collision)."""
    agents = world.agents
    out = []
    for i, a in enumerate(agents):
        for b in agents[i + 1:]:
            if (a.position - b.position).norm() < a.radius + b.radius - COLLISION_TOL:
                out.append((a.id, b.id))
    return out


def has_terminated(world: WorldState, eps: float, max_iters: int) -> Termination:
    """Converged once every agent has stayed within ``eps`` of its centroid for
    ten consecutive iterations; MaxIters once the iteration budget is spent."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    recent = world.offset_history[-(CONVERGED_STREAK - 1):] + (world.max_offset(),)
    if len(recent) >= CONVERGED_STREAK and max(recent) < eps:
        return Termination.CONVERGED
    if world.iteration >= max_iters:
        return Termination.MAX_ITERS
    return Termination.RUNNING


def make_world(
    arena: ConvexPolygon,
    swarm_positions,
    radius: float = 0.2,
    gain: float = 1.0,
    v_max: float = 3.0,
    dt: float = 0.1,
    tau: float | None = None,
    avoidance: bool = True,
    assumed_peer_gain: float | None = None,
) -> WorldState:
    """Convenience constructor: one list of positions per swarm, shared agent parameters."""
    swarms = []
    next_id = 0
    for k, positions in enumerate(swarm_positions):
        sw = []
        for p in positions:
            sw.append(Agent(next_id, k, as_vec(p), radius, gain, v_max, assumed_peer_gain))
            next_id += 1
        swarms.append(tuple(sw))
    world = WorldState(arena, tuple(swarms), dt, tau, 0, avoidance)
    for k, sw in enumerate(world.swarms):
        try:
            check_generators([a.position for a in sw], arena)
        except GeometryError as exc:
            raise GeometryError(f"swarm {k}: {exc}") from exc
    return world
