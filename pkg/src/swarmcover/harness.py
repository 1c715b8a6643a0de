"""Running scenarios and seeded Monte Carlo campaigns."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from swarmcover.engine import Agent, Termination, WorldState, has_terminated, step
from swarmcover.geom2d import Vec2
from swarmcover.scenario import Scenario, ScenarioError, initial_positions

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """64-bit finaliser used to turn ``master_seed + run_index`` into a run seed."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def run_seed(master_seed: int, run_index: int) -> int:
    return splitmix64((master_seed + run_index) & _MASK64)


@dataclass(frozen=True)
class IterationRecord:
    """State after ``iteration`` steps.

    ``velocities`` are the ones that carried the agents here (zero for the
    initial record) and ``min_separation`` the smallest pair clearance during
    that step (the static clearance for the initial record).
    """

    iteration: int
    positions: np.ndarray
    velocities: np.ndarray
    costs: tuple[float, ...]
    min_separation: float


@dataclass
class TrajectoryLog:
    agent_ids: tuple[int, ...]
    swarm_ids: tuple[int, ...]
    radii: tuple[float, ...]
    records: list[IterationRecord] = field(default_factory=list)
    status: Termination = Termination.RUNNING
    # (iteration, id_a, id_b, clearance); iteration is the step's end
    collisions: list[tuple[int, int, int, float]] = field(default_factory=list)
    infeasible: int = 0
    avoidance_enabled: bool = True

    @property
    def iterations(self) -> int:
        return len(self.records) - 1

    @property
    def final_positions(self) -> np.ndarray:
        return self.records[-1].positions

    @property
    def min_separation(self) -> float:
        return min(r.min_separation for r in self.records)

    def swarm_positions(self, k: int, record: int = -1) -> np.ndarray:
        mask = np.array(self.swarm_ids) == k
        return self.records[record].positions[mask]


def _static_clearance(pos: np.ndarray, radii: np.ndarray) -> float:
    n = len(pos)
    if n < 2:
        return math.inf
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1]) - (radii[:, None] + radii[None, :])
    d[np.arange(n), np.arange(n)] = np.inf
    return float(d.min())


def build_world(s: Scenario, positions=None) -> WorldState:
    """World at iteration 0; ``positions`` (one list per swarm) overrides the scenario's."""
    if positions is None:
        positions = initial_positions(s)
    swarms = []
    next_id = 0
    for k, group in enumerate(positions):
        agents = []
        for p in group:
            agents.append(Agent(next_id, k, p, s.radius, s.gain, s.v_max, s.peer_gain))
            next_id += 1
        swarms.append(tuple(agents))
    return WorldState(
        arena=s.arena,
        swarms=tuple(swarms),
        time_step=s.dt,
        tau=s.horizon,
        avoidance_enabled=s.avoidance_enabled,
    )


def _record(world: WorldState, velocities: np.ndarray, min_sep: float) -> IterationRecord:
    snap = world.snapshot
    return IterationRecord(world.iteration, snap.pos.copy(), velocities, snap.costs, min_sep)


def run_world(world: WorldState, eps: float, max_iters: int) -> TrajectoryLog:
    snap = world.snapshot
    log_ = TrajectoryLog(
        agent_ids=tuple(int(i) for i in snap.ids),
        swarm_ids=tuple(int(k) for k in snap.swarm_of),
        radii=tuple(float(r) for r in snap.radii),
        avoidance_enabled=world.avoidance_enabled,
    )
    log_.records.append(_record(world, np.zeros_like(snap.pos), _static_clearance(snap.pos, snap.radii)))
    while (status := has_terminated(world, eps, max_iters)) is Termination.RUNNING:
        world, rep = step(world)
        vel = np.array([v.as_tuple() for v in rep.new_velocities])
        log_.records.append(_record(world, vel, rep.min_separation))
        log_.infeasible += len(rep.infeasible_agents)
        log_.collisions.extend((world.iteration, a, b, c) for a, b, c in rep.collisions)
    log_.status = status
    return log_


def run_scenario(s: Scenario, positions=None) -> TrajectoryLog:
    """Step the scenario's world until it converges or runs out of iterations."""
    return run_world(build_world(s, positions), s.eps, s.max_iters)


@dataclass
class CampaignReport:
    runs: int
    collision_free_runs: int
    seeds: list[int]
    statuses: list[str]
    min_separations: list[float]
    collision_counts: list[int]
    iterations: list[int]
    infeasible_counts: list[int]
    # run index -> error message, for runs that could not be completed
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def completed_runs(self) -> int:
        return self.runs - len(self.failures)

    def as_dict(self) -> dict:
        return {
            "runs": self.runs,
            "completed_runs": self.completed_runs,
            "collision_free_runs": self.collision_free_runs,
            "runs_detail": [
                {
                    "run": i,
                    "seed": self.seeds[i],
                    "status": self.statuses[i],
                    "iterations": self.iterations[i],
                    "min_separation": None if math.isnan(self.min_separations[i]) else self.min_separations[i],
                    "collisions": self.collision_counts[i],
                    "infeasible": self.infeasible_counts[i],
                    "error": self.failures.get(i),
                }
                for i in range(self.runs)
            ],
        }


def monte_carlo(s: Scenario, runs: int, master_seed: int, progress=None) -> CampaignReport:
    """Independent runs with per-run seeds derived from ``master_seed``.

    A run that fails (for instance, start positions cannot be sampled) is
    recorded in ``failures`` and left out of the collision statistics.
    """
    if runs < 1:
        raise ValueError("runs must be at least 1")
    report = CampaignReport(runs, 0, [], [], [], [], [], [])
    for i in range(runs):
        seed = run_seed(master_seed, i)
        report.seeds.append(seed)
        try:
            positions = initial_positions(s, seed=seed)
            traj = run_scenario(s, positions)
        except (ScenarioError, ValueError) as exc:
            log.warning("run %d failed: %s", i, exc)
            report.failures[i] = str(exc)
            report.statuses.append("failed")
            report.min_separations.append(math.nan)
            report.collision_counts.append(0)
            report.iterations.append(0)
            report.infeasible_counts.append(0)
            continue
        report.statuses.append(traj.status.value)
        report.min_separations.append(traj.min_separation)
        report.collision_counts.append(len(traj.collisions))
        report.iterations.append(traj.iterations)
        report.infeasible_counts.append(traj.infeasible)
        if not traj.collisions:
            report.collision_free_runs += 1
        if progress is not None:
            progress(i, traj)
    return report


def final_centroid_offsets(traj: TrajectoryLog, s: Scenario) -> np.ndarray:
    """Distance from each agent to its cell centroid in the final record."""
    positions = [[Vec2(*p) for p in traj.swarm_positions(k)] for k in range(len(s.swarms))]
    world = build_world(s, positions)
    off = world.snapshot.offsets
    return np.hypot(off[:, 0], off[:, 1])
