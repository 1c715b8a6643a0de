"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""

import dataclasses
import math
import sys
import time

import numpy as np
import pytest

from conftest import PENTAGON, points_in
from oracles import GridLP, min_matching_cost, simulate_pair
from swarmcover import BACKEND
from swarmcover.coverage import coverage_cost, coverage_gradient
from swarmcover.engine import COLLISION_TOL, Termination, detect_collisions
from swarmcover.geom2d import HalfPlane, Vec2, polygon_area
from swarmcover.harness import build_world, final_centroid_offsets, monte_carlo, run_scenario
from swarmcover.orca import AvoidanceConstraint, orca_halfplane, permitted_velocity, velocity_obstacle
from swarmcover.scenario import check_clearance, initial_positions, load_scenario, sample_initial_positions
from swarmcover.voronoi import voronoi_cells

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def test_criterion_1_example1_swarms_coincide(report):
    s = load_scenario("example1")
    t0 = time.perf_counter()
    log = run_scenario(s)
    elapsed = time.perf_counter() - t0
    worst, _ = min_matching_cost(log.swarm_positions(0), log.swarm_positions(1))
    final = build_world(s, [[Vec2(*p) for p in log.swarm_positions(k)] for k in range(2)])
    pairs = detect_collisions(final)
    ok = log.status is not Termination.RUNNING and worst < 0.05 and len(pairs) >= 1 and elapsed < 5.0
    detail = (
        f"{log.status.value} after {log.iterations} iterations, worst matched distance {worst:.2e}, "
        f"{len(pairs)} colliding pairs, {elapsed:.2f} s ({BACKEND})"
    )
    assert report(1, ok, detail)


def test_criterion_2_example2_collision_free(report):
    s = load_scenario("example2")
    t0 = time.perf_counter()
    log = run_scenario(s)
    elapsed = time.perf_counter() - t0
    ok = not log.collisions and log.min_separation >= -1e-6 and elapsed < 10.0
    detail = (
        f"{log.status.value} after {log.iterations} iterations, min separation {log.min_separation:.3e}, "
        f"{len(log.collisions)} collision events, {elapsed:.2f} s ({BACKEND})"
    )
    assert report(2, ok, detail)


def test_criterion_3_monte_carlo(report):
    s = load_scenario("montecarlo")
    t0 = time.perf_counter()
    rep = monte_carlo(s, 100, s.seed)
    elapsed = time.perf_counter() - t0
    # the start positions of every run obey the clearance rule
    for seed in rep.seeds:
        check_clearance(s.arena, initial_positions(s, seed=seed), s.radius)
    done = [m for i, m in enumerate(rep.min_separations) if i not in rep.failures]
    ok = rep.completed_runs == 100 and rep.collision_free_runs == 100 and min(done) >= -COLLISION_TOL and elapsed < 300
    statuses = {k: rep.statuses.count(k) for k in sorted(set(rep.statuses))}
    detail = (
        f"{rep.collision_free_runs}/{rep.runs} collision-free, smallest separation {min(done):.3e}, "
        f"statuses {statuses}, {elapsed:.1f} s"
    )
    assert report(3, ok, detail)


def test_criterion_4_gradient_finite_differences(report):
    rng = np.random.default_rng(4)
    h = 1e-5
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 9))
        pos = points_in(PENTAGON, rng, n)
        analytic = np.array([g.as_tuple() for g in coverage_gradient(pos, PENTAGON)])
        for i in range(n):
            for k in range(2):
                up, dn = pos.copy(), pos.copy()
                up[i, k] += h
                dn[i, k] -= h
                fd = (coverage_cost(up, PENTAGON) - coverage_cost(dn, PENTAGON)) / (2 * h)
                worst = max(worst, abs(analytic[i, k] - fd) / abs(fd))
    ok = worst <= 1e-4
    assert report(4, ok, f"20 configurations, worst componentwise relative error {worst:.2e}")


def test_criterion_5_lloyd_descent_converges(report):
    s = load_scenario("single_swarm")
    assert len(s.swarms) == 1 and s.swarms[0].size == 4
    log = run_scenario(s)
    costs = [r.costs[0] for r in log.records]
    rises = max(b - a for a, b in zip(costs, costs[1:]))
    offset = float(final_centroid_offsets(log, s).max())
    ok = rises <= 1e-9 and log.status is Termination.CONVERGED and offset < 1e-3
    detail = (
        f"{log.status.value} after {log.iterations} iterations, largest cost increase {rises:.2e}, "
        f"max centroid offset {offset:.2e}"
    )
    assert report(5, ok, detail)


def test_criterion_6_voronoi_partition(report):
    rng = np.random.default_rng(6)
    area = polygon_area(PENTAGON)
    worst_area, mismatches, checked = 0.0, 0, 0
    for _ in range(200):
        n = int(rng.integers(1, 21))
        gens = points_in(PENTAGON, rng, n)
        vd = voronoi_cells(gens, PENTAGON)
        worst_area = max(worst_area, abs(vd.total_area() - area) / area)
        q = points_in(PENTAGON, rng, 10**4)
        d = np.hypot(q[:, None, 0] - gens[None, :, 0], q[:, None, 1] - gens[None, :, 1])
        nearest = np.argmin(d, axis=1)
        srt = np.sort(d, axis=1)
        clear = srt[:, 1] - srt[:, 0] > 1e-9 if n > 1 else np.ones(len(q), dtype=bool)
        inside = np.stack([np.all(c.signed_distances(q) >= -1e-9, axis=1) for c in vd.cells], axis=1)
        owner_ok = inside[np.arange(len(q)), nearest] & (inside.sum(axis=1) == 1)
        mismatches += int(np.sum(~owner_ok & clear))
        checked += int(np.sum(clear))
    ok = worst_area <= 1e-9 and mismatches == 0
    detail = f"200 sets, worst relative area error {worst_area:.1e}, ownership mismatches {mismatches}/{checked}"
    assert report(6, ok, detail)


def test_criterion_7_orca_pairwise(report):
    rng = np.random.default_rng(7)
    v_max = 3.0
    simulated, worst = 0, math.inf
    for _ in range(1000):
        ra, rb = rng.uniform(0.05, 0.5, 2)
        R = ra + rb
        tau = rng.uniform(0.1, 2.0)
        xa = rng.uniform(-3, 3, 2)
        ang = rng.uniform(0, 2 * math.pi)
        xb = xa + R * rng.uniform(1.001, 6.0) * np.array([math.cos(ang), math.sin(ang)])
        pa = rng.uniform(-1, 1, 2) * v_max
        pb = rng.uniform(-1, 1, 2) * v_max
        ca = orca_halfplane(velocity_obstacle(xa, xb, ra, rb, tau), pa, pb)
        cb = orca_halfplane(velocity_obstacle(xb, xa, rb, ra, tau), pb, pa)
        sa = permitted_velocity([ca], v_max, pa)
        sb = permitted_velocity([cb], v_max, pb)
        if not (sa.feasible and sb.feasible):
            continue
        simulated += 1
        gap = simulate_pair(xa, xb, sa.velocity.as_tuple(), sb.velocity.as_tuple(), tau, substeps=100) - R
        worst = min(worst, gap)
    ok = simulated > 0 and worst >= -COLLISION_TOL
    assert report(7, ok, f"{simulated}/1000 pairs with both programs feasible, smallest clearance {worst:.2e}")


def _feasible_constraint_set(rng, v_max):
    """Half-planes sharing an interior point with slack of several grid cells."""
    k = int(rng.integers(1, 8))
    a, r = rng.uniform(0, 2 * math.pi), rng.uniform(0, 0.85) * v_max
    inner = Vec2(r * math.cos(a), r * math.sin(a))
    cs = []
    for _ in range(k):
        ang = rng.uniform(0, 2 * math.pi)
        n = Vec2(math.cos(ang), math.sin(ang))
        slack = rng.uniform(0.01, 1.0) * v_max
        cs.append(AvoidanceConstraint(HalfPlane(inner - n * slack, n), Vec2(0, 0)))
    return cs


def test_criterion_8_lp_matches_grid(report):
    rng = np.random.default_rng(8)
    v_max = 3.0
    grid = GridLP(v_max, resolution=1e-3)
    agree, raw_close, violations, speeding = 0, 0, 0.0, 0
    for _ in range(1000):
        cs = _feasible_constraint_set(rng, v_max)
        v_pref = rng.uniform(-1.3, 1.3, 2) * v_max
        res = permitted_velocity(cs, v_max, v_pref)
        rows = [(*c.halfplane.point.as_tuple(), *c.halfplane.normal.as_tuple()) for c in cs]
        argmin, best, near = grid.solve(rows, v_pref)
        v = np.array(res.velocity.as_tuple())
        f = float(np.hypot(*(v - v_pref)))
        gap = float(np.min(np.hypot(*(near - v).T)))
        if res.feasible and f <= best + 1e-12 and gap <= 1e-2 * v_max:
            agree += 1
        raw_close += np.hypot(*(argmin - v)) <= 1e-2 * v_max
        violations = max([violations] + [-c.halfplane.signed_distance(res.velocity) for c in cs])
        speeding += res.velocity.norm() > v_max + 1e-12
    ok = agree == 1000 and violations <= 1e-9 and speeding == 0
    detail = (
        f"{agree}/1000 optimal against the grid (grid argmin itself within 1e-2 v_max in {raw_close}), "
        f"largest constraint violation {violations:.1e}"
    )
    assert report(8, ok, detail)


def test_criterion_9_point_agents_never_collide(report):
    base = load_scenario("single_swarm")
    rng = np.random.default_rng(9)
    runs, collided, statuses = 50, 0, []
    for _ in range(runs):
        n = int(rng.integers(2, 9))
        positions = sample_initial_positions(PENTAGON, PENTAGON, n, 1e-6, rng)
        s = dataclasses.replace(base, radius=1e-6, avoidance_enabled=False, max_iters=1000)
        log = run_scenario(s, [positions])
        final = build_world(s, [[Vec2(*p) for p in log.final_positions]])
        if log.collisions or detect_collisions(final):
            collided += 1
        statuses.append(log.status.value)
    ok = collided == 0
    counts = {k: statuses.count(k) for k in sorted(set(statuses))}
    assert report(9, ok, f"{runs - collided}/{runs} runs collision-free, statuses {counts}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
