"""Scenario documents (YAML) and seeded initial placement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from swarmcover.geom2d import ConvexPolygon, GeometryError, Vec2, as_vec, contains, distance_to_boundary

SAMPLING_BUDGET = 100_000

# Default Monte Carlo start regions: lower-left and upper-right of the pentagon.
REGION_A = ((1.5, 0.5), (3.0, 0.5), (3.0, 2.0), (1.5, 2.0))
REGION_B = ((4.5, 5.5), (6.0, 5.5), (6.0, 7.0), (4.5, 7.0))

BUILTIN = ("example1", "example2", "montecarlo", "single_swarm")


class ScenarioError(ValueError):
    """Invalid scenario document; the message names the offending key or value."""


class SamplingError(ScenarioError):
    """Rejection sampling could not place every agent."""


@dataclass(frozen=True)
class SwarmSpec:
    positions: tuple[Vec2, ...] | None = None
    region: tuple[Vec2, ...] | None = None
    count: int | None = None

    @property
    def size(self) -> int:
        return len(self.positions) if self.positions is not None else int(self.count)


@dataclass(frozen=True)
class Scenario:
    arena_vertices: tuple[Vec2, ...]
    swarms: tuple[SwarmSpec, ...]
    radius: float = 0.2
    gain: float = 1.0
    v_max: float = 3.0
    peer_gain: float | None = None
    dt: float = 0.1
    tau: float | None = None
    max_iters: int = 1000
    eps: float = 1e-4
    avoidance_enabled: bool = True
    seed: int = 0
    name: str = field(default="", compare=False)

    @property
    def arena(self) -> ConvexPolygon:
        return ConvexPolygon.checked(self.arena_vertices)

    @property
    def horizon(self) -> float:
        return self.dt if self.tau is None else self.tau

    @property
    def explicit(self) -> bool:
        return all(s.positions is not None for s in self.swarms)


# -- parsing ---------------------------------------------------------------

_SCHEMA = {
    "arena": {"vertices"},
    "agent": {"radius", "gain", "v_max", "peer_gain"},
    "sim": {"dt", "tau", "max_iters", "eps", "avoidance", "seed"},
}
_SWARM_KEYS = {"positions", "region", "count"}
_TOP = {"name", "arena", "swarm", "agent", "sim"}


def _key_lines(node, path=(), out=None) -> dict[tuple, int]:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = path + (k.value,)
            out[key] = k.start_mark.line + 1
            _key_lines(v, key, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[path + (i,)] = v.start_mark.line + 1
            _key_lines(v, path + (i,), out)
    return out


class _Doc:
    def __init__(self, data: dict, lines: dict):
        self.data = data
        self.lines = lines

    def fail(self, path: tuple, msg: str):
        dotted = ".".join(str(p) if not isinstance(p, int) else f"[{p}]" for p in path).replace(".[", "[")
        line = self.lines.get(path)
        where = f"line {line}, " if line else ""
        raise ScenarioError(f"{where}{dotted}: {msg}")


def _number(doc: _Doc, path, value, *, positive=True, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        doc.fail(path, f"expected a number, got {value!r}")
    if integer and not float(value).is_integer():
        doc.fail(path, f"expected an integer, got {value!r}")
    if not math.isfinite(value):
        doc.fail(path, f"must be finite, got {value!r}")
    if positive and not value > 0:
        doc.fail(path, f"must be positive, got {value!r}")
    return int(value) if integer else float(value)


def _points(doc: _Doc, path, value) -> tuple[Vec2, ...]:
    if not isinstance(value, list):
        doc.fail(path, "expected a list of [x, y] pairs")
    out = []
    for i, p in enumerate(value):
        if not (isinstance(p, list) and len(p) == 2):
            doc.fail(path + (i,), f"expected [x, y], got {p!r}")
        out.append(Vec2(_number(doc, path + (i,), p[0], positive=False), _number(doc, path + (i,), p[1], positive=False)))
    return tuple(out)


def loads_scenario(text: str, name: str = "") -> Scenario:
    """Parse and validate a scenario document.

    Raises:
        ScenarioError: on malformed YAML, unknown or missing keys, or any
            violated invariant; the message carries the line and key path.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark else ""
        raise ScenarioError(f"{where}malformed document: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a mapping")
    doc = _Doc(data, _key_lines(node))

    for key in data:
        if key not in _TOP:
            doc.fail((key,), "unknown key")
    for section, allowed in _SCHEMA.items():
        sec = data.get(section, {})
        if sec is None:
            sec = {}
        if not isinstance(sec, dict):
            doc.fail((section,), "expected a mapping")
        for key in sec:
            if key not in allowed:
                doc.fail((section, key), "unknown key")

    arena_sec = data.get("arena") or {}
    if "vertices" not in arena_sec:
        doc.fail(("arena",), "missing required key 'vertices'")
    verts = _points(doc, ("arena", "vertices"), arena_sec["vertices"])
    try:
        arena = ConvexPolygon.checked(verts)
    except GeometryError as exc:
        doc.fail(("arena", "vertices"), str(exc))

    agent = data.get("agent") or {}
    sim = data.get("sim") or {}
    radius = _number(doc, ("agent", "radius"), agent.get("radius", 0.2))
    kw: dict[str, Any] = dict(
        radius=radius,
        gain=_number(doc, ("agent", "gain"), agent.get("gain", 1.0)),
        v_max=_number(doc, ("agent", "v_max"), agent.get("v_max", 3.0)),
        peer_gain=None if agent.get("peer_gain") is None else _number(doc, ("agent", "peer_gain"), agent["peer_gain"]),
        dt=_number(doc, ("sim", "dt"), sim.get("dt", 0.1)),
        tau=None if sim.get("tau") is None else _number(doc, ("sim", "tau"), sim["tau"]),
        max_iters=_number(doc, ("sim", "max_iters"), sim.get("max_iters", 1000), integer=True),
        eps=_number(doc, ("sim", "eps"), sim.get("eps", 1e-4)),
    )
    avoid = sim.get("avoidance", True)
    if not isinstance(avoid, bool):
        doc.fail(("sim", "avoidance"), f"expected true or false, got {avoid!r}")
    seed = sim.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        doc.fail(("sim", "seed"), f"expected an unsigned 64-bit integer, got {seed!r}")

    raw_swarms = data.get("swarm")
    if not isinstance(raw_swarms, list) or not raw_swarms:
        doc.fail(("swarm",), "expected a non-empty list of swarms")
    swarms = []
    for k, sw in enumerate(raw_swarms):
        path = ("swarm", k)
        if not isinstance(sw, dict):
            doc.fail(path, "expected a mapping")
        for key in sw:
            if key not in _SWARM_KEYS:
                doc.fail(path + (key,), "unknown key")
        if "positions" in sw:
            if "region" in sw or "count" in sw:
                doc.fail(path, "give either positions or region + count, not both")
            pos = _points(doc, path + ("positions",), sw["positions"])
            if not pos:
                doc.fail(path + ("positions",), "swarm needs at least one agent")
            swarms.append(SwarmSpec(positions=pos))
        elif "region" in sw and "count" in sw:
            region = _points(doc, path + ("region",), sw["region"])
            try:
                reg = ConvexPolygon.checked(region)
            except GeometryError as exc:
                doc.fail(path + ("region",), str(exc))
            for i, v in enumerate(reg.vertices):
                if not contains(arena, v):
                    doc.fail(path + ("region",), f"vertex {i} {v.as_tuple()} lies outside the arena")
            count = _number(doc, path + ("count",), sw["count"], integer=True)
            swarms.append(SwarmSpec(region=region, count=count))
        else:
            doc.fail(path, "needs positions, or region and count")

    scenario = Scenario(
        arena_vertices=arena.vertices,
        swarms=tuple(swarms),
        avoidance_enabled=avoid,
        seed=seed,
        name=str(data.get("name", name)),
        **kw,
    )
    if scenario.explicit:
        try:
            check_clearance(arena, [[p for p in s.positions] for s in scenario.swarms], radius)
        except ScenarioError as exc:
            raise ScenarioError(f"swarm: {exc}") from None
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file; bare builtin names (``example1``...) load the bundled copies."""
    p = Path(path)
    if not p.exists() and str(path) in BUILTIN:
        text = resources.files("swarmcover").joinpath("data", f"{path}.yaml").read_text()
        return loads_scenario(text, name=str(path))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    return loads_scenario(text, name=p.stem)


def check_clearance(arena: ConvexPolygon, swarm_positions, radius: float) -> None:
    """Pairwise and boundary clearance of at least two radii for every agent."""
    clearance = 2.0 * radius
    flat = [(k, i, as_vec(p)) for k, sw in enumerate(swarm_positions) for i, p in enumerate(sw)]
    for k, i, p in flat:
        if not contains(arena, p):
            raise ScenarioError(f"[{k}] agent {i} at {p.as_tuple()} lies outside the arena")
        d = distance_to_boundary(arena, p)
        if d < clearance - 1e-12:
            raise ScenarioError(f"[{k}] agent {i} at {p.as_tuple()} is {d:.6g} from the boundary (need {clearance:g})")
    for a in range(len(flat)):
        for b in range(a + 1, len(flat)):
            d = (flat[a][2] - flat[b][2]).norm()
            if d < clearance - 1e-12:
                raise ScenarioError(
                    f"agents [{flat[a][0]}]{flat[a][1]} and [{flat[b][0]}]{flat[b][1]} are {d:.6g} apart (need {clearance:g})"
                )


def dumps_scenario(s: Scenario) -> str:
    """Serialise a scenario; ``loads_scenario(dumps_scenario(s)) == s``."""
    swarms = []
    for sw in s.swarms:
        if sw.positions is not None:
            swarms.append({"positions": [list(p.as_tuple()) for p in sw.positions]})
        else:
            swarms.append({"region": [list(p.as_tuple()) for p in sw.region], "count": sw.count})
    agent: dict[str, Any] = {"radius": s.radius, "gain": s.gain, "v_max": s.v_max}
    if s.peer_gain is not None:
        agent["peer_gain"] = s.peer_gain
    sim: dict[str, Any] = {"dt": s.dt, "max_iters": s.max_iters, "eps": s.eps, "avoidance": s.avoidance_enabled, "seed": s.seed}
    if s.tau is not None:
        sim["tau"] = s.tau
    doc = {
        "name": s.name,
        "arena": {"vertices": [list(p.as_tuple()) for p in s.arena_vertices]},
        "swarm": swarms,
        "agent": agent,
        "sim": sim,
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def sample_initial_positions(
    region: ConvexPolygon,
    arena: ConvexPolygon,
    n: int,
    radius: float,
    rng_seed: int | np.random.Generator,
    occupied=(),
) -> list[Vec2]:
    """Draw ``n`` points uniformly from ``region`` by rejection.

    Each accepted point keeps at least ``2 * radius`` from the arena boundary,
    from the other accepted points and from ``occupied``.

    Raises:
        SamplingError: when ``SAMPLING_BUDGET`` draws do not suffice.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    clearance = 2.0 * radius
    x0, y0, x1, y1 = region.bounds()
    taken = [as_vec(p) for p in occupied]
    out: list[Vec2] = []
    drawn = 0
    while len(out) < n and drawn < SAMPLING_BUDGET:
        batch = min(1024, SAMPLING_BUDGET - drawn)
        drawn += batch
        cand = rng.uniform((x0, y0), (x1, y1), size=(batch, 2))
        # inside the region and at least `clearance` from every arena edge line;
        # for an interior point of a convex polygon that is the boundary distance
        ok = np.all(region.signed_distances(cand) >= 0.0, axis=1)
        ok &= np.all(arena.signed_distances(cand) >= clearance, axis=1)
        for x, y in cand[ok].tolist():
            p = Vec2(x, y)
            if any((p - q).norm() < clearance for q in taken):
                continue
            out.append(p)
            taken.append(p)
            if len(out) == n:
                break
    if len(out) < n:
        raise SamplingError(f"placed only {len(out)} of {n} agents in {SAMPLING_BUDGET} draws")
    return out


def initial_positions(s: Scenario, seed: int | None = None) -> list[list[Vec2]]:
    """Explicit positions, or one seeded sample per swarm region."""
    arena = s.arena
    rng = np.random.default_rng(s.seed if seed is None else seed)
    placed: list[list[Vec2]] = []
    for sw in s.swarms:
        if sw.positions is not None:
            placed.append(list(sw.positions))
        else:
            occupied = [p for group in placed for p in group]
            placed.append(
                sample_initial_positions(ConvexPolygon.checked(sw.region), arena, sw.count, s.radius, rng, occupied)
            )
    return placed
