"""Multi-swarm Voronoi coverage control with reciprocal collision avoidance."""

from swarmcover._backend import BACKEND
from swarmcover.engine import Agent, Termination, WorldState, step
from swarmcover.geom2d import ConvexPolygon, HalfPlane, Vec2
from swarmcover.harness import monte_carlo, run_scenario
from swarmcover.scenario import Scenario, load_scenario

__all__ = [
    "BACKEND",
    "Agent",
    "ConvexPolygon",
    "HalfPlane",
    "Scenario",
    "Termination",
    "Vec2",
    "WorldState",
    "load_scenario",
    "monte_carlo",
    "run_scenario",
    "step",
]
__version__ = "0.1.0"
