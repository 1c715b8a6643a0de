"""CSV and SVG output for trajectory logs."""

from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET

from swarmcover.harness import TrajectoryLog
from swarmcover.scenario import Scenario

CSV_FIELDS = ("iteration", "swarm_id", "agent_id", "x", "y", "vx", "vy", "min_separation", "swarm_cost")
SWARM_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _g(v: float) -> str:
    return f"{v:.9g}"


def export_csv(log: TrajectoryLog) -> str:
    """One row per (iteration, agent); floats carry 9 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for rec in log.records:
        for j, (aid, sid) in enumerate(zip(log.agent_ids, log.swarm_ids)):
            x, y = rec.positions[j]
            vx, vy = rec.velocities[j]
            w.writerow(
                (rec.iteration, sid, aid, _g(x), _g(y), _g(vx), _g(vy), _g(rec.min_separation), _g(rec.costs[sid]))
            )
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append(
            {k: (int(v) if k in ("iteration", "swarm_id", "agent_id") else float(v)) for k, v in row.items()}
        )
    return rows


def render_svg(log: TrajectoryLog, s: Scenario, scale: float = 60.0) -> str:
    """Arena outline, one polyline per agent trajectory, final discs at true radius.

    The y axis points up, as in the usual plots of the arena.
    """
    if not log.records:
        raise ValueError("trajectory log is empty")
    xs = [v.x for v in s.arena_vertices]
    ys = [v.y for v in s.arena_vertices]
    pad = 0.5
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad

    def pt(x: float, y: float) -> str:
        return f"{_g(x)},{_g(y0 + y1 - y)}"

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=_g((x1 - x0) * scale),
        height=_g((y1 - y0) * scale),
        viewBox=f"{_g(x0)} {_g(y0)} {_g(x1 - x0)} {_g(y1 - y0)}",
    )
    ET.SubElement(
        svg, "polygon", points=" ".join(pt(v.x, v.y) for v in s.arena_vertices),
        fill="none", stroke="black", **{"stroke-width": "0.03"},
    )
    if len(log.records) > 1:
        for j, sid in enumerate(log.swarm_ids):
            path = " ".join(pt(*rec.positions[j]) for rec in log.records)
            ET.SubElement(
                svg, "polyline", points=path, fill="none",
                stroke=SWARM_COLORS[sid % len(SWARM_COLORS)], **{"stroke-width": "0.02", "class": f"swarm{sid + 1}"},
            )
    final = log.records[-1].positions
    for j, sid in enumerate(log.swarm_ids):
        x, y = final[j]
        color = SWARM_COLORS[sid % len(SWARM_COLORS)]
        ET.SubElement(
            svg, "circle", cx=_g(x), cy=_g(y0 + y1 - y), r=_g(log.radii[j]),
            fill=color, **{"fill-opacity": "0.6", "stroke": color, "stroke-width": "0.01", "class": f"swarm{sid + 1}"},
        )
    ET.indent(svg)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"
