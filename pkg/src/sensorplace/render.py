"""Topology export: Graphviz DOT with sensors highlighted, or plain JSON."""

from __future__ import annotations

import json

from .feeder import Feeder
from .placement import Placement


def render_dot(feeder: Feeder, placement: Placement | None = None) -> str:
    """Directed parent->child graph; node sensors red, line sensors green."""
    if placement is None:
        placement = Placement()
    lines = ["digraph feeder {"]
    for i in feeder.nodes:
        attrs = ", color=red, penwidth=2" if i in placement.node_sensors else ""
        label = f"{i}*" if i in feeder.zero_injection else f"{i}"
        lines.append(f'  {i} [label="{label}"{attrs}];')
    for i, j in feeder.edges:
        attrs = " [color=green, penwidth=2]" if (i, j) in placement.line_sensors else ""
        lines.append(f"  {i} -> {j}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_json(feeder: Feeder, placement: Placement | None = None) -> str:
    if placement is None:
        placement = Placement()
    doc = {
        "nodes": [
            {"id": i, "zero_injection": i in feeder.zero_injection,
             "node_sensor": i in placement.node_sensors}
            for i in feeder.nodes
        ],
        "edges": [
            {"from": i, "to": j, "line_sensor": (i, j) in placement.line_sensors}
            for i, j in feeder.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
