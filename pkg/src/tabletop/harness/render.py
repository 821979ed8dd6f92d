"""SVG depiction of a scenario, a state, or a plan's push trajectories."""
from __future__ import annotations

from pathlib import Path
from typing import Optional

from ..geometry import transform
from ..world import ObjectClass, Push, Scenario, WorldState

SCALE = 1000.0   # px per meter
PAD = 10.0
LIGHT = "#cfe0f0"
DARK = "#40566e"
PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


class IoFailure(OSError):
    pass


def _pts(points, height: float) -> str:
    return " ".join(f"{PAD + x * SCALE:.2f},{PAD + (height - y) * SCALE:.2f}" for x, y in points)


def svg_text(scenario: Scenario, state: Optional[WorldState] = None, plan: Optional[list] = None) -> str:
    ws = scenario.ws
    w, h = ws.width * SCALE + 2 * PAD, ws.height * SCALE + 2 * PAD
    state = state if state is not None else scenario.start
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
           f'viewBox="0 0 {w:.2f} {h:.2f}">',
           f'<rect x="{PAD}" y="{PAD}" width="{ws.width * SCALE:.2f}" height="{ws.height * SCALE:.2f}" '
           f'fill="white" stroke="black" stroke-width="2"/>']
    for o in scenario.objects:
        color = PALETTE[o.id % len(PALETTE)]
        out.append(f'<polygon class="goal" points="{_pts(transform(o.footprint, scenario.goal[o.id]), ws.height)}" '
                   f'fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6,4"/>')
    for o in scenario.objects:
        fill = DARK if o.cls is ObjectClass.PUSH_ONLY else LIGHT
        color = PALETTE[o.id % len(PALETTE)]
        out.append(f'<polygon class="object" points="{_pts(transform(o.footprint, state[o.id]), ws.height)}" '
                   f'fill="{fill}" stroke="{color}" stroke-width="2"/>')
        p = state[o.id]
        out.append(f'<text x="{PAD + p.x * SCALE:.2f}" y="{PAD + (ws.height - p.y) * SCALE + 4:.2f}" '
                   f'font-size="12" text-anchor="middle" fill="{color}">{o.id}</text>')
    for a in plan or []:
        if isinstance(a, Push):
            color = PALETTE[a.obj % len(PALETTE)]
            out.append(f'<polyline class="push" points="{_pts([(q.x, q.y) for q in a.waypoints], ws.height)}" '
                       f'fill="none" stroke="{color}" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(scenario: Scenario, path, state: Optional[WorldState] = None, plan: Optional[list] = None) -> Path:
    path = Path(path)
    try:
        path.write_text(svg_text(scenario, state, plan))
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path
