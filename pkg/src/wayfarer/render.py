"""SVG rendering of worlds and trial trajectories.

Follows the plotting conventions used throughout this project: branches
as black lines, trees as green circles, slip locations as red dots, the
trajectory as a green polyline, a red star at the start, a black arrow
for the goal heading, and a dashed destination line.  SVG keeps renders
dependency-free and diffable.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

from .environment import ForestEnvironment

_STYLE = (
    "  <style>\n"
    "    .boundary { fill: none; stroke: #888; stroke-width: 0.08; }\n"
    "    .branch { stroke: black; stroke-width: 0.12; stroke-linecap: round; }\n"
    "    .tree { fill: #2e8b57; }\n"
    "    .slip { fill: #d62728; }\n"
    "    .trajectory { fill: none; stroke: #2ca02c; stroke-width: 0.1; }\n"
    "    .start { fill: #d62728; }\n"
    "    .goal-arrow { stroke: black; stroke-width: 0.15; fill: black; }\n"
    "    .destination { stroke: #d62728; stroke-width: 0.1; stroke-dasharray: 0.8 0.5; fill: none; }\n"
    "  </style>\n"
)


def render_svg(
    env: ForestEnvironment,
    trajectory: Optional[Sequence[tuple]] = None,   # rows (t, x, y, psi_deg)
    slip_points: Optional[Sequence[tuple]] = None,  # rows (x, y)
    goal_heading: Optional[float] = None,
    destination_offset: Optional[float] = None,
    start: Optional[tuple[float, float]] = None,
) -> str:
    """Build an SVG document for a world and (optionally) one trial's artifacts."""
    side = env.side
    margin = 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-margin} {-margin} '
        f'{side + 2 * margin} {side + 2 * margin}" width="800" height="800">\n',
        _STYLE,
        # world y grows upward; SVG y grows downward
        f'  <g transform="translate(0,{side}) scale(1,-1)">\n',
        f'    <rect class="boundary" x="0" y="0" width="{side}" height="{side}"/>\n',
    ]

    for s in env.branches:
        parts.append(
            f'    <line class="branch" x1="{s.a.x:.4f}" y1="{s.a.y:.4f}" '
            f'x2="{s.b.x:.4f}" y2="{s.b.y:.4f}"/>\n'
        )
    for d in env.trees:
        parts.append(
            f'    <circle class="tree" cx="{d.center.x:.4f}" cy="{d.center.y:.4f}" r="{d.radius:.4f}"/>\n'
        )

    if start is None:
        sp = env.params.start_point()
        start = (sp.x, sp.y)
    if trajectory:
        start = (trajectory[0][1], trajectory[0][2])
        points = " ".join(f"{row[1]:.4f},{row[2]:.4f}" for row in trajectory)
        parts.append(f'    <polyline class="trajectory" points="{points}"/>\n')

    for p in slip_points or ():
        parts.append(f'    <circle class="slip" cx="{p[0]:.4f}" cy="{p[1]:.4f}" r="0.18"/>\n')

    if goal_heading is not None:
        hr = math.radians(goal_heading)
        ux, uy = math.cos(hr), math.sin(hr)
        x0, y0 = start
        x1, y1 = x0 + 3.0 * ux, y0 + 3.0 * uy
        # arrow shaft plus a small head
        left = (x1 - 0.8 * ux + 0.4 * -uy, y1 - 0.8 * uy + 0.4 * ux)
        right = (x1 - 0.8 * ux - 0.4 * -uy, y1 - 0.8 * uy - 0.4 * ux)
        parts.append(
            f'    <line class="goal-arrow" x1="{x0:.4f}" y1="{y0:.4f}" x2="{x1:.4f}" y2="{y1:.4f}"/>\n'
        )
        parts.append(
            f'    <path class="goal-arrow" d="M {x1:.4f} {y1:.4f} L {left[0]:.4f} {left[1]:.4f} '
            f'L {right[0]:.4f} {right[1]:.4f} Z"/>\n'
        )
        if destination_offset is not None:
            # finish line perpendicular to the goal heading, clipped generously
            cx, cy = x0 + destination_offset * ux, y0 + destination_offset * uy
            px, py = -uy, ux
            half = side * 1.5
            parts.append(
                f'    <line class="destination" x1="{cx - half * px:.4f}" y1="{cy - half * py:.4f}" '
                f'x2="{cx + half * px:.4f}" y2="{cy + half * py:.4f}"/>\n'
            )

    parts.append(f'    <path class="start" d="{_star_path(start[0], start[1], 0.6)}"/>\n')
    parts.append("  </g>\n</svg>\n")
    return "".join(parts)


def _star_path(cx: float, cy: float, r: float) -> str:
    """Five-pointed star path centered at (cx, cy)."""
    pts = []
    for k in range(10):
        rad = r if k % 2 == 0 else 0.4 * r
        ang = math.pi / 2 + k * math.pi / 5
        pts.append((cx + rad * math.cos(ang), cy + rad * math.sin(ang)))
    return "M " + " L ".join(f"{x:.4f} {y:.4f}" for x, y in pts) + " Z"
