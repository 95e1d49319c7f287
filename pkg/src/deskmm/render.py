"""Top-down SVG rendering of scenes and replayed episodes."""
from __future__ import annotations

import math
from pathlib import Path
from typing import List, Optional

from .geometry import DEFAULT_LIMITS, Pose2, RobotState, end_effector_position, gripper_tip
from .scene import Scene

_SCALE = 80.0  # px per metre
_PAD = 0.4


def _line(x1, y1, x2, y2, color, width=2.0, dash=None):
    d = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>')


def _circle(x, y, r, fill, stroke="none", opacity=1.0):
    return (f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}" fill="{fill}" '
            f'stroke="{stroke}" opacity="{opacity}"/>')


def _rect(x, y, w, h, fill, opacity=1.0):
    return (f'<rect x="{x:.1f}" y="{y:.1f}" width="{w:.1f}" height="{h:.1f}" '
            f'fill="{fill}" opacity="{opacity}"/>')


def render_frame(scene: Scene, robot: Optional[RobotState] = None,
                 door_theta: float = 0.0, dirt_alive=None,
                 caption: str = "") -> str:
    """One SVG frame: rooms, walls, door panel, dirt, obstacles, robot."""
    bx0, by0, bx1, by1 = scene.bounds()
    w = (bx1 - bx0 + 2 * _PAD) * _SCALE
    h = (by1 - by0 + 2 * _PAD) * _SCALE

    def tx(x):
        return (x - bx0 + _PAD) * _SCALE

    def ty(y):
        return h - (y - by0 + _PAD) * _SCALE  # world +y is up

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
             f'viewBox="0 0 {w:.0f} {h:.0f}">',
             _rect(0, 0, w, h, "#fafafa")]
    for rx0, ry0, rx1, ry1 in scene.rooms:
        parts.append(_rect(tx(rx0), ty(ry1), (rx1 - rx0) * _SCALE, (ry1 - ry0) * _SCALE,
                           "#f0f0e8"))
    for ox0, oy0, ox1, oy1 in scene.obstacles:
        parts.append(_rect(tx(ox0), ty(oy1), (ox1 - ox0) * _SCALE, (oy1 - oy0) * _SCALE,
                           "#b0a898"))
    if scene.fridge_body is not None:
        fx0, fy0, fx1, fy1 = scene.fridge_body
        parts.append(_rect(tx(fx0), ty(fy1), (fx1 - fx0) * _SCALE, (fy1 - fy0) * _SCALE,
                           "#8899aa"))
    if scene.table is not None:
        tx0, ty0_, tx1, ty1_ = scene.table.rect
        parts.append(_rect(tx(tx0), ty(ty1_), (tx1 - tx0) * _SCALE, (ty1_ - ty0_) * _SCALE,
                           "#c8a878"))
        alive = dirt_alive if dirt_alive is not None else [True] * len(scene.table.dirt)
        for (px, py), a in zip(scene.table.dirt, alive):
            if a:
                parts.append(_circle(tx(px), ty(py), 2.5, "#604020"))
    for x1, y1, x2, y2 in scene.walls:
        parts.append(_line(tx(x1), ty(y1), tx(x2), ty(y2), "#333333", 4.0))
    if scene.door is not None:
        x1, y1, x2, y2 = scene.door.panel_segment(door_theta)
        parts.append(_line(tx(x1), ty(y1), tx(x2), ty(y2), "#a03020", 5.0))
        hx, hy = scene.door.handle_xy(door_theta)
        parts.append(_circle(tx(hx), ty(hy), 3.5, "#a03020"))
    if robot is not None:
        b = robot.base
        parts.append(_circle(tx(b.x), ty(b.y), DEFAULT_LIMITS.base_radius * _SCALE,
                             "#3060c0", opacity=0.75))
        nx = b.x + 0.17 * math.cos(b.theta)
        ny = b.y + 0.17 * math.sin(b.theta)
        parts.append(_line(tx(b.x), ty(b.y), tx(nx), ty(ny), "#ffffff", 2.5))
        ex, ey, _ = end_effector_position(robot)
        gx, gy, _ = gripper_tip(robot)
        parts.append(_line(tx(b.x), ty(b.y), tx(ex), ty(ey), "#208040", 2.5))
        parts.append(_line(tx(ex), ty(ey), tx(gx), ty(gy), "#20a040", 2.5))
        parts.append(_circle(tx(gx), ty(gy), 3.0, "#20a040"))
    if caption:
        parts.append(f'<text x="8" y="16" font-family="monospace" font-size="13">{caption}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_states(scene: Scene, states: List[dict], out_dir, every: int = 10) -> List[Path]:
    """Write one SVG per ``every`` world states (plus the final one)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    picks = list(range(0, len(states), every))
    if states and (len(states) - 1) not in picks:
        picks.append(len(states) - 1)
    for idx in picks:
        st = states[idx]
        x, y, th = st["base"]
        robot = RobotState(base=Pose2(x, y, th), lift=st["lift"],
                           extension=st["extension"], wrist=st["wrist"],
                           holding=st["holding"])
        svg = render_frame(scene, robot, st["door_theta"] or 0.0, st["dirt_alive"],
                           caption=f"step {idx}")
        path = out_dir / f"frame_{idx:06d}.svg"
        path.write_text(svg)
        written.append(path)
    return written
