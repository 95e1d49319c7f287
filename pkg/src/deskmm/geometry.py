"""Planar geometry primitives and the robot's kinematic model.

The robot is a circular base with a lift/extend/wrist arm that reaches out
to its right-hand side.  All per-step motion goes through
:func:`apply_action`; the base sub-move is rejected (never clipped) when
its footprint would intersect scene geometry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

TWO_PI = 2.0 * math.pi

# per-step actuation bounds: forward (m), rotate (rad), lift (m), extend (m), wrist (rad)
ACTION_BOUNDS = (0.2, 0.3, 0.05, 0.05, 0.3)
GRASP_THRESHOLD = 0.5

LIFT_RANGE = (0.1, 1.1)
EXTENSION_RANGE = (0.0, 0.52)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass(frozen=True)
class Pose2:
    """Planar pose; theta is CCW from +x, wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class RobotLimits:
    base_radius: float = 0.17
    arm_forward_offset: float = 0.10
    arm_lateral_base: float = 0.20
    gripper_length: float = 0.17


DEFAULT_LIMITS = RobotLimits()


@dataclass(frozen=True)
class RobotState:
    base: Pose2
    lift: float = 0.5
    extension: float = 0.0
    wrist: float = 0.0
    holding: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lift", clamp(self.lift, *LIFT_RANGE))
        object.__setattr__(self, "extension", clamp(self.extension, *EXTENSION_RANGE))
        object.__setattr__(self, "wrist", wrap_angle(self.wrist))


@dataclass(frozen=True)
class ActionCommand:
    """One step of actuation.  Fields are in metric units (already scaled);
    ``grasp`` is None for tasks without a grasp dimension."""

    d_forward: float = 0.0
    d_rotate: float = 0.0
    d_lift: float = 0.0
    d_extend: float = 0.0
    d_wrist: float = 0.0
    grasp: Optional[bool] = None


ZERO_ACTION = ActionCommand()


def clamp_action(raw: Sequence[float], has_grasp: bool) -> ActionCommand:
    """Scale a raw policy output (nominally in [-1, 1] per dim) to metric
    bounds.  Raises ValueError on non-finite input."""
    vals = [float(v) for v in raw[:6]]
    if len(raw) < 5:
        raise ValueError(f"raw action needs at least 5 dims, got {len(raw)}")
    for v in vals:
        if not math.isfinite(v):
            raise ValueError(f"non-finite action component: {vals}")
    scaled = [b * clamp(v, -1.0, 1.0) for b, v in zip(ACTION_BOUNDS, vals)]
    grasp: Optional[bool] = None
    if has_grasp:
        grasp = len(vals) > 5 and vals[5] > GRASP_THRESHOLD
    return ActionCommand(*scaled, grasp=grasp)


def end_effector_position(state: RobotState, limits: RobotLimits = DEFAULT_LIMITS) -> Tuple[float, float, float]:
    """Arm end-effector (sponge / gripper mount) position; the arm telescopes
    out to the robot's right."""
    c, s = math.cos(state.base.theta), math.sin(state.base.theta)
    lx = limits.arm_forward_offset
    ly = -(limits.arm_lateral_base + state.extension)
    return (state.base.x + c * lx - s * ly, state.base.y + s * lx + c * ly, state.lift)


def gripper_tip(state: RobotState, limits: RobotLimits = DEFAULT_LIMITS) -> Tuple[float, float, float]:
    """Tip of the wrist-mounted gripper; wrist=0 points straight out from
    the arm (robot's right)."""
    ex, ey, ez = end_effector_position(state, limits)
    a = state.base.theta - 0.5 * math.pi + state.wrist
    g = limits.gripper_length
    return (ex + g * math.cos(a), ey + g * math.sin(a), ez)


def footprint_collides(pose: Pose2, scene, door_angle: float = 0.0,
                       limits: RobotLimits = DEFAULT_LIMITS) -> bool:
    """True iff the base disc at ``pose`` intersects walls, the door panel
    at ``door_angle``, or any solid rect (obstacles / table / fridge body).
    Touching exactly at base_radius does not collide."""
    from . import kernels

    segs = scene.collision_segments(door_angle)
    return kernels.circle_collides(segs, scene.solid_rects, pose.x, pose.y, limits.base_radius)


def apply_action(state: RobotState, cmd: ActionCommand, scene, door_angle: float = 0.0,
                 limits: RobotLimits = DEFAULT_LIMITS) -> Tuple[RobotState, bool]:
    """Advance the robot one step: rotate, then translate along the new
    heading; arm increments clamped to joint limits.

    A base pose whose footprint would collide is rejected wholesale (base
    unchanged, valid=False); arm sub-moves always apply.
    """
    theta = wrap_angle(state.base.theta + cmd.d_rotate)
    nx = state.base.x + cmd.d_forward * math.cos(theta)
    ny = state.base.y + cmd.d_forward * math.sin(theta)
    new_pose = Pose2(nx, ny, theta)
    valid = True
    if (cmd.d_forward != 0.0 or cmd.d_rotate != 0.0) and footprint_collides(new_pose, scene, door_angle, limits):
        new_pose = state.base
        valid = False
    return (
        replace(
            state,
            base=new_pose,
            lift=clamp(state.lift + cmd.d_lift, *LIFT_RANGE),
            extension=clamp(state.extension + cmd.d_extend, *EXTENSION_RANGE),
            wrist=wrap_angle(state.wrist + cmd.d_wrist),
        ),
        valid,
    )


def point_segment_distance(px: float, py: float, x1: float, y1: float,
                           x2: float, y2: float) -> Tuple[float, float]:
    """Distance from a point to a segment and the clamped projection
    parameter t in [0, 1]."""
    ex, ey = x2 - x1, y2 - y1
    len2 = ex * ex + ey * ey
    if len2 <= 1e-12:
        return math.hypot(px - x1, py - y1), 0.0
    t = clamp(((px - x1) * ex + (py - y1) * ey) / len2, 0.0, 1.0)
    return math.hypot(px - (x1 + t * ex), py - (y1 + t * ey)), t


def rect_distance(px: float, py: float, rect: Sequence[float]) -> float:
    """Distance from a point to a solid axis-aligned rect (0 inside)."""
    x0, y0, x1, y1 = rect
    dx = max(x0 - px, px - x1, 0.0)
    dy = max(y0 - py, py - y1, 0.0)
    return math.hypot(dx, dy)


def arm_ik(tip_local_x: float, tip_local_y: float,
           limits: RobotLimits = DEFAULT_LIMITS) -> Optional[Tuple[float, float]]:
    """Solve (extension, wrist) putting the gripper tip at a robot-frame
    point, if reachable.  Robot frame: +x forward, +y left.

    tip_local = (fwd + g*sin(w), -(lat + ext) - g*cos(w))
    """
    g = limits.gripper_length
    sx = (tip_local_x - limits.arm_forward_offset) / g
    if abs(sx) > 1.0:
        return None
    w0 = math.asin(sx)
    best = None
    for w in (w0, math.pi - w0):  # two wrist branches
        ext = -tip_local_y - g * math.cos(w) - limits.arm_lateral_base
        if EXTENSION_RANGE[0] - 1e-9 <= ext <= EXTENSION_RANGE[1] + 1e-9:
            ext = clamp(ext, *EXTENSION_RANGE)
            cand = (ext, wrap_angle(w))
            if best is None or abs(cand[1]) < abs(best[1]):
                best = cand
    return best
