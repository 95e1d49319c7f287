"""Procedural articulation (push / pull door and fridge opening) and dirt
sweeping.

Door panels have no dynamics of their own: their angle is re-estimated
each step from what the robot's end-effector did, with a bisection guard
that keeps the panel from sweeping into the robot's footprint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .geometry import (DEFAULT_LIMITS, RobotLimits, RobotState, gripper_tip,
                       point_segment_distance, wrap_angle)
from .scene import DoorSpec


@dataclass(frozen=True)
class InteractionParams:
    """The tunable contact model, in one table."""

    align_cos: float = 0.5  # cos(60 deg) alignment gate for pushing
    contact_eps: float = 0.08  # tip-to-panel contact distance
    push_lift_band: float = 0.4  # |lift - handle_height| tolerance for pushing
    dtheta_max: float = 0.15  # per-step panel rotation cap (rad)
    lever_floor: float = 0.2  # minimum lever arm (m)
    grasp_radius: float = 0.10  # planar tip-to-handle grasp distance
    grasp_lift_band: float = 0.10  # |lift - handle_height| tolerance for grasping
    grasp_break: float = 0.25  # magnetic grasp breaks beyond this
    sponge_radius: float = 0.06
    sweep_lift_band: float = 0.05  # |lift - table height| tolerance for sweeping
    bisection_iters: int = 20


DEFAULT_INTERACTION = InteractionParams()


@dataclass
class DoorState:
    spec: DoorSpec
    theta: float = 0.0

    def __post_init__(self):
        self.theta = min(max(self.theta, 0.0), self.spec.theta_max)

    def handle_xyz(self) -> Tuple[float, float, float]:
        return self.spec.handle_xyz(self.theta)

    def panel_segment(self) -> Tuple[float, float, float, float]:
        return self.spec.panel_segment(self.theta)


@dataclass
class GraspState:
    holding: bool = False


@dataclass
class DirtField:
    positions: np.ndarray  # (n, 2) float64
    alive: np.ndarray  # (n,) bool

    @classmethod
    def from_points(cls, points) -> "DirtField":
        pos = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return cls(positions=pos, alive=np.ones(pos.shape[0], dtype=bool))

    @property
    def initial_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def remaining(self) -> int:
        return int(self.alive.sum())

    def removed_fraction(self) -> float:
        n = self.initial_count
        return 0.0 if n == 0 else (n - self.remaining) / n


def handle_position(door: DoorState) -> Tuple[float, float, float]:
    return door.handle_xyz()


def open_fraction(door: DoorState) -> float:
    return door.theta / door.spec.theta_max


def try_grasp(robot: RobotState, door: DoorState, grasp: GraspState,
              params: InteractionParams = DEFAULT_INTERACTION,
              limits: RobotLimits = DEFAULT_LIMITS) -> GraspState:
    """Magnetic grasp: latches when the tip is within the grasp radius of
    the handle at roughly handle height; a no-op otherwise or when already
    holding."""
    if grasp.holding:
        return grasp
    tx, ty, tz = gripper_tip(robot, limits)
    hx, hy, hz = door.handle_xyz()
    if math.hypot(tx - hx, ty - hy) <= params.grasp_radius and abs(tz - hz) <= params.grasp_lift_band:
        return GraspState(holding=True)
    return grasp


def _panel_hits_footprint(spec: DoorSpec, theta: float, base_xy: Tuple[float, float],
                          radius: float) -> bool:
    x1, y1, x2, y2 = spec.panel_segment(theta)
    d, _ = point_segment_distance(base_xy[0], base_xy[1], x1, y1, x2, y2)
    return d < radius


def _max_clear_theta(spec: DoorSpec, theta_from: float, theta_to: float,
                     base_xy: Tuple[float, float], radius: float, iters: int) -> float:
    """Largest panel motion from theta_from toward theta_to whose endpoint
    keeps the panel off the robot footprint (bisection; theta_from is
    assumed clear)."""
    if not _panel_hits_footprint(spec, theta_to, base_xy, radius):
        return theta_to
    lo, hi = theta_from, theta_to  # lo clear, hi colliding
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _panel_hits_footprint(spec, mid, base_xy, radius):
            hi = mid
        else:
            lo = mid
    return lo


def resolve_push(robot_before: RobotState, robot_after: RobotState, door: DoorState,
                 params: InteractionParams = DEFAULT_INTERACTION,
                 limits: RobotLimits = DEFAULT_LIMITS) -> DoorState:
    """Open the panel incrementally when the end-effector moved into it
    along the opening normal; never closes."""
    from .geometry import end_effector_position

    spec = door.spec
    ex0, ey0, _ = end_effector_position(robot_before, limits)
    ex1, ey1, _ = end_effector_position(robot_after, limits)
    mx, my = ex1 - ex0, ey1 - ey0
    m_norm = math.hypot(mx, my)
    if m_norm <= 1e-12:
        return door
    tx, ty, tz = gripper_tip(robot_after, limits)
    if abs(tz - spec.handle_height) > params.push_lift_band:
        return door
    x1, y1, x2, y2 = door.panel_segment()
    tip_dist, t = point_segment_distance(tx, ty, x1, y1, x2, y2)
    if tip_dist > params.contact_eps:
        return door
    nx, ny = spec.open_normal(door.theta)
    push = mx * nx + my * ny
    if push < params.align_cos * m_norm:
        return door
    lever = max(params.lever_floor, t * spec.panel_width)
    dtheta = min(params.dtheta_max, push / lever)
    target = min(spec.theta_max, door.theta + dtheta)
    base = (robot_after.base.x, robot_after.base.y)
    new_theta = _max_clear_theta(spec, door.theta, target, base, limits.base_radius,
                                 params.bisection_iters)
    return replace(door, theta=new_theta)


def resolve_pull(robot_after: RobotState, door: DoorState, grasp: GraspState,
                 params: InteractionParams = DEFAULT_INTERACTION,
                 limits: RobotLimits = DEFAULT_LIMITS) -> Tuple[DoorState, GraspState]:
    """Track the handle toward the gripper tip while holding; the grasp
    breaks when the handle cannot stay within reach.  A strict no-op
    without a grasp."""
    if not grasp.holding:
        return door, grasp
    spec = door.spec
    tx, ty, _ = gripper_tip(robot_after, limits)
    hx0, hy0 = spec.hinge
    # unconstrained optimum: panel direction pointing at the tip
    tip_ang = math.atan2(ty - hy0, tx - hx0)
    closed_ang = math.atan2(spec.closed_dir[1], spec.closed_dir[0])
    theta_opt = spec.swing_sign * wrap_angle(tip_ang - closed_ang)
    lo = max(0.0, door.theta - params.dtheta_max)
    hi = min(spec.theta_max, door.theta + params.dtheta_max)

    def planar_dist(theta: float) -> float:
        hx, hy = spec.handle_xy(theta)
        return math.hypot(tx - hx, ty - hy)

    candidates = [lo, hi, min(max(theta_opt, lo), hi)]
    target = min(candidates, key=planar_dist)
    base = (robot_after.base.x, robot_after.base.y)
    new_theta = _max_clear_theta(spec, door.theta, target, base, limits.base_radius,
                                 params.bisection_iters)
    new_door = replace(door, theta=new_theta)
    if planar_dist(new_theta) > params.grasp_break:
        return new_door, GraspState(holding=False)
    return new_door, grasp


def sweep_dirt(robot: RobotState, table_height: float, dirt: DirtField,
               params: InteractionParams = DEFAULT_INTERACTION,
               limits: RobotLimits = DEFAULT_LIMITS) -> int:
    """Remove dirt within the sponge radius of the tip while the lift is at
    table height; returns the count removed this step."""
    tx, ty, tz = gripper_tip(robot, limits)
    if abs(tz - table_height) > params.sweep_lift_band:
        return 0
    d2 = (dirt.positions[:, 0] - tx) ** 2 + (dirt.positions[:, 1] - ty) ** 2
    hit = dirt.alive & (d2 <= params.sponge_radius ** 2)
    removed = int(hit.sum())
    if removed:
        dirt.alive &= ~hit
    return removed
