"""Shaped reward: navigation approach, manipulation shaping + progress,
and efficiency penalties.

Total per-step reward is
``w_nav * R_nav + w_manip * R_manip + w_efficiency * R_efficiency`` with
closest-distance shaping trackers and one-time bonuses (reach, grasp,
finish) latched in :class:`RewardState`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .tasks import TaskKind, W_PROGRESS, EE_REGION_RADIUS


@dataclass(frozen=True)
class RewardWeights:
    w_nav: float = 1.0
    w_nav_shaping: float = 2.0
    r_reach_target: float = 2.0
    w_manip: float = 1.0
    w_manip_shaping: float = 0.02
    w_progress: float = 80.0  # 80 door/fridge, 100 table
    r_finish_task: float = 20.0
    w_grasp: float = 2.0
    r_step_penalty: float = -0.01
    w_ee_moved: float = -0.01
    r_invalid_action: float = -0.01
    w_efficiency: float = 1.0
    ee_region_radius: float = EE_REGION_RADIUS

    @classmethod
    def for_task(cls, task: TaskKind, **overrides) -> "RewardWeights":
        return cls(w_progress=W_PROGRESS[task], **overrides)


@dataclass
class RewardState:
    """Per-episode trackers; closest distances only shrink and one-time
    flags never reset within an episode."""

    d_closest: float
    d_ee_closest: float
    reached_target: bool = False
    ee_reached_region: bool = False
    grasp_rewarded: bool = False
    finished: bool = False
    last_progress: float = 0.0

    @classmethod
    def initial(cls, d0: float, d_ee0: float, progress0: float = 0.0) -> "RewardState":
        return cls(d_closest=d0, d_ee_closest=d_ee0, last_progress=progress0)


@dataclass(frozen=True)
class RewardBreakdown:
    nav: float
    manip: float
    efficiency: float
    total: float

    def as_dict(self) -> dict:
        return {"nav": self.nav, "manip": self.manip,
                "efficiency": self.efficiency, "total": self.total}


def nav_reward(rs: RewardState, w: RewardWeights, d_current: float,
               reached_now: bool) -> float:
    """Closest-distance approach shaping plus a one-time reach bonus; cut
    off entirely once the target has been reached."""
    if d_current < 0 or not math.isfinite(d_current):
        raise ValueError(f"invalid nav distance {d_current}")
    if rs.reached_target:
        return 0.0
    r = w.w_nav_shaping * max(rs.d_closest - d_current, 0.0)
    rs.d_closest = min(rs.d_closest, d_current)
    if reached_now:
        r += w.r_reach_target
        rs.reached_target = True
    return r


def manip_reward(rs: RewardState, w: RewardWeights, d_ee: float, progress: float,
                 finished_now: bool, grasped_now: bool) -> float:
    """End-effector approach shaping (gated off once the target region has
    been entered), progress delta, and one-time grasp / finish bonuses."""
    if d_ee < 0 or not math.isfinite(d_ee):
        raise ValueError(f"invalid end-effector distance {d_ee}")
    if not (-1e-9 <= progress <= 1.0 + 1e-9):
        raise ValueError(f"progress {progress} outside [0, 1]")
    r = 0.0
    if not rs.ee_reached_region:
        r += w.w_manip_shaping * math.exp(-5.0 * d_ee) * 1000.0 * max(rs.d_ee_closest - d_ee, 0.0)
    rs.d_ee_closest = min(rs.d_ee_closest, d_ee)
    if d_ee <= w.ee_region_radius:
        rs.ee_reached_region = True
    r += w.w_progress * (progress - rs.last_progress)
    rs.last_progress = progress
    if grasped_now and not rs.grasp_rewarded:
        r += w.w_grasp
        rs.grasp_rewarded = True
    if finished_now and not rs.finished:
        r += w.r_finish_task
        rs.finished = True
    return r


def efficiency_reward(w: RewardWeights, ee_moved: float, action_valid: bool) -> float:
    """Constant step penalty, end-effector motion penalty, and an invalid
    action penalty when the base move was rejected."""
    r = w.r_step_penalty + w.w_ee_moved * ee_moved
    if not action_valid:
        r += w.r_invalid_action
    return r


def total_reward(rs: RewardState, w: RewardWeights, *, d_current: float,
                 reached_now: bool, d_ee: float, progress: float, finished_now: bool,
                 grasped_now: bool, ee_moved: float, action_valid: bool) -> RewardBreakdown:
    nav = nav_reward(rs, w, d_current, reached_now)
    manip = manip_reward(rs, w, d_ee, progress, finished_now, grasped_now)
    eff = efficiency_reward(w, ee_moved, action_valid)
    return RewardBreakdown(nav=nav, manip=manip, efficiency=eff,
                           total=w.w_nav * nav + w.w_manip * manip + w.w_efficiency * eff)
