"""Scripted controllers and action-space gates.

The oracle is a privileged greedy controller: each step it simulates a
small set of candidate base motions through the real physics pipeline
(arm deltas chosen by closed-form IK toward the phase target) and picks
the lowest-cost outcome.  Navigation costs come from BFS distance fields,
so approach has no local minima; manipulation costs score actual door
motion / dirt removal.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .env import Env, step_physics
from .geometry import (ACTION_BOUNDS, ActionCommand, Pose2, arm_ik, clamp,
                       end_effector_position, gripper_tip, wrap_angle)
from .tasks import D_REACH, TaskKind, has_grasp_dim, uses_grasp


class ControllerKind(str, Enum):
    SCRIPTED_ORACLE = "oracle"
    SCRIPTED_TWO_STAGE = "two_stage"
    LEARNED_JOINT = "joint"
    LEARNED_TWO_STAGE = "learned_two_stage"
    LEARNED_MODE_GATED = "mode_gated"

    @classmethod
    def parse(cls, name: str) -> "ControllerKind":
        try:
            return cls(name.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown controller {name!r}; choose from "
                             f"{[k.value for k in cls]}") from None


# -- action-space gates -------------------------------------------------------

ARM_DIMS = (2, 3, 4)  # d_lift, d_extend, d_wrist
BASE_DIMS = (0, 1)  # d_forward, d_rotate


def mode_gate(raw: np.ndarray, mode: str) -> np.ndarray:
    """Restrict a raw action to one sub-space; the grasp dim always passes."""
    out = np.array(raw[:6], dtype=np.float64)
    if mode == "nav":
        out[list(ARM_DIMS)] = 0.0
    elif mode == "manip":
        out[list(BASE_DIMS)] = 0.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out


def gate_mode_output(raw7: np.ndarray) -> np.ndarray:
    """Mode-gated policies emit a 7th output; positive sign selects the
    manipulation sub-space, otherwise navigation."""
    mode = "manip" if raw7[6] > 0.0 else "nav"
    return mode_gate(raw7[:6], mode)


# -- scripted oracle ----------------------------------------------------------

_BASE_CANDIDATES: List[Tuple[float, float]] = [
    (f, r) for f in (1.0, 0.5, 0.0, -0.5, -1.0) for r in (-1.0, -0.5, 0.0, 0.5, 1.0)
]
_FROZEN_BASE: List[Tuple[float, float]] = [(0.0, 0.0)]

_NAV_SWITCH = 0.85  # manipulate once this close to the target (m)
_LIFT_STEP, _EXT_STEP, _WRIST_STEP = ACTION_BOUNDS[2], ACTION_BOUNDS[3], ACTION_BOUNDS[4]


def _metric_to_raw(cmd: ActionCommand) -> np.ndarray:
    raw = np.zeros(6)
    raw[0] = cmd.d_forward / ACTION_BOUNDS[0]
    raw[1] = cmd.d_rotate / ACTION_BOUNDS[1]
    raw[2] = cmd.d_lift / ACTION_BOUNDS[2]
    raw[3] = cmd.d_extend / ACTION_BOUNDS[3]
    raw[4] = cmd.d_wrist / ACTION_BOUNDS[4]
    raw[5] = 1.0 if cmd.grasp else 0.0
    return raw


class ScriptedOracle:
    """Privileged environment-solvability controller."""

    base_candidates: List[Tuple[float, float]] = _BASE_CANDIDATES

    def begin_episode(self, env: Env) -> None:
        self.target_dirt: Optional[int] = None
        self.skip_dirt: set = set()
        self.stall = 0
        self.last_tip_dist = math.inf
        self.manip_latched = False

    # -- shared helpers -----------------------------------------------------

    def _pose_after(self, env: Env, fwd: float, rot: float) -> Pose2:
        b = env.robot.base
        theta = wrap_angle(b.theta + rot)
        return Pose2(b.x + fwd * math.cos(theta), b.y + fwd * math.sin(theta), theta)

    def _arm_toward(self, env: Env, pose_after: Pose2, lift_target: float,
                    tip_xy: Optional[Tuple[float, float]],
                    ext_target: Optional[float] = None,
                    wrist_target: float = 0.0) -> Tuple[float, float, float]:
        """Metric (d_lift, d_extend, d_wrist) steering toward a tip point
        (IK) or explicit joint targets."""
        r = env.robot
        d_lift = clamp(lift_target - r.lift, -_LIFT_STEP, _LIFT_STEP)
        if tip_xy is not None:
            dx, dy = tip_xy[0] - pose_after.x, tip_xy[1] - pose_after.y
            c, s = math.cos(pose_after.theta), math.sin(pose_after.theta)
            lx, ly = c * dx + s * dy, -s * dx + c * dy
            sol = arm_ik(lx, ly, env.limits)
            if sol is not None:
                ext_target, wrist_target = sol
            else:
                # out of planar reach: stretch toward it and point the gripper
                ext_target = clamp(-ly - env.limits.arm_lateral_base
                                   - env.limits.gripper_length, 0.0, 0.52)
                ex, ey, _ = end_effector_position(r, env.limits)
                wrist_target = wrap_angle(math.atan2(tip_xy[1] - ey, tip_xy[0] - ex)
                                          - (pose_after.theta - 0.5 * math.pi))
        elif ext_target is None:
            ext_target = r.extension
        d_ext = clamp(ext_target - r.extension, -_EXT_STEP, _EXT_STEP)
        d_wrist = clamp(wrap_angle(wrist_target - r.wrist), -_WRIST_STEP, _WRIST_STEP)
        return d_lift, d_ext, d_wrist

    def _nav_step(self, env: Env, field: np.ndarray, target_xy: Tuple[float, float],
                  lift_target: float) -> np.ndarray:
        """Descend a BFS distance field toward the target zone."""
        from .geometry import apply_action

        grid = env.scene.grid()
        door_theta = env.door.theta if env.door is not None else 0.0
        best_score, best_cmd = math.inf, None
        for f, rfrac in self.base_candidates:
            fwd, rot = ACTION_BOUNDS[0] * f, ACTION_BOUNDS[1] * rfrac
            pose = self._pose_after(env, fwd, rot)
            arm = self._arm_toward(env, pose, lift_target, None, ext_target=0.0)
            cmd = ActionCommand(fwd, rot, *arm, grasp=False)
            after, valid = apply_action(env.robot, cmd, env.scene, door_theta, env.limits)
            i, j = grid.cell_of(after.base.x, after.base.y)
            if grid.in_bounds(i, j) and field[i, j] >= 0:
                fv = float(field[i, j])
            else:
                fv = 1e6
            # the field is flat inside the target zone; euclidean descent
            # keeps the approach moving there
            euclid = math.hypot(target_xy[0] - after.base.x, target_xy[1] - after.base.y)
            bearing = math.atan2(target_xy[1] - after.base.y, target_xy[0] - after.base.x)
            herr = abs(wrap_angle(bearing - after.base.theta))
            score = fv + 6.0 * euclid + 0.4 * herr + 3.0 * (not valid) + 0.02 * abs(rfrac)
            if score < best_score:
                best_score, best_cmd = score, cmd
        return _metric_to_raw(best_cmd)

    def _search(self, env: Env, score_fn, lift_target: float,
                tip_xy_fn, grasp: bool) -> np.ndarray:
        """Simulate candidate base motions through the physics pipeline and
        keep the cheapest."""
        best_score, best_cmd = math.inf, None
        for f, rfrac in self.base_candidates:
            fwd, rot = ACTION_BOUNDS[0] * f, ACTION_BOUNDS[1] * rfrac
            pose = self._pose_after(env, fwd, rot)
            arm = self._arm_toward(env, pose, lift_target, tip_xy_fn(pose))
            cmd = ActionCommand(fwd, rot, *arm, grasp=grasp)
            out = step_physics(env.scene, env.task, env.robot, env.door, env.grasp,
                               env.dirt, cmd, env.interaction, env.limits,
                               mutate_dirt=False)
            score = score_fn(out)
            if score < best_score:
                best_score, best_cmd = score, cmd
        return _metric_to_raw(best_cmd)

    # -- door push ------------------------------------------------------------

    def _push_step(self, env: Env) -> np.ndarray:
        door = env.door
        spec = door.spec
        theta0 = door.theta
        handle = spec.handle_xy(theta0)

        def score(out) -> float:
            dtheta = out.door.theta - theta0
            tx, ty, tz = gripper_tip(out.robot, env.limits)
            hx, hy = spec.handle_xy(out.door.theta)
            tip_dist = math.hypot(tx - hx, ty - hy)
            return (-300.0 * dtheta + tip_dist + 0.3 * abs(tz - spec.handle_height)
                    + 1.0 * (not out.valid))

        return self._search(env, score, spec.handle_height, lambda pose: handle,
                            grasp=False)

    # -- door / fridge pull -----------------------------------------------------

    def _pregrasp_step(self, env: Env) -> np.ndarray:
        door = env.door
        spec = door.spec
        handle = spec.handle_xy(door.theta)

        def score(out) -> float:
            tx, ty, tz = gripper_tip(out.robot, env.limits)
            hx, hy, hz = spec.handle_xyz(out.door.theta)
            d = math.sqrt((tx - hx) ** 2 + (ty - hy) ** 2 + (tz - hz) ** 2)
            return d - 10.0 * out.grasp.holding + 1.0 * (not out.valid)

        return self._search(env, score, spec.handle_height, lambda pose: handle,
                            grasp=True)

    def _open_step(self, env: Env) -> np.ndarray:
        door = env.door
        spec = door.spec
        theta0 = door.theta
        theta_adv = min(theta0 + 0.10, spec.theta_max)
        handle_adv = spec.handle_xy(theta_adv)

        def score(out) -> float:
            dtheta = out.door.theta - theta0
            tx, ty, _ = gripper_tip(out.robot, env.limits)
            hx, hy = spec.handle_xy(min(out.door.theta + 0.10, spec.theta_max))
            return (-300.0 * dtheta + 500.0 * (not out.grasp.holding)
                    + 0.5 * math.hypot(tx - hx, ty - hy) + 0.5 * (not out.valid))

        return self._search(env, score, spec.handle_height, lambda pose: handle_adv,
                            grasp=True)

    # -- table sweeping ----------------------------------------------------------

    def _dirt_access_field(self, env: Env, idx: int):
        """BFS field to a standing spot beside the dirt point (cached per
        scene); None when no side of the table is reachable there."""
        scene = env.scene
        grid = scene.grid()
        zone = scene.reach_zone_field()
        key = ("dirt_access", idx)
        if key in scene._cache:
            return scene._cache[key]
        px, py = scene.table.dirt[idx]
        x0, y0, x1, y1 = scene.table.rect
        edges = sorted([
            (px - x0, (x0 - 0.33, py)),
            (x1 - px, (x1 + 0.33, py)),
            (py - y0, (px, y0 - 0.33)),
            (y1 - py, (px, y1 + 0.33)),
        ])
        result = None
        for _, (ax, ay) in edges:
            i, j = grid.cell_of(ax, ay)
            if grid.in_bounds(i, j) and not grid.occupied[i, j] and zone[i, j] >= 0:
                result = (grid.distance_field(np.array([[i, j]]), key=("cell", i, j)),
                          (ax, ay))
                break
        scene._cache[key] = result
        return result

    def _select_dirt(self, env: Env) -> Optional[int]:
        grid = env.scene.grid()
        ci, cj = grid.cell_of(env.robot.base.x, env.robot.base.y)
        best, best_cost = None, math.inf
        alive = np.nonzero(env.dirt.alive)[0]
        for idx in alive:
            if int(idx) in self.skip_dirt:
                continue
            acc = self._dirt_access_field(env, int(idx))
            if acc is None:
                continue
            field = acc[0]
            cost = float(field[ci, cj]) if (grid.in_bounds(ci, cj) and field[ci, cj] >= 0) else 1e6
            if cost < best_cost:
                best, best_cost = int(idx), cost
        if best is None and self.skip_dirt:
            self.skip_dirt.clear()
            return self._select_dirt(env)
        return best

    def _sweep_step(self, env: Env) -> np.ndarray:
        if self.target_dirt is None or not env.dirt.alive[self.target_dirt]:
            self.target_dirt = self._select_dirt(env)
            self.stall = 0
            self.last_tip_dist = math.inf
        if self.target_dirt is None:
            return np.zeros(6)
        idx = self.target_dirt
        px, py = env.scene.table.dirt[idx]
        acc = self._dirt_access_field(env, idx)
        field, access_xy = acc
        grid = env.scene.grid()
        ci, cj = grid.cell_of(env.robot.base.x, env.robot.base.y)
        geo = float(field[ci, cj]) if (grid.in_bounds(ci, cj) and field[ci, cj] >= 0) else 1e6
        if geo * grid.res > 0.45:
            return self._nav_step(env, field, access_xy, env.scene.table.height)

        height = env.scene.table.height

        def score(out) -> float:
            tx, ty, tz = gripper_tip(out.robot, env.limits)
            tip_dist = math.hypot(tx - px, ty - py)
            return (-100.0 * out.removed + tip_dist + 0.5 * abs(tz - height)
                    + 0.5 * (not out.valid))

        raw = self._search(env, score, height, lambda pose: (px, py), grasp=False)
        tx, ty, _ = gripper_tip(env.robot, env.limits)
        tip_dist = math.hypot(tx - px, ty - py)
        if tip_dist >= self.last_tip_dist - 1e-6:
            self.stall += 1
        else:
            self.stall = 0
        self.last_tip_dist = tip_dist
        if self.stall > 25:
            self.skip_dirt.add(idx)
            self.target_dirt = None
            self.stall = 0
        return raw

    # -- dispatch --------------------------------------------------------------

    def _in_manip_range(self, env: Env) -> bool:
        """Approach is judged against the closed-door handle (the field's
        anchor); once in manipulation range, stay there."""
        if not self.manip_latched:
            hx, hy = env.door.spec.handle_xy(0.0)
            b = env.robot.base
            if math.hypot(b.x - hx, b.y - hy) <= _NAV_SWITCH:
                self.manip_latched = True
        return self.manip_latched

    def act(self, env: Env) -> np.ndarray:
        task = env.task
        if task is TaskKind.CLEAN_TABLE:
            return self._sweep_step(env)
        if task is TaskKind.DOOR_PUSH:
            if not self._in_manip_range(env):
                return self._nav_step(env, env.scene.reach_zone_field(),
                                      env.door.spec.handle_xy(0.0),
                                      env.door.spec.handle_height)
            return self._push_step(env)
        # pull door / fridge
        if env.grasp.holding:
            return self._open_step(env)
        if not self._in_manip_range(env):
            return self._nav_step(env, env.scene.reach_zone_field(),
                                  env.door.spec.handle_xy(0.0),
                                  env.door.spec.handle_height)
        return self._pregrasp_step(env)


class ScriptedTwoStage(ScriptedOracle):
    """Navigate first, then manipulate with the base frozen; the switch at
    d_reach is irreversible."""

    def begin_episode(self, env: Env) -> None:
        super().begin_episode(env)
        self.switched = False

    def act(self, env: Env) -> np.ndarray:
        if not self.switched and env._nav_distance() <= D_REACH[env.task]:
            self.switched = True
        if not self.switched:
            self.base_candidates = _BASE_CANDIDATES
            if env.task is TaskKind.CLEAN_TABLE:
                field = env.scene.reach_zone_field()
                target = env.scene.table.center()
                lift = env.scene.table.height
            else:
                field = env.scene.reach_zone_field()
                target = env.door.spec.handle_xy(env.door.theta)
                lift = env.door.spec.handle_height
            raw = self._nav_step(env, field, target, lift)
            return mode_gate(raw, "nav")
        self.base_candidates = _FROZEN_BASE
        if env.task is TaskKind.CLEAN_TABLE:
            raw = self._sweep_step(env)
        elif env.task is TaskKind.DOOR_PUSH:
            raw = self._push_step(env)
        elif env.grasp.holding:
            raw = self._open_step(env)
        else:
            raw = self._pregrasp_step(env)
        out = mode_gate(raw, "manip")
        out[5] = raw[5]
        return out


# -- learned controller wrappers ----------------------------------------------


class LearnedController:
    """Wraps a RecurrentPolicy for evaluation (mean action); applies the
    factored-action gates for the baseline kinds."""

    def __init__(self, net, kind: ControllerKind, task: TaskKind):
        import torch

        self.net = net.eval()
        self.kind = kind
        self.task = task
        self.d_reach = D_REACH[task]
        self._torch = torch
        self.hidden = None
        self.switched = False

    def begin_episode(self, env: Env) -> None:
        self.hidden = None
        self.switched = False

    def act(self, env: Env) -> np.ndarray:
        torch = self._torch
        obs = torch.as_tensor(env.observation(), dtype=torch.float32).unsqueeze(0)
        if self.hidden is None:
            self.hidden = self.net.initial_state(1)
        with torch.no_grad():
            mean, _, _, self.hidden = self.net(obs, self.hidden)
        raw = mean[0].numpy().astype(np.float64)
        return self.gate(raw, float(obs[0, 8]))

    def gate(self, raw: np.ndarray, base_dist: float) -> np.ndarray:
        if self.kind is ControllerKind.LEARNED_MODE_GATED:
            return gate_mode_output(raw)
        if self.kind is ControllerKind.LEARNED_TWO_STAGE:
            if not self.switched and base_dist <= self.d_reach:
                self.switched = True
            return mode_gate(raw[:6], "manip" if self.switched else "nav")
        return np.array(raw[:6], dtype=np.float64)


def policy_action_dim(kind: ControllerKind) -> int:
    return 7 if kind is ControllerKind.LEARNED_MODE_GATED else 6


def make_controller(kind: ControllerKind, task: TaskKind,
                    checkpoint: Optional[str] = None):
    if kind is ControllerKind.SCRIPTED_ORACLE:
        return ScriptedOracle()
    if kind is ControllerKind.SCRIPTED_TWO_STAGE:
        return ScriptedTwoStage()
    from .policy import load_checkpoint

    if checkpoint is None:
        raise ValueError(f"controller {kind.value} needs a checkpoint")
    net, _ = load_checkpoint(checkpoint, expected_kind=kind.value)
    return LearnedController(net, kind, task)
