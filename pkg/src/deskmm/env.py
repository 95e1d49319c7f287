"""Episode lifecycle: reset/step, observation assembly, success metrics,
and the lockstep vectorized runner.

Observation layout (19 values):
  [0]  lift                [5:7]  ee-target offset, robot frame (fwd, left)
  [1]  extension           [7]    ee-target height minus lift
  [2]  sin(wrist)          [8]    base-to-target distance
  [3]  cos(wrist)          [9]    heading error to target
  [4]  holding flag        [10]   task progress
  [11:19]  8 range rays at 45 deg spacing, capped at 3 m
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .geometry import (DEFAULT_LIMITS, ActionCommand, Pose2, RobotLimits,
                       RobotState, apply_action, clamp_action, gripper_tip,
                       wrap_angle)
from .interaction import (DEFAULT_INTERACTION, DirtField, DoorState, GraspState,
                          InteractionParams, open_fraction, resolve_pull,
                          resolve_push, sweep_dirt, try_grasp)
from .reward import RewardBreakdown, RewardState, RewardWeights, total_reward
from .scene import Scene, SpawnBand, generate_scene, sample_spawn
from .tasks import (D_REACH, MAX_EPISODE_STEPS, TaskKind, has_grasp_dim,
                    is_success, uses_grasp)

OBS_DIM = 19
N_RAYS = 8
RAY_MAX = 3.0
INITIAL_LIFT = 0.5


class SceneCache:
    """Shared (task, seed) -> Scene cache; scenes are immutable apart from
    internal memoization, so reuse across envs is safe."""

    def __init__(self, max_entries: int = 1024):
        self.max_entries = max_entries
        self._scenes: Dict[Tuple[TaskKind, int], Scene] = {}

    def get(self, task: TaskKind, seed: int) -> Scene:
        key = (task, seed)
        if key not in self._scenes:
            if len(self._scenes) >= self.max_entries:
                self._scenes.clear()
            self._scenes[key] = generate_scene(task, seed)
        return self._scenes[key]


_DEFAULT_CACHE = SceneCache()


@dataclass(frozen=True)
class EpisodeSummary:
    success: bool
    progress: float
    episode_length: int
    progress_speed: float
    return_total: float
    scene_seed: int
    spawn_seed: int

    def as_dict(self) -> dict:
        return {
            "success": self.success,
            "progress": self.progress,
            "episode_length": self.episode_length,
            "progress_speed": self.progress_speed,
            "return_total": self.return_total,
            "scene_seed": self.scene_seed,
            "spawn_seed": self.spawn_seed,
        }


def progress_speed(progress: float, episode_length: int,
                   max_steps: int = MAX_EPISODE_STEPS) -> float:
    """Task progress divided by the normalized episode length."""
    if episode_length <= 0:
        return 0.0
    return progress / (episode_length / max_steps)


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: RewardBreakdown
    terminated: bool
    truncated: bool
    info: dict


@dataclass
class PhysicsOutcome:
    robot: RobotState
    door: Optional[DoorState]
    grasp: GraspState
    removed: int
    valid: bool
    grasped_now: bool


def step_physics(scene: Scene, task: TaskKind, robot: RobotState,
                 door: Optional[DoorState], grasp: GraspState, dirt: Optional[DirtField],
                 cmd: ActionCommand, params: InteractionParams = DEFAULT_INTERACTION,
                 limits: RobotLimits = DEFAULT_LIMITS, mutate_dirt: bool = True) -> PhysicsOutcome:
    """One step of the actuation + articulation pipeline, shared between
    the environment and privileged lookahead controllers."""
    door_theta = door.theta if door is not None else 0.0
    robot_after, valid = apply_action(robot, cmd, scene, door_theta, limits)
    grasped_now = False
    new_grasp = grasp
    new_door = door
    removed = 0
    if task is TaskKind.CLEAN_TABLE:
        assert dirt is not None and scene.table is not None
        if mutate_dirt:
            removed = sweep_dirt(robot_after, scene.table.height, dirt, params, limits)
        else:
            tx, ty, tz = gripper_tip(robot_after, limits)
            if abs(tz - scene.table.height) <= params.sweep_lift_band:
                d2 = (dirt.positions[:, 0] - tx) ** 2 + (dirt.positions[:, 1] - ty) ** 2
                removed = int((dirt.alive & (d2 <= params.sponge_radius ** 2)).sum())
    elif task is TaskKind.DOOR_PUSH:
        assert door is not None
        new_door = resolve_push(robot, robot_after, door, params, limits)
    else:  # pull door / fridge
        assert door is not None
        if uses_grasp(task) and cmd.grasp:
            was = grasp.holding
            new_grasp = try_grasp(robot_after, door, grasp, params, limits)
            grasped_now = new_grasp.holding and not was
        new_door, new_grasp = resolve_pull(robot_after, door, new_grasp, params, limits)
    robot_after = replace(robot_after, holding=new_grasp.holding)
    return PhysicsOutcome(robot=robot_after, door=new_door, grasp=new_grasp,
                          removed=removed, valid=valid, grasped_now=grasped_now)


class Env:
    """Single-task episodic environment; fully determined by
    (scene_seed, spawn_seed, action sequence)."""

    def __init__(self, task: TaskKind, *, limits: RobotLimits = DEFAULT_LIMITS,
                 interaction: InteractionParams = DEFAULT_INTERACTION,
                 weights: Optional[RewardWeights] = None,
                 max_steps: int = MAX_EPISODE_STEPS,
                 band: Optional[SpawnBand] = None,
                 scene_cache: Optional[SceneCache] = None):
        self.task = TaskKind(task)
        self.limits = limits
        self.interaction = interaction
        self.weights = weights or RewardWeights.for_task(self.task)
        self.max_steps = max_steps
        self.band = band
        self.scene_cache = scene_cache or _DEFAULT_CACHE
        self.d_reach = D_REACH[self.task]

        self.scene: Optional[Scene] = None
        self.robot: Optional[RobotState] = None
        self.door: Optional[DoorState] = None
        self.dirt: Optional[DirtField] = None
        self.grasp = GraspState()
        self.reward_state: Optional[RewardState] = None
        self.t = 0
        self.return_total = 0.0
        self.scene_seed = 0
        self.spawn_seed = 0
        self._done = True
        self._summary: Optional[EpisodeSummary] = None
        self._ray_angles = np.arange(N_RAYS) * (2.0 * math.pi / N_RAYS)

    # -- lifecycle ---------------------------------------------------------

    def reset(self, scene_seed: int, spawn_seed: int) -> np.ndarray:
        self.scene = self.scene_cache.get(self.task, scene_seed)
        pose = sample_spawn(self.scene, spawn_seed, self.band)
        self.robot = RobotState(base=pose, lift=INITIAL_LIFT, extension=0.0, wrist=0.0)
        self.door = DoorState(self.scene.door) if self.scene.door is not None else None
        self.dirt = (DirtField.from_points(self.scene.table.dirt)
                     if self.scene.table is not None else None)
        self.grasp = GraspState()
        self.reward_state = RewardState.initial(
            d0=self._nav_distance(), d_ee0=self._ee_distance(), progress0=0.0)
        self.t = 0
        self.return_total = 0.0
        self.scene_seed = int(scene_seed)
        self.spawn_seed = int(spawn_seed)
        self._done = False
        self._summary = None
        return self.observation()

    def step(self, raw_action: Sequence[float]) -> StepResult:
        if self._done:
            raise RuntimeError("episode is finished; call reset() first")
        cmd = clamp_action(raw_action, has_grasp_dim(self.task))
        tip_before = gripper_tip(self.robot, self.limits)
        out = step_physics(self.scene, self.task, self.robot, self.door, self.grasp,
                           self.dirt, cmd, self.interaction, self.limits)
        self.robot, self.door, self.grasp = out.robot, out.door, out.grasp

        prog = self.progress()
        finished_now = is_success(self.task, prog)
        d_current = self._nav_distance()
        tip_after = gripper_tip(self.robot, self.limits)
        ee_moved = math.dist(tip_before, tip_after)
        breakdown = total_reward(
            self.reward_state, self.weights,
            d_current=d_current,
            reached_now=d_current <= self.d_reach,
            d_ee=self._ee_distance(),
            progress=prog,
            finished_now=finished_now,
            grasped_now=out.grasped_now,
            ee_moved=ee_moved,
            action_valid=out.valid,
        )
        self.return_total += breakdown.total
        self.t += 1
        terminated = finished_now
        truncated = not terminated and self.t >= self.max_steps
        self._done = terminated or truncated
        info = {
            "progress": prog,
            "valid": out.valid,
            "d_current": d_current,
            "d_ee": self._ee_distance(),
            "holding": self.grasp.holding,
            "removed": out.removed,
        }
        if self.door is not None:
            info["door_theta"] = self.door.theta
        if self.dirt is not None:
            info["dirt_remaining"] = self.dirt.remaining
        if self._done:
            self._summary = EpisodeSummary(
                success=terminated, progress=prog, episode_length=self.t,
                progress_speed=progress_speed(prog, self.t, self.max_steps),
                return_total=self.return_total, scene_seed=self.scene_seed,
                spawn_seed=self.spawn_seed)
        return StepResult(observation=self.observation(), reward=breakdown,
                          terminated=terminated, truncated=truncated, info=info)

    @property
    def done(self) -> bool:
        return self._done

    def summary(self) -> EpisodeSummary:
        if self._summary is None:
            raise RuntimeError("episode not finished")
        return self._summary

    # -- measurements --------------------------------------------------------

    def progress(self) -> float:
        if self.door is not None:
            return open_fraction(self.door)
        return self.dirt.removed_fraction()

    def _nav_distance(self) -> float:
        theta = self.door.theta if self.door is not None else 0.0
        return self.scene.nav_distance((self.robot.base.x, self.robot.base.y), theta)

    def _ee_distance(self) -> float:
        theta = self.door.theta if self.door is not None else 0.0
        tx, ty, tz = gripper_tip(self.robot, self.limits)
        gx, gy, gz = self.scene.ee_target_xyz(theta)
        return math.sqrt((tx - gx) ** 2 + (ty - gy) ** 2 + (tz - gz) ** 2)

    def _heading_target_xy(self) -> Tuple[float, float]:
        theta = self.door.theta if self.door is not None else 0.0
        if self.door is not None:
            return self.door.spec.handle_xy(theta)
        return self.scene.table.center()

    def observation(self) -> np.ndarray:
        r = self.robot
        obs = np.empty(OBS_DIM, dtype=np.float64)
        obs[0] = r.lift
        obs[1] = r.extension
        obs[2] = math.sin(r.wrist)
        obs[3] = math.cos(r.wrist)
        obs[4] = 1.0 if r.holding else 0.0
        theta_door = self.door.theta if self.door is not None else 0.0
        gx, gy, gz = self.scene.ee_target_xyz(theta_door)
        dx, dy = gx - r.base.x, gy - r.base.y
        c, s = math.cos(r.base.theta), math.sin(r.base.theta)
        obs[5] = c * dx + s * dy
        obs[6] = -s * dx + c * dy
        obs[7] = gz - r.lift
        obs[8] = self._nav_distance()
        hx, hy = self._heading_target_xy()
        obs[9] = wrap_angle(math.atan2(hy - r.base.y, hx - r.base.x) - r.base.theta)
        obs[10] = self.progress()
        segs = self.scene.collision_segments(theta_door)
        obs[11:] = kernels.raycast(segs, self.scene.solid_rects, r.base.x, r.base.y,
                                   self._ray_angles + r.base.theta, RAY_MAX)
        return obs


# ---------------------------------------------------------------------------
# seed streams and the vectorized runner
# ---------------------------------------------------------------------------


class SeedStream:
    """Deterministic (scene_seed, spawn_seed) pairs indexed by episode
    number; scene seeds cycle over a fixed pool."""

    def __init__(self, scene_seeds: Sequence[int], spawn_base: int = 0):
        self.scene_seeds = list(scene_seeds)
        self.spawn_base = spawn_base

    def pair(self, episode_index: int) -> Tuple[int, int]:
        return (self.scene_seeds[episode_index % len(self.scene_seeds)],
                self.spawn_base + episode_index)


class VecRunner:
    """Advances N envs in lockstep with auto-reset; episode seed assignment
    follows a single global episode counter, so results are independent of
    how many envs run side by side."""

    def __init__(self, envs: List[Env], stream: SeedStream):
        self.envs = envs
        self.stream = stream
        self.episode_counter = 0
        self.summaries: List[EpisodeSummary] = []
        self._obs = np.zeros((len(envs), OBS_DIM))
        for i in range(len(envs)):
            self._reset_env(i)

    def _reset_env(self, i: int):
        scene_seed, spawn_seed = self.stream.pair(self.episode_counter)
        self.episode_counter += 1
        self._obs[i] = self.envs[i].reset(scene_seed, spawn_seed)

    @property
    def observations(self) -> np.ndarray:
        return self._obs.copy()

    def step(self, raw_actions: np.ndarray):
        """Returns (rewards, dones, next_obs, infos); envs that finished are
        auto-reset and next_obs holds their fresh episode observation."""
        n = len(self.envs)
        rewards = np.zeros(n)
        dones = np.zeros(n, dtype=bool)
        infos: List[dict] = []
        for i, env in enumerate(self.envs):
            try:
                res = env.step(raw_actions[i])
            except Exception as exc:
                raise RuntimeError(f"environment {i} failed: {exc}") from exc
            rewards[i] = res.reward.total
            dones[i] = res.terminated or res.truncated
            infos.append(res.info)
            if dones[i]:
                self.summaries.append(env.summary())
                self._reset_env(i)
            else:
                self._obs[i] = res.observation
        return rewards, dones, self._obs.copy(), infos


def run_vectorized(envs: List[Env], policy, num_steps: int, stream: SeedStream):
    """Drive N envs for num_steps with a batched policy.

    ``policy`` provides ``act(obs_batch) -> (N, action_dim) raw actions``
    and optionally ``begin_episode(i)`` called whenever env i starts a new
    episode.  Returns (runner, transition list).
    """
    runner = VecRunner(envs, stream)
    if hasattr(policy, "begin_episode"):
        for i in range(len(envs)):
            policy.begin_episode(i)
    transitions = []
    for _ in range(num_steps):
        obs = runner.observations
        actions = policy.act(obs)
        rewards, dones, next_obs, infos = runner.step(actions)
        transitions.append((obs, actions, rewards, dones))
        if hasattr(policy, "begin_episode"):
            for i in np.nonzero(dones)[0]:
                policy.begin_episode(int(i))
    return runner, transitions
