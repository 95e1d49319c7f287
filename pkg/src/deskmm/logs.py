"""Line-delimited episode logs: one JSON record per step plus a header and
a summary record.

Field order is fixed so identical episodes serialize to identical bytes;
replaying the logged raw actions through a fresh environment reproduces the
log exactly.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from .env import Env, EpisodeSummary, StepResult
from .scene import SpawnBand
from .tasks import TaskKind

LOG_FORMAT_VERSION = 1


def header_record(env: Env) -> dict:
    rec = {
        "type": "header",
        "log_format_version": LOG_FORMAT_VERSION,
        "task": env.task.value,
        "scene_seed": env.scene_seed,
        "spawn_seed": env.spawn_seed,
        "max_steps": env.max_steps,
        "band": [env.band.d_min, env.band.d_max] if env.band else None,
    }
    return rec


def step_record(t: int, raw_action, res: StepResult) -> dict:
    rec = {
        "type": "step",
        "t": t,
        "action": [float(a) for a in raw_action],
        "reward": res.reward.as_dict(),
        "progress": res.info["progress"],
        "valid": res.info["valid"],
    }
    if "door_theta" in res.info:
        rec["door_theta"] = res.info["door_theta"]
    if "dirt_remaining" in res.info:
        rec["dirt_remaining"] = res.info["dirt_remaining"]
    return rec


def summary_record(summary: EpisodeSummary) -> dict:
    rec = {"type": "summary"}
    rec.update(summary.as_dict())
    return rec


def dump_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)


def parse_records(text: str) -> List[dict]:
    records = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed log line {ln}: {exc}") from None
    return records


def load_log(path) -> List[dict]:
    return parse_records(Path(path).read_text())


def split_log(records: List[dict]) -> Tuple[dict, List[dict], Optional[dict]]:
    """(header, steps, summary); raises on missing/duplicated header."""
    headers = [r for r in records if r.get("type") == "header"]
    if len(headers) != 1:
        raise ValueError(f"log needs exactly one header record, found {len(headers)}")
    steps = [r for r in records if r.get("type") == "step"]
    summaries = [r for r in records if r.get("type") == "summary"]
    return headers[0], steps, summaries[0] if summaries else None


def run_episode(env: Env, controller, scene_seed: int, spawn_seed: int,
                collect_states: bool = False):
    """Run one full episode under a controller; returns
    (summary, records, states).  ``controller`` has ``begin_episode(env)``
    and ``act(env) -> raw action``;  states (when collected) hold the world
    snapshots used by the replay renderer."""
    records = []
    states = []
    env.reset(scene_seed, spawn_seed)
    controller.begin_episode(env)
    records.append(header_record(env))
    if collect_states:
        states.append(_world_state(env))
    t = 0
    while not env.done:
        raw = controller.act(env)
        res = env.step(raw)
        records.append(step_record(t, raw, res))
        if collect_states:
            states.append(_world_state(env))
        t += 1
    summary = env.summary()
    records.append(summary_record(summary))
    return summary, records, states


def _world_state(env: Env) -> dict:
    r = env.robot
    state = {
        "base": (r.base.x, r.base.y, r.base.theta),
        "lift": r.lift,
        "extension": r.extension,
        "wrist": r.wrist,
        "holding": r.holding,
        "door_theta": env.door.theta if env.door is not None else None,
        "dirt_alive": env.dirt.alive.copy() if env.dirt is not None else None,
    }
    return state


class _ReplayController:
    """Feeds back the raw actions recorded in a log."""

    def __init__(self, steps: List[dict]):
        self.actions = [s["action"] for s in steps]
        self.i = 0

    def begin_episode(self, env):
        self.i = 0

    def act(self, env):
        if self.i >= len(self.actions):
            raise ValueError("log ended before the episode finished")
        a = self.actions[self.i]
        self.i += 1
        return a


def replay_log(records: List[dict], collect_states: bool = False):
    """Re-execute a log's actions from its seeds; returns the same triple
    as :func:`run_episode`.  Bitwise equality with the original records is
    the determinism contract."""
    header, steps, _ = split_log(records)
    if header.get("log_format_version") != LOG_FORMAT_VERSION:
        raise ValueError(f"unsupported log format version {header.get('log_format_version')!r}")
    band = SpawnBand(*header["band"]) if header.get("band") else None
    env = Env(TaskKind(header["task"]), band=band, max_steps=header["max_steps"])
    return run_episode(env, _ReplayController(steps), header["scene_seed"],
                       header["spawn_seed"], collect_states=collect_states)
