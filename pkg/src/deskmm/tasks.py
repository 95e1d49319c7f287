"""Task catalogue and per-task constants (reach radii, success thresholds,
spawn bands, progress weights)."""
from __future__ import annotations

from enum import Enum


class TaskKind(str, Enum):
    DOOR_PUSH = "door_push"
    DOOR_PULL = "door_pull"
    OPEN_FRIDGE = "open_fridge"
    CLEAN_TABLE = "clean_table"

    @classmethod
    def parse(cls, name: str) -> "TaskKind":
        try:
            return cls(name.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown task {name!r}; choose from "
                             f"{[t.value for t in cls]}") from None


DOOR_TASKS = (TaskKind.DOOR_PUSH, TaskKind.DOOR_PULL)
ARTICULATED_TASKS = (TaskKind.DOOR_PUSH, TaskKind.DOOR_PULL, TaskKind.OPEN_FRIDGE)
PULL_TASKS = (TaskKind.DOOR_PULL, TaskKind.OPEN_FRIDGE)

# success = progress strictly greater than the threshold
SUCCESS_THRESHOLD = {
    TaskKind.DOOR_PUSH: 0.90,
    TaskKind.DOOR_PULL: 0.90,
    TaskKind.OPEN_FRIDGE: 0.70,
    TaskKind.CLEAN_TABLE: 0.75,
}

# base-to-target distance at which the navigation phase counts as done
D_REACH = {
    TaskKind.DOOR_PUSH: 1.0,
    TaskKind.DOOR_PULL: 1.0,
    TaskKind.OPEN_FRIDGE: 1.0,
    TaskKind.CLEAN_TABLE: 0.6,
}

# spawn distance band (to handle for door/fridge, to table edge for cleaning)
SPAWN_BAND = {
    TaskKind.DOOR_PUSH: (1.0, 3.0),
    TaskKind.DOOR_PULL: (1.0, 3.0),
    TaskKind.OPEN_FRIDGE: (1.0, 3.0),
    TaskKind.CLEAN_TABLE: (1.0, 4.0),
}

W_PROGRESS = {
    TaskKind.DOOR_PUSH: 80.0,
    TaskKind.DOOR_PULL: 80.0,
    TaskKind.OPEN_FRIDGE: 80.0,
    TaskKind.CLEAN_TABLE: 100.0,
}

MAX_EPISODE_STEPS = 500
EE_REGION_RADIUS = 0.15


def has_grasp_dim(task: TaskKind) -> bool:
    """Door and fridge tasks expose the sixth (grasp) action dimension."""
    return task in ARTICULATED_TASKS


def uses_grasp(task: TaskKind) -> bool:
    """Only pull-style articulation consumes the grasp action."""
    return task in PULL_TASKS


def is_success(task: TaskKind, progress: float) -> bool:
    """Strict-inequality success test on task progress."""
    return progress > SUCCESS_THRESHOLD[task]
