"""Seeded procedural generation of task scenes.

Scenes are axis-aligned room layouts: door tasks get two rooms joined by a
single hinged door, cleaning tasks get 1-3 rooms with a dirt-covered table,
fridge tasks get a single room with a fridge in a confined kitchen nook.
Generation and spawn sampling are pure functions of their seeds.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import Pose2, rect_distance, wrap_angle
from .grid import OccupancyGrid
from .tasks import SPAWN_BAND, D_REACH, TaskKind

SCENE_FORMAT_VERSION = 1
GENERATOR_VERSION = 1

ROOM_SIDE_RANGE = (3.0, 6.0)
DOOR_PANEL_WIDTH = 0.9
FRIDGE_PANEL_WIDTH = 0.6
THETA_MAX = 1.745
HANDLE_FRACTION = 0.8
HANDLE_HEIGHT = 0.95
TABLE_HEIGHT = 0.75
DIRT_COUNT_RANGE = (20, 60)
FRIDGE_CLEARANCE_RANGE = (0.8, 1.5)
MAX_GENERATION_ATTEMPTS = 100

# sub-seed tags so adding a sampler never perturbs existing streams
_TAG = {"layout": 11, "spawn": 23, "probe": 31}


class SceneGenerationError(RuntimeError):
    pass


def _rng(*entropy) -> np.random.Generator:
    ints = [int(e) & 0xFFFFFFFFFFFFFFFF for e in entropy]
    return np.random.default_rng(np.random.SeedSequence(ints))


def _rot(v: Tuple[float, float], a: float) -> Tuple[float, float]:
    c, s = math.cos(a), math.sin(a)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


@dataclass
class DoorSpec:
    hinge: Tuple[float, float]
    panel_width: float
    closed_dir: Tuple[float, float]  # unit vector along the closed panel
    swing_sign: int  # +1 opens CCW, -1 CW
    theta_max: float = THETA_MAX
    handle_fraction: float = HANDLE_FRACTION
    handle_height: float = HANDLE_HEIGHT
    kind: str = "door"  # door | fridge
    mode: str = "push"  # push | pull

    def panel_dir(self, theta: float) -> Tuple[float, float]:
        return _rot(self.closed_dir, self.swing_sign * theta)

    def panel_segment(self, theta: float) -> Tuple[float, float, float, float]:
        ux, uy = self.panel_dir(theta)
        return (self.hinge[0], self.hinge[1],
                self.hinge[0] + self.panel_width * ux,
                self.hinge[1] + self.panel_width * uy)

    def open_normal(self, theta: float) -> Tuple[float, float]:
        """Unit normal on the opening side of the panel (the direction a
        push must align with)."""
        ux, uy = self.panel_dir(theta)
        return (-self.swing_sign * uy, self.swing_sign * ux)

    def handle_xy(self, theta: float) -> Tuple[float, float]:
        ux, uy = self.panel_dir(theta)
        r = self.handle_fraction * self.panel_width
        return (self.hinge[0] + r * ux, self.hinge[1] + r * uy)

    def handle_xyz(self, theta: float) -> Tuple[float, float, float]:
        x, y = self.handle_xy(theta)
        return (x, y, self.handle_height)

    def handle_radius(self) -> float:
        return self.handle_fraction * self.panel_width


@dataclass
class TableSpec:
    rect: Tuple[float, float, float, float]
    height: float = TABLE_HEIGHT
    dirt: List[Tuple[float, float]] = field(default_factory=list)

    def center(self) -> Tuple[float, float]:
        x0, y0, x1, y1 = self.rect
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1))


@dataclass
class SpawnBand:
    d_min: float
    d_max: float

    def __post_init__(self):
        if not (0.0 < self.d_min < self.d_max):
            raise ValueError(f"invalid spawn band [{self.d_min}, {self.d_max}]")


@dataclass
class Scene:
    task: TaskKind
    seed: int
    rooms: List[Tuple[float, float, float, float]]
    walls: List[Tuple[float, float, float, float]]
    door: Optional[DoorSpec] = None
    table: Optional[TableSpec] = None
    fridge_body: Optional[Tuple[float, float, float, float]] = None
    obstacles: List[Tuple[float, float, float, float]] = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- geometry caches -------------------------------------------------

    @property
    def wall_array(self) -> np.ndarray:
        if "walls" not in self._cache:
            self._cache["walls"] = np.asarray(self.walls, dtype=np.float64).reshape(-1, 4)
        return self._cache["walls"]

    @property
    def solid_rects(self) -> np.ndarray:
        if "solids" not in self._cache:
            rects = list(self.obstacles)
            if self.table is not None:
                rects.append(self.table.rect)
            if self.fridge_body is not None:
                rects.append(self.fridge_body)
            self._cache["solids"] = np.asarray(rects, dtype=np.float64).reshape(-1, 4)
        return self._cache["solids"]

    def collision_segments(self, door_angle: float = 0.0) -> np.ndarray:
        """Walls plus the door panel at the given angle (in-place buffer)."""
        if self.door is None:
            return self.wall_array
        buf = self._cache.get("segbuf")
        if buf is None:
            walls = self.wall_array
            buf = np.empty((walls.shape[0] + 1, 4), dtype=np.float64)
            buf[:-1] = walls
            self._cache["segbuf"] = buf
        buf[-1] = self.door.panel_segment(door_angle)
        return buf

    def bounds(self) -> Tuple[float, float, float, float]:
        if "bounds" not in self._cache:
            r = np.asarray(self.rooms, dtype=np.float64)
            self._cache["bounds"] = (float(r[:, 0].min()), float(r[:, 1].min()),
                                     float(r[:, 2].max()), float(r[:, 3].max()))
        return self._cache["bounds"]

    def grid(self) -> OccupancyGrid:
        """Inflated occupancy grid with the door closed."""
        if "grid" not in self._cache:
            self._cache["grid"] = OccupancyGrid.build(
                self.collision_segments(0.0).copy(), self.solid_rects, self.bounds())
        return self._cache["grid"]

    # -- task reference points -------------------------------------------

    def nav_distance(self, base_xy: Tuple[float, float], door_theta: float = 0.0) -> float:
        """Base-to-target distance: handle for door/fridge, nearest table
        edge for cleaning."""
        if self.door is not None:
            hx, hy = self.door.handle_xy(door_theta)
            return math.hypot(base_xy[0] - hx, base_xy[1] - hy)
        assert self.table is not None
        return rect_distance(base_xy[0], base_xy[1], self.table.rect)

    def ee_target_xyz(self, door_theta: float = 0.0) -> Tuple[float, float, float]:
        """End-effector goal: the handle, or the table centre at table height."""
        if self.door is not None:
            return self.door.handle_xyz(door_theta)
        assert self.table is not None
        cx, cy = self.table.center()
        return (cx, cy, self.table.height)

    def spawn_halfspace_sign(self) -> int:
        """Side of the door plane the robot spawns on: +1 along the opening
        normal (pull side), -1 against it (push side)."""
        assert self.door is not None
        return 1 if self.door.mode == "pull" or self.door.kind == "fridge" else -1

    def on_spawn_side(self, x: float, y: float) -> bool:
        if self.door is None:
            return True
        nx, ny = self.door.open_normal(0.0)
        hx, hy = self.door.hinge
        return self.spawn_halfspace_sign() * ((x - hx) * nx + (y - hy) * ny) > 0.0

    # -- reach zone / reachability ----------------------------------------

    def reach_zone_field(self) -> np.ndarray:
        """BFS distance field from the target reach zone (free cells within
        d_reach of the target on the spawn side)."""
        grid = self.grid()
        if "zone_field" in self._cache:
            return self._cache["zone_field"]
        gx, gy = grid.cell_centers()
        d_reach = D_REACH[self.task]
        if self.door is not None:
            hx, hy = self.door.handle_xy(0.0)
            dist = np.hypot(gx - hx, gy - hy)
            nx, ny = self.door.open_normal(0.0)
            side = self.spawn_halfspace_sign() * ((gx - hx) * nx + (gy - hy) * ny)
            zone = (dist <= d_reach) & (side > 0.0) & ~grid.occupied
        else:
            assert self.table is not None
            x0, y0, x1, y1 = self.table.rect
            ddx = np.maximum(np.maximum(x0 - gx, gx - x1), 0.0)
            ddy = np.maximum(np.maximum(y0 - gy, gy - y1), 0.0)
            dist = np.hypot(ddx, ddy)
            zone = (dist <= d_reach) & ~grid.occupied
        cells = np.argwhere(zone)
        if cells.shape[0] == 0:
            raise SceneGenerationError(f"empty reach zone (task={self.task.value}, seed={self.seed})")
        self._cache["zone_field"] = grid.distance_field(cells)
        return self._cache["zone_field"]

    # -- validity ----------------------------------------------------------

    def validity_problems(self) -> List[str]:
        problems = []
        rr = np.asarray(self.rooms)
        for i in range(len(self.rooms)):
            for j in range(i + 1, len(self.rooms)):
                a, b = rr[i], rr[j]
                if a[0] < b[2] - 1e-9 and b[0] < a[2] - 1e-9 and a[1] < b[3] - 1e-9 and b[1] < a[3] - 1e-9:
                    problems.append(f"rooms {i} and {j} overlap")
        if self.table is not None:
            x0, y0, x1, y1 = self.table.rect
            for px, py in self.table.dirt:
                if not (x0 < px < x1 and y0 < py < y1):
                    problems.append(f"dirt point ({px:.3f},{py:.3f}) outside the table")
                    break
            n = len(self.table.dirt)
            if not (DIRT_COUNT_RANGE[0] <= n <= DIRT_COUNT_RANGE[1]):
                problems.append(f"dirt count {n} outside {DIRT_COUNT_RANGE}")
        if (self.door is not None) == (self.table is not None):
            problems.append("scene must have exactly one target object")
        try:
            field_ = self.reach_zone_field()
        except SceneGenerationError as exc:
            problems.append(str(exc))
            return problems
        if not self._band_nonempty(field_, SpawnBand(*SPAWN_BAND[self.task])):
            problems.append("spawn band empty")
        return problems

    def _band_nonempty(self, zone_field: np.ndarray, band: SpawnBand) -> bool:
        grid = self.grid()
        gx, gy = grid.cell_centers()
        if self.door is not None:
            hx, hy = self.door.handle_xy(0.0)
            dist = np.hypot(gx - hx, gy - hy)
            nxv, nyv = self.door.open_normal(0.0)
            side = self.spawn_halfspace_sign() * ((gx - hx) * nxv + (gy - hy) * nyv) > 0
        else:
            x0, y0, x1, y1 = self.table.rect
            ddx = np.maximum(np.maximum(x0 - gx, gx - x1), 0.0)
            ddy = np.maximum(np.maximum(y0 - gy, gy - y1), 0.0)
            dist = np.hypot(ddx, ddy)
            side = np.ones_like(dist, dtype=bool)
        ok = (~grid.occupied) & side & (dist >= band.d_min) & (dist <= band.d_max) & (zone_field >= 0)
        # require both halves of the band to be populated
        mid = 0.5 * (band.d_min + band.d_max)
        return bool(np.any(ok & (dist <= mid))) and bool(np.any(ok & (dist > mid)))

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        d = {
            "scene_format_version": SCENE_FORMAT_VERSION,
            "generator_version": GENERATOR_VERSION,
            "task": self.task.value,
            "seed": self.seed,
            "rooms": [list(r) for r in self.rooms],
            "walls": [list(w) for w in self.walls],
            "door": None,
            "table": None,
            "fridge_body": list(self.fridge_body) if self.fridge_body else None,
            "obstacles": [list(o) for o in self.obstacles],
        }
        if self.door is not None:
            d["door"] = {
                "hinge": list(self.door.hinge),
                "panel_width": self.door.panel_width,
                "closed_dir": list(self.door.closed_dir),
                "swing_sign": self.door.swing_sign,
                "theta_max": self.door.theta_max,
                "handle_fraction": self.door.handle_fraction,
                "handle_height": self.door.handle_height,
                "kind": self.door.kind,
                "mode": self.door.mode,
            }
        if self.table is not None:
            d["table"] = {
                "rect": list(self.table.rect),
                "height": self.table.height,
                "dirt": [list(p) for p in self.table.dirt],
            }
        return d

    def to_text(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, d: dict) -> "Scene":
        ver = d.get("scene_format_version")
        if ver != SCENE_FORMAT_VERSION:
            raise ValueError(f"unsupported scene format version {ver!r}")
        door = None
        if d.get("door"):
            dd = d["door"]
            door = DoorSpec(hinge=tuple(dd["hinge"]), panel_width=dd["panel_width"],
                            closed_dir=tuple(dd["closed_dir"]), swing_sign=dd["swing_sign"],
                            theta_max=dd["theta_max"], handle_fraction=dd["handle_fraction"],
                            handle_height=dd["handle_height"], kind=dd["kind"], mode=dd["mode"])
        table = None
        if d.get("table"):
            td = d["table"]
            table = TableSpec(rect=tuple(td["rect"]), height=td["height"],
                              dirt=[tuple(p) for p in td["dirt"]])
        return cls(
            task=TaskKind(d["task"]),
            seed=d["seed"],
            rooms=[tuple(r) for r in d["rooms"]],
            walls=[tuple(w) for w in d["walls"]],
            door=door,
            table=table,
            fridge_body=tuple(d["fridge_body"]) if d.get("fridge_body") else None,
            obstacles=[tuple(o) for o in d.get("obstacles", [])],
        )

    @classmethod
    def from_text(cls, text: str) -> "Scene":
        return cls.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------


def _rects_gap(a: Sequence[float], b: Sequence[float]) -> float:
    dx = max(a[0] - b[2], b[0] - a[2], 0.0)
    dy = max(a[1] - b[3], b[1] - a[3], 0.0)
    return math.hypot(dx, dy)


def _place_obstacles(rng: np.random.Generator, rooms, keepout_rects, keepout_discs,
                     max_count: int = 3) -> List[Tuple[float, float, float, float]]:
    """Up to ``max_count`` box obstacles; each keeps a 0.8 m gap to other
    solids and the listed keep-out discs, and 0.55 m to walls."""
    out: List[Tuple[float, float, float, float]] = []
    n = int(rng.integers(0, max_count + 1))
    for _ in range(n):
        for _try in range(20):
            room = rooms[int(rng.integers(0, len(rooms)))]
            w, h = rng.uniform(0.3, 0.8, 2)
            margin = 0.55
            if room[2] - room[0] < w + 2 * margin or room[3] - room[1] < h + 2 * margin:
                continue
            x0 = rng.uniform(room[0] + margin, room[2] - margin - w)
            y0 = rng.uniform(room[1] + margin, room[3] - margin - h)
            rect = (x0, y0, x0 + w, y0 + h)
            if any(_rects_gap(rect, r) < 0.8 for r in keepout_rects + out):
                continue
            if any(rect_distance(cx, cy, rect) < rad for cx, cy, rad in keepout_discs):
                continue
            out.append(rect)
            break
    return out


def _point_line_distance(px, py, ax, ay, ux, uy) -> float:
    """Distance from a point to the infinite line through (ax, ay) with
    unit direction (ux, uy)."""
    return abs((px - ax) * uy - (py - ay) * ux)


def _door_sweep_clear(door: DoorSpec, walls, solids, samples: int = 24) -> bool:
    """The panel must stay 0.05 m clear of static geometry over the full
    swing.  Walls collinear with the closed panel (the door's own wall) are
    exempt, as is the body the door is mounted on (callers leave it out of
    ``solids``)."""
    from . import kernels

    ax, ay = door.hinge
    ux, uy = door.closed_dir
    kept = [wseg for wseg in walls
            if max(_point_line_distance(wseg[0], wseg[1], ax, ay, ux, uy),
                   _point_line_distance(wseg[2], wseg[3], ax, ay, ux, uy)) > 1e-9]
    wall_arr = np.asarray(kept, dtype=np.float64).reshape(-1, 4)
    solid_arr = np.asarray(solids, dtype=np.float64).reshape(-1, 4)
    fractions = np.linspace(0.2, 1.0, 6)
    for theta in np.linspace(0.05, door.theta_max, samples):
        dx, dy = door.panel_dir(theta)
        for f in fractions:
            px = door.hinge[0] + f * door.panel_width * dx
            py = door.hinge[1] + f * door.panel_width * dy
            if kernels.circle_collides(wall_arr, solid_arr, px, py, 0.05):
                return False
    return True


def _build_door_scene(task: TaskKind, rng: np.random.Generator) -> Optional[Scene]:
    wa, wb, h = rng.uniform(*ROOM_SIDE_RANGE, 3)
    gap = DOOR_PANEL_WIDTH
    margin = 0.45
    gy = rng.uniform(margin, h - gap - margin)
    rooms = [(0.0, 0.0, wa, h), (wa, 0.0, wa + wb, h)]
    walls = [
        (0.0, 0.0, wa + wb, 0.0),
        (0.0, h, wa + wb, h),
        (0.0, 0.0, 0.0, h),
        (wa + wb, 0.0, wa + wb, h),
        (wa, 0.0, wa, gy),
        (wa, gy + gap, wa, h),
    ]
    hinge_low = rng.random() < 0.5
    swing_into_a = rng.random() < 0.5
    if hinge_low:
        hinge, closed = (wa, gy), (0.0, 1.0)
        sign = 1 if swing_into_a else -1
    else:
        hinge, closed = (wa, gy + gap), (0.0, -1.0)
        sign = -1 if swing_into_a else 1
    door = DoorSpec(hinge=hinge, panel_width=gap, closed_dir=closed, swing_sign=sign,
                    kind="door", mode="push" if task is TaskKind.DOOR_PUSH else "pull")
    sweep_keepout = (hinge[0], hinge[1], gap + 0.4)
    obstacles = _place_obstacles(rng, rooms, [], [sweep_keepout,
                                                  (wa, gy + 0.5 * gap, 1.3)])
    scene = Scene(task=task, seed=-1, rooms=rooms, walls=walls, door=door,
                  obstacles=obstacles)
    if not _door_sweep_clear(door, walls, scene.solid_rects):
        return None
    return scene


def _build_table_scene(rng: np.random.Generator) -> Optional[Scene]:
    n_rooms = int(rng.integers(1, 4))
    widths = rng.uniform(*ROOM_SIDE_RANGE, n_rooms)
    h = float(rng.uniform(*ROOM_SIDE_RANGE))
    xs = np.concatenate([[0.0], np.cumsum(widths)])
    rooms = [(float(xs[i]), 0.0, float(xs[i + 1]), h) for i in range(n_rooms)]
    total_w = float(xs[-1])
    walls = [(0.0, 0.0, total_w, 0.0), (0.0, h, total_w, h),
             (0.0, 0.0, 0.0, h), (total_w, 0.0, total_w, h)]
    doorway_gap = 1.0
    doorway_centers = []
    for i in range(1, n_rooms):
        gy = float(rng.uniform(0.45, h - doorway_gap - 0.45))
        walls.append((float(xs[i]), 0.0, float(xs[i]), gy))
        walls.append((float(xs[i]), gy + doorway_gap, float(xs[i]), h))
        doorway_centers.append((float(xs[i]), gy + 0.5 * doorway_gap))

    room_idx = int(rng.integers(0, n_rooms))
    room = rooms[room_idx]
    long_axis_x = rng.random() < 0.5
    short = float(rng.uniform(0.7, 1.1))
    avail = (room[2] - room[0] if long_axis_x else room[3] - room[1]) - 1.7
    long = float(rng.uniform(1.2, min(2.0, avail)))
    if long < 1.2:
        return None
    tw, th = (long, short) if long_axis_x else (short, long)
    # both long sides need a 0.8 m work corridor, short sides 0.55 m
    mx = 0.8 if not long_axis_x else 0.55
    my = 0.8 if long_axis_x else 0.55
    if room[2] - room[0] < tw + 2 * mx or room[3] - room[1] < th + 2 * my:
        return None
    x0 = float(rng.uniform(room[0] + mx, room[2] - mx - tw))
    y0 = float(rng.uniform(room[1] + my, room[3] - my - th))
    rect = (x0, y0, x0 + tw, y0 + th)
    n_dirt = int(rng.integers(DIRT_COUNT_RANGE[0], DIRT_COUNT_RANGE[1] + 1))
    inset = 0.06
    dirt = [(float(rng.uniform(rect[0] + inset, rect[2] - inset)),
             float(rng.uniform(rect[1] + inset, rect[3] - inset))) for _ in range(n_dirt)]
    table = TableSpec(rect=rect, dirt=dirt)
    keepout_discs = [(cx, cy, 1.3) for cx, cy in doorway_centers]
    obstacles = _place_obstacles(rng, rooms, [rect], keepout_discs)
    return Scene(task=TaskKind.CLEAN_TABLE, seed=-1, rooms=rooms, walls=walls,
                 table=table, obstacles=obstacles)


def _build_fridge_scene(rng: np.random.Generator) -> Optional[Scene]:
    w, h = rng.uniform(*ROOM_SIDE_RANGE, 2)
    rooms = [(0.0, 0.0, float(w), float(h))]
    walls = [(0.0, 0.0, w, 0.0), (0.0, h, w, h), (0.0, 0.0, 0.0, h), (w, 0.0, w, h)]
    side = int(rng.integers(0, 4))  # 0=bottom 1=top 2=left 3=right
    depth, width = 0.7, 0.7
    along = w if side in (0, 1) else h
    c = float(rng.uniform(1.35, along - 1.35))
    clearance = float(rng.uniform(*FRIDGE_CLEARANCE_RANGE))
    counter_depth = 0.5
    counter_len = float(rng.uniform(1.5, 2.5))
    offset = float(rng.uniform(-0.5, 0.5))

    if side in (0, 1):
        x0, x1 = c - width / 2, c + width / 2
        if side == 0:
            body = (x0, 0.0, x1, depth)
            face_y, outward = depth, 1.0
        else:
            body = (x0, h - depth, x1, h)
            face_y, outward = h - depth, -1.0
        corners = ((x0, face_y), (x1, face_y))
        cy0 = face_y + outward * clearance
        cy1 = cy0 + outward * counter_depth
        cx0 = c + offset - counter_len / 2
        counter = (min(cx0, cx0 + counter_len), min(cy0, cy1),
                   max(cx0, cx0 + counter_len), max(cy0, cy1))
        room_lo, room_hi = 0.0, w
        end_gaps = (counter[0] - room_lo, room_hi - counter[2])
        behind = (h - counter[3]) if side == 0 else counter[1]
    else:
        y0, y1 = c - width / 2, c + width / 2
        if side == 2:
            body = (0.0, y0, depth, y1)
            face_x, outward = depth, 1.0
        else:
            body = (w - depth, y0, w, y1)
            face_x, outward = w - depth, -1.0
        corners = ((face_x, y0), (face_x, y1))
        cx0 = face_x + outward * clearance
        cx1 = cx0 + outward * counter_depth
        cy0 = c + offset - counter_len / 2
        counter = (min(cx0, cx1), min(cy0, cy0 + counter_len),
                   max(cx0, cx1), max(cy0, cy0 + counter_len))
        room_lo, room_hi = 0.0, h
        end_gaps = (counter[1] - room_lo, room_hi - counter[3])
        behind = (w - counter[2]) if side == 2 else counter[0]

    if counter[0] < 0.05 or counter[1] < 0.05 or counter[2] > w - 0.05 or counter[3] > h - 0.05:
        return None
    if max(end_gaps) < 0.9:
        return None
    if 0.01 < behind < 0.55:  # no un-navigable slot behind the counter
        return None

    hinge_idx = int(rng.integers(0, 2))
    hinge = corners[hinge_idx]
    other = corners[1 - hinge_idx]
    dx, dy = other[0] - hinge[0], other[1] - hinge[1]
    norm = math.hypot(dx, dy)
    closed = (dx / norm, dy / norm)
    # choose swing so the opening normal points away from the wall
    want = (0.0, outward) if side in (0, 1) else (outward, 0.0)
    sign = 1 if (-closed[1] * want[0] + closed[0] * want[1]) > 0 else -1
    door = DoorSpec(hinge=hinge, panel_width=FRIDGE_PANEL_WIDTH, closed_dir=closed,
                    swing_sign=sign, kind="fridge", mode="pull")
    obstacles = [counter] + _place_obstacles(
        rng, rooms, [body, counter], [(hinge[0], hinge[1], FRIDGE_PANEL_WIDTH + 0.6)],
        max_count=1)
    scene = Scene(task=TaskKind.OPEN_FRIDGE, seed=-1, rooms=rooms, walls=walls,
                  door=door, fridge_body=body, obstacles=obstacles)
    if not _door_sweep_clear(door, walls, obstacles):
        return None
    return scene


def generate_scene(task: TaskKind, seed: int) -> Scene:
    """Deterministic scene for (task, seed); rejection-samples layouts up to
    100 attempts and raises SceneGenerationError when exhausted."""
    task = TaskKind(task)
    last_problem = "no layout attempt succeeded"
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        rng = _rng(seed, _TAG["layout"], attempt)
        if task in (TaskKind.DOOR_PUSH, TaskKind.DOOR_PULL):
            scene = _build_door_scene(task, rng)
        elif task is TaskKind.CLEAN_TABLE:
            scene = _build_table_scene(rng)
        else:
            scene = _build_fridge_scene(rng)
        if scene is None:
            last_problem = "layout constraints violated"
            continue
        scene.seed = int(seed)
        try:
            problems = scene.validity_problems()
        except SceneGenerationError as exc:
            problems = [str(exc)]
        if problems:
            last_problem = problems[0]
            continue
        return scene
    raise SceneGenerationError(
        f"scene generation exhausted {MAX_GENERATION_ATTEMPTS} attempts for "
        f"(task={task.value}, seed={seed}): {last_problem}")


def sample_spawn(scene: Scene, seed: int, band: Optional[SpawnBand] = None) -> Pose2:
    """Collision-free spawn pose with target distance inside the task band
    and a grid path to the reach zone.  Deterministic in (scene, seed)."""
    band = band or SpawnBand(*SPAWN_BAND[scene.task])
    rng = _rng(scene.seed, _TAG["spawn"], seed)
    grid = scene.grid()
    zone_field = scene.reach_zone_field()
    bx0, by0, bx1, by1 = scene.bounds()
    for _ in range(1000):
        heading = wrap_angle(float(rng.uniform(-math.pi, math.pi)))
        if scene.door is not None:
            r = float(rng.uniform(band.d_min, band.d_max))
            phi = float(rng.uniform(-math.pi, math.pi))
            hx, hy = scene.door.handle_xy(0.0)
            x, y = hx + r * math.cos(phi), hy + r * math.sin(phi)
            if not scene.on_spawn_side(x, y):
                continue
        else:
            x = float(rng.uniform(bx0, bx1))
            y = float(rng.uniform(by0, by1))
            d = scene.nav_distance((x, y))
            if not (band.d_min <= d <= band.d_max):
                continue
        i, j = grid.cell_of(x, y)
        if not grid.in_bounds(i, j) or grid.occupied[i, j] or zone_field[i, j] < 0:
            continue
        from .geometry import footprint_collides

        pose = Pose2(x, y, heading)
        if footprint_collides(pose, scene, 0.0):
            continue
        return pose
    raise SceneGenerationError(
        f"spawn sampling exhausted (task={scene.task.value}, scene seed={scene.seed}, "
        f"spawn seed={seed}, band=[{band.d_min}, {band.d_max}])")
