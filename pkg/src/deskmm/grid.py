"""Occupancy-grid rasterization, BFS distance fields, and path queries.

Grids are rasterized at 0.05 m with geometry inflated by the base radius,
so a free cell is one the robot's center may occupy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import DEFAULT_LIMITS

GRID_RES = 0.05


@dataclass
class OccupancyGrid:
    origin: tuple  # world coords of cell (0, 0) center
    occupied: np.ndarray  # bool (nx, ny)
    res: float = GRID_RES
    _fields: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, segments, rects, bounds, inflate: float = DEFAULT_LIMITS.base_radius,
              res: float = GRID_RES) -> "OccupancyGrid":
        x0, y0, x1, y1 = bounds
        nx = max(1, int(np.ceil((x1 - x0) / res)) + 1)
        ny = max(1, int(np.ceil((y1 - y0) / res)) + 1)
        cx = x0 + res * np.arange(nx)
        cy = y0 + res * np.arange(ny)
        xs = np.repeat(cx, ny)
        ys = np.tile(cy, nx)
        occ = kernels.points_collide(segments, rects, xs, ys, inflate)
        return cls(origin=(x0, y0), occupied=occ.reshape(nx, ny).astype(bool), res=res)

    @property
    def shape(self):
        return self.occupied.shape

    def cell_of(self, x: float, y: float):
        i = int(round((x - self.origin[0]) / self.res))
        j = int(round((y - self.origin[1]) / self.res))
        return i, j

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.occupied.shape[0] and 0 <= j < self.occupied.shape[1]

    def is_free(self, x: float, y: float) -> bool:
        i, j = self.cell_of(x, y)
        return self.in_bounds(i, j) and not self.occupied[i, j]

    def cell_centers(self):
        """World coordinates of all cell centers, shape (nx, ny) each."""
        nx, ny = self.occupied.shape
        gx = self.origin[0] + self.res * np.arange(nx)[:, None]
        gy = self.origin[1] + self.res * np.arange(ny)[None, :]
        return np.broadcast_to(gx, (nx, ny)), np.broadcast_to(gy, (nx, ny))

    def distance_field(self, seed_cells: np.ndarray, key=None) -> np.ndarray:
        """8-connected BFS move counts from the seed cells (-1 unreachable).
        Cached under ``key`` when given."""
        if key is not None and key in self._fields:
            return self._fields[key]
        out = kernels.grid_bfs(self.occupied, np.asarray(seed_cells, dtype=np.int64))
        if key is not None:
            self._fields[key] = out
        return out


def shortest_path_exists(scene, frm, to_xy) -> bool:
    """BFS reachability between two world points on the scene's inflated
    occupancy grid (door closed).  ``frm`` may be a Pose2 or an (x, y) pair."""
    fx = frm.x if hasattr(frm, "x") else frm[0]
    fy = frm.y if hasattr(frm, "y") else frm[1]
    grid = scene.grid()
    a = grid.cell_of(fx, fy)
    b = grid.cell_of(to_xy[0], to_xy[1])
    if a == b:
        return True
    if not (grid.in_bounds(*a) and grid.in_bounds(*b)):
        return False
    if grid.occupied[a] or grid.occupied[b]:
        return False
    dist = grid.distance_field(np.array([b]), key=("point", b))
    return bool(dist[a] >= 0)
