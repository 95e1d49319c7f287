"""Pure-numpy implementations of the collision / raycast kernels.

Semantics are shared with the compiled twin in ``_cykernels.pyx``; the
dispatch in ``deskmm.kernels`` picks whichever is available.

Conventions:
  * segment arrays: float64, shape (n, 4), rows ``(x1, y1, x2, y2)``
  * rect arrays: float64, shape (m, 4), rows ``(x0, y0, x1, y1)`` with
    ``x0 <= x1``, ``y0 <= y1``; rects are solid boxes
  * all collision tests are strict (distance < radius collides, distance
    exactly equal to the radius does not)
"""
from __future__ import annotations

import numpy as np

_EPS = 1e-12


def _as_f64(a) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim == 1 and out.size == 0:
        out = out.reshape(0, 4)
    return out


def _seg_dist2(segs: np.ndarray, px, py) -> np.ndarray:
    """Squared distance from point(s) to each segment.

    ``px``/``py`` may be scalars or shape (k,); result broadcasts to
    (k, n) (or (n,) for scalar points).
    """
    x1, y1, x2, y2 = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    ex, ey = x2 - x1, y2 - y1
    len2 = ex * ex + ey * ey
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    if px.ndim == 1:
        px = px[:, None]
        py = py[:, None]
    wx, wy = px - x1, py - y1
    t = np.where(len2 > _EPS, (wx * ex + wy * ey) / np.where(len2 > _EPS, len2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    dx = wx - t * ex
    dy = wy - t * ey
    return dx * dx + dy * dy


def _rect_dist2(rects: np.ndarray, px, py) -> np.ndarray:
    """Squared distance from point(s) to each solid rect (0 inside)."""
    x0, y0, x1, y1 = rects[:, 0], rects[:, 1], rects[:, 2], rects[:, 3]
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    if px.ndim == 1:
        px = px[:, None]
        py = py[:, None]
    dx = np.maximum(np.maximum(x0 - px, px - x1), 0.0)
    dy = np.maximum(np.maximum(y0 - py, py - y1), 0.0)
    return dx * dx + dy * dy


def circle_collides(segs, rects, cx: float, cy: float, r: float) -> bool:
    """True iff the open disc of radius ``r`` at (cx, cy) meets any segment
    or solid rect."""
    segs = _as_f64(segs)
    rects = _as_f64(rects)
    r2 = r * r
    if segs.shape[0] and bool(np.any(_seg_dist2(segs, cx, cy) < r2)):
        return True
    if rects.shape[0] and bool(np.any(_rect_dist2(rects, cx, cy) < r2)):
        return True
    return False


def points_collide(segs, rects, xs, ys, r: float) -> np.ndarray:
    """Vector form of :func:`circle_collides`; returns uint8 of shape (k,)."""
    segs = _as_f64(segs)
    rects = _as_f64(rects)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    k = xs.shape[0]
    out = np.zeros(k, dtype=np.uint8)
    r2 = r * r
    chunk = 8192
    for lo in range(0, k, chunk):
        hi = min(lo + chunk, k)
        hit = np.zeros(hi - lo, dtype=bool)
        if segs.shape[0]:
            hit |= np.any(_seg_dist2(segs, xs[lo:hi], ys[lo:hi]) < r2, axis=1)
        if rects.shape[0]:
            hit |= np.any(_rect_dist2(rects, xs[lo:hi], ys[lo:hi]) < r2, axis=1)
        out[lo:hi] = hit
    return out


def _rects_to_segments(rects: np.ndarray) -> np.ndarray:
    x0, y0, x1, y1 = rects[:, 0], rects[:, 1], rects[:, 2], rects[:, 3]
    return np.concatenate(
        [
            np.stack([x0, y0, x1, y0], axis=1),
            np.stack([x1, y0, x1, y1], axis=1),
            np.stack([x1, y1, x0, y1], axis=1),
            np.stack([x0, y1, x0, y0], axis=1),
        ],
        axis=0,
    )


def grid_bfs(occupied: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """8-connected BFS distance (in moves) over a boolean occupancy grid.

    ``seeds`` is an (k, 2) int array of start cells; occupied or
    out-of-bounds seeds are ignored.  Returns int32 distances, -1 where
    unreachable.  Implemented as frontier dilation.
    """
    occ = np.asarray(occupied, dtype=bool)
    dist = np.full(occ.shape, -1, dtype=np.int32)
    seeds = np.asarray(seeds, dtype=np.int64).reshape(-1, 2)
    frontier = np.zeros(occ.shape, dtype=bool)
    for i, j in seeds:
        if 0 <= i < occ.shape[0] and 0 <= j < occ.shape[1] and not occ[i, j]:
            frontier[i, j] = True
    dist[frontier] = 0
    d = 0
    free = ~occ
    while frontier.any():
        d += 1
        grown = np.zeros_like(frontier)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        grown[1:, 1:] |= frontier[:-1, :-1]
        grown[1:, :-1] |= frontier[:-1, 1:]
        grown[:-1, 1:] |= frontier[1:, :-1]
        grown[:-1, :-1] |= frontier[1:, 1:]
        grown &= free
        grown &= dist < 0
        dist[grown] = d
        frontier = grown
    return dist


def raycast(segs, rects, ox: float, oy: float, headings, max_range: float) -> np.ndarray:
    """Ray ranges from (ox, oy) along each heading, capped at max_range.

    Rect boundaries count as hit surfaces; rays parallel to a segment do
    not register a hit against it.
    """
    segs = _as_f64(segs)
    rects = _as_f64(rects)
    headings = np.ascontiguousarray(headings, dtype=np.float64)
    if rects.shape[0]:
        all_segs = np.concatenate([segs, _rects_to_segments(rects)], axis=0)
    else:
        all_segs = segs
    out = np.full(headings.shape[0], max_range, dtype=np.float64)
    if all_segs.shape[0] == 0:
        return out
    px, py = all_segs[:, 0], all_segs[:, 1]
    ex, ey = all_segs[:, 2] - px, all_segs[:, 3] - py
    for i, h in enumerate(headings):
        dx, dy = np.cos(h), np.sin(h)
        denom = dx * ey - dy * ex
        ok = np.abs(denom) > _EPS
        if not np.any(ok):
            continue
        wx, wy = px[ok] - ox, py[ok] - oy
        d = denom[ok]
        t = (wx * ey[ok] - wy * ex[ok]) / d
        s = (wx * dy - wy * dx) / d
        hit = (t >= 0.0) & (s >= 0.0) & (s <= 1.0)
        if np.any(hit):
            out[i] = min(max_range, float(np.min(t[hit])))
    return out
