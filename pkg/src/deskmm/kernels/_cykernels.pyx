# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``deskmm.kernels.pure`` (same semantics, scalar loops).

These are the hot kernels of the simulator: every environment step runs a
footprint collision query plus an 8-ray scan, so a training run touches
them tens of millions of times.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, fmax, fmin, sin

cnp.import_array()

DEF EPS = 1e-12


cdef inline double _seg_d2(double x1, double y1, double x2, double y2,
                           double px, double py) nogil:
    cdef double ex = x2 - x1
    cdef double ey = y2 - y1
    cdef double len2 = ex * ex + ey * ey
    cdef double t = 0.0
    cdef double dx, dy
    if len2 > EPS:
        t = ((px - x1) * ex + (py - y1) * ey) / len2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    dx = px - (x1 + t * ex)
    dy = py - (y1 + t * ey)
    return dx * dx + dy * dy


cdef inline double _rect_d2(double x0, double y0, double x1, double y1,
                            double px, double py) nogil:
    cdef double dx = fmax(fmax(x0 - px, px - x1), 0.0)
    cdef double dy = fmax(fmax(y0 - py, py - y1), 0.0)
    return dx * dx + dy * dy


cdef inline int _point_hits(const double[:, ::1] segs, const double[:, ::1] rects,
                            double px, double py, double r2) nogil:
    cdef Py_ssize_t i
    for i in range(segs.shape[0]):
        if _seg_d2(segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3], px, py) < r2:
            return 1
    for i in range(rects.shape[0]):
        if _rect_d2(rects[i, 0], rects[i, 1], rects[i, 2], rects[i, 3], px, py) < r2:
            return 1
    return 0


def circle_collides(segs, rects, double cx, double cy, double r):
    """True iff the open disc of radius ``r`` at (cx, cy) meets any segment
    or solid rect."""
    cdef double[:, ::1] s = np.ascontiguousarray(segs, dtype=np.float64).reshape(-1, 4)
    cdef double[:, ::1] q = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    return bool(_point_hits(s, q, cx, cy, r * r))


def points_collide(segs, rects, xs, ys, double r):
    """Vector form of :func:`circle_collides`; returns uint8 of shape (k,)."""
    cdef double[:, ::1] s = np.ascontiguousarray(segs, dtype=np.float64).reshape(-1, 4)
    cdef double[:, ::1] q = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(x.shape[0], dtype=np.uint8)
    cdef cnp.uint8_t[::1] o = out
    cdef double r2 = r * r
    cdef Py_ssize_t i
    with nogil:
        for i in range(x.shape[0]):
            o[i] = <cnp.uint8_t> _point_hits(s, q, x[i], y[i], r2)
    return out


def raycast(segs, rects, double ox, double oy, headings, double max_range):
    """Ray ranges from (ox, oy) along each heading, capped at max_range."""
    cdef double[:, ::1] s = np.ascontiguousarray(segs, dtype=np.float64).reshape(-1, 4)
    cdef double[:, ::1] q = np.ascontiguousarray(rects, dtype=np.float64).reshape(-1, 4)
    cdef double[::1] h = np.ascontiguousarray(headings, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.full(h.shape[0], max_range, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, k
    cdef double dx, dy, best, px, py, ex, ey, denom, wx, wy, t, u
    cdef double rx0, ry0, rx1, ry1
    with nogil:
        for i in range(h.shape[0]):
            dx = cos(h[i])
            dy = sin(h[i])
            best = max_range
            for j in range(s.shape[0]):
                best = _ray_seg(ox, oy, dx, dy, s[j, 0], s[j, 1], s[j, 2], s[j, 3], best)
            for j in range(q.shape[0]):
                rx0 = q[j, 0]; ry0 = q[j, 1]; rx1 = q[j, 2]; ry1 = q[j, 3]
                best = _ray_seg(ox, oy, dx, dy, rx0, ry0, rx1, ry0, best)
                best = _ray_seg(ox, oy, dx, dy, rx1, ry0, rx1, ry1, best)
                best = _ray_seg(ox, oy, dx, dy, rx1, ry1, rx0, ry1, best)
                best = _ray_seg(ox, oy, dx, dy, rx0, ry1, rx0, ry0, best)
            o[i] = best
    return out


def grid_bfs(occupied, seeds):
    """8-connected BFS distance (in moves) over a boolean occupancy grid.

    ``seeds`` is an (k, 2) int array of start cells; occupied or
    out-of-bounds seeds are ignored.  Returns int32 distances, -1 where
    unreachable.
    """
    cdef cnp.uint8_t[:, ::1] occ = np.ascontiguousarray(occupied, dtype=np.uint8)
    cdef cnp.int64_t[:, ::1] sd = np.ascontiguousarray(seeds, dtype=np.int64).reshape(-1, 2)
    cdef Py_ssize_t nx = occ.shape[0]
    cdef Py_ssize_t ny = occ.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] dist_arr = np.full((nx, ny), -1, dtype=np.int32)
    cdef cnp.int32_t[:, ::1] dist = dist_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(nx * ny, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t i, j, k, ci, cj, ni, nj
    cdef cnp.int32_t d
    cdef int[8] di = [1, -1, 0, 0, 1, 1, -1, -1]
    cdef int[8] dj = [0, 0, 1, -1, 1, -1, 1, -1]
    for k in range(sd.shape[0]):
        i = sd[k, 0]
        j = sd[k, 1]
        if 0 <= i < nx and 0 <= j < ny and occ[i, j] == 0 and dist[i, j] < 0:
            dist[i, j] = 0
            queue[tail] = i * ny + j
            tail += 1
    with nogil:
        while head < tail:
            ci = queue[head] // ny
            cj = queue[head] % ny
            head += 1
            d = dist[ci, cj] + 1
            for k in range(8):
                ni = ci + di[k]
                nj = cj + dj[k]
                if 0 <= ni < nx and 0 <= nj < ny and occ[ni, nj] == 0 and dist[ni, nj] < 0:
                    dist[ni, nj] = d
                    queue[tail] = ni * ny + nj
                    tail += 1
    return dist_arr


cdef inline double _ray_seg(double ox, double oy, double dx, double dy,
                            double px, double py, double qx, double qy,
                            double best) nogil:
    cdef double ex = qx - px
    cdef double ey = qy - py
    cdef double denom = dx * ey - dy * ex
    cdef double wx, wy, t, u
    if fabs(denom) <= EPS:
        return best
    wx = px - ox
    wy = py - oy
    t = (wx * ey - wy * ex) / denom
    u = (wx * dy - wy * dx) / denom
    if t >= 0.0 and u >= 0.0 and u <= 1.0 and t < best:
        return t
    return best
