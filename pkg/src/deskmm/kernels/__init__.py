"""Collision / raycast kernels with a compiled fast path.

The Cython extension (``_cykernels``) is used when importable; setting
``DESKMM_PURE=1`` in the environment forces the pure-numpy fallback.
Both expose the same three functions with identical semantics; the
parity test suite and ``benchmarks/bench_kernels.py`` compare them.
"""
import os

from . import pure

if os.environ.get("DESKMM_PURE") == "1":
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _cykernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

circle_collides = _impl.circle_collides
points_collide = _impl.points_collide
raycast = _impl.raycast
grid_bfs = _impl.grid_bfs

__all__ = ["BACKEND", "circle_collides", "points_collide", "raycast", "grid_bfs", "pure"]
