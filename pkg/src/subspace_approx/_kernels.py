"""Float and int64 hot loops, compiled with numba when available.

Set ``SUBSPACE_APPROX_NUMBA=0`` to force the pure-numpy versions.  Both
variants return identical results; ``BACKEND`` names the one in use.
"""

from __future__ import annotations

import os

import numpy as np


def _omega_rows_numpy(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    c = np.einsum("ij,ij->i", X, Y)
    r = Y - c[:, None] * X
    return np.sqrt(np.einsum("ij,ij->i", r, r))


def _box_min_numpy(G: np.ndarray, bounds: np.ndarray):
    """Smallest nonzero ``x^T G x`` over the integer box ``|x_i| <= bounds_i``.

    Returns ``(value, points)`` where ``points`` holds every box point
    attaining the minimum (both signs); value is -1 when the box holds only 0.
    """
    r = len(bounds)
    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    best, hits = -1, []
    head = axes[0]
    tail = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, r - 1) if r > 1 else None
    for x0 in head:
        if tail is None:
            pts = np.array([[x0]], dtype=np.int64)
        else:
            pts = np.concatenate([np.full((tail.shape[0], 1), x0, dtype=np.int64), tail], axis=1)
        vals = np.einsum("ij,jk,ik->i", pts, G, pts)
        nz = vals > 0
        if not nz.any():
            continue
        m = vals[nz].min()
        if best < 0 or m < best:
            best, hits = int(m), [pts[vals == m]]
        elif m == best:
            hits.append(pts[vals == m])
    pts = np.concatenate(hits) if hits else np.zeros((0, r), dtype=np.int64)
    return best, pts


_omega_rows = _omega_rows_numpy
_box_min = _box_min_numpy
BACKEND = "numpy"

if os.environ.get("SUBSPACE_APPROX_NUMBA", "1") != "0":
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
    if numba is not None:

        @numba.njit(cache=True)
        def _omega_rows_numba(X, Y):
            m, n = X.shape
            out = np.empty(m)
            for i in range(m):
                c = 0.0
                for k in range(n):
                    c += X[i, k] * Y[i, k]
                s = 0.0
                for k in range(n):
                    r = Y[i, k] - c * X[i, k]
                    s += r * r
                out[i] = np.sqrt(s)
            return out

        @numba.njit(cache=True)
        def _box_scan_numba(G, bounds):
            r = bounds.shape[0]
            x = -bounds.copy()
            best = -1
            count = 0
            while True:
                v = 0
                for i in range(r):
                    gi = 0
                    for j in range(r):
                        gi += G[i, j] * x[j]
                    v += x[i] * gi
                if v > 0:
                    if best < 0 or v < best:
                        best = v
                        count = 1
                    elif v == best:
                        count += 1
                k = r - 1
                while k >= 0 and x[k] == bounds[k]:
                    x[k] = -bounds[k]
                    k -= 1
                if k < 0:
                    break
                x[k] += 1
            return best, count

        @numba.njit(cache=True)
        def _box_collect_numba(G, bounds, target, count):
            r = bounds.shape[0]
            out = np.empty((count, r), dtype=np.int64)
            x = -bounds.copy()
            c = 0
            while True:
                v = 0
                for i in range(r):
                    gi = 0
                    for j in range(r):
                        gi += G[i, j] * x[j]
                    v += x[i] * gi
                if v == target:
                    out[c, :] = x
                    c += 1
                k = r - 1
                while k >= 0 and x[k] == bounds[k]:
                    x[k] = -bounds[k]
                    k -= 1
                if k < 0:
                    break
                x[k] += 1
            return out

        def _box_min_numba(G, bounds):
            best, count = _box_scan_numba(G, bounds)
            if best < 0:
                return -1, np.zeros((0, len(bounds)), dtype=np.int64)
            return int(best), _box_collect_numba(G, bounds, best, count)

        _omega_rows = _omega_rows_numba
        _box_min = _box_min_numba
        BACKEND = "numba"


def omega_rows(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise ``|y - (x.y) x|`` for unit rows x of X and y of Y."""
    return _omega_rows(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64))


def box_min(G: np.ndarray, bounds: np.ndarray):
    """Minimum nonzero quadratic form value over an integer box, and its minimizers.

    Callers must ensure every value fits in int64.
    """
    pts = np.asarray(bounds, dtype=np.int64)
    best, hits = _box_min(np.asarray(G, dtype=np.int64), pts)
    order = np.lexsort(hits.T[::-1]) if len(hits) else np.arange(0)
    return best, hits[order]


def numpy_box_min(G, bounds):
    """The numpy variant regardless of backend (for benchmarks and parity tests)."""
    best, hits = _box_min_numpy(np.asarray(G, dtype=np.int64), np.asarray(bounds, dtype=np.int64))
    order = np.lexsort(hits.T[::-1]) if len(hits) else np.arange(0)
    return best, hits[order]


def numpy_omega_rows(X, Y):
    return _omega_rows_numpy(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64))
