"""Integer enumeration kernels.

Two implementations of each kernel exist: a numba ``@njit`` loop and a
vectorised numpy path.  The numba path is used when numba imports and the
environment variable ``TORDEG_DISABLE_NUMBA`` is unset (or ``0``).  Both paths
work on int64 and must agree exactly; callers guard against overflow with
:func:`fits_int64` before dispatching here.
"""
from __future__ import annotations

import os

import numpy as np

_INT64_SAFE = 2 ** 62


def _numba_requested() -> bool:
    return os.environ.get("TORDEG_DISABLE_NUMBA", "0") in ("", "0", "false", "False")


try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _numba_requested()


def fits_int64(*arrays) -> bool:
    return all(int(np.max(np.abs(np.asarray(a, dtype=object)), initial=0)) < _INT64_SAFE for a in arrays)


# ---------------------------------------------------------------------------
# fundamental parallelepiped of a simplicial cone
# ---------------------------------------------------------------------------

def _box_bounds(gens: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = np.minimum(gens, 0).sum(axis=1)
    hi = np.maximum(gens, 0).sum(axis=1)
    return lo, hi


def parallelepiped_points_numpy(gens: np.ndarray, adj: np.ndarray, det: int) -> np.ndarray:
    """Lattice points x = G λ with λ in [0,1)^d.

    ``gens`` has the generators as columns, ``adj`` is det * G^{-1} (integral).
    """
    d = gens.shape[0]
    lo, hi = _box_bounds(gens)
    axes = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    lam = grid @ adj.T
    if det < 0:
        lam = -lam
    mask = np.all((lam >= 0) & (lam < abs(det)), axis=1)
    return grid[mask]


def box_points_in_cone_numpy(ineqs: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """All integer points of the box [lo, hi] satisfying ineqs @ x >= 0."""
    d = lo.shape[0]
    axes = [np.arange(lo[i], hi[i] + 1, dtype=np.int64) for i in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    if ineqs.shape[0] == 0:
        return grid
    mask = np.all(grid @ ineqs.T >= 0, axis=1)
    return grid[mask]


if HAVE_NUMBA:

    @njit(cache=True)
    def _parallelepiped_points_jit(gens, adj, det, lo, hi):  # pragma: no cover - compiled
        d = gens.shape[0]
        total = 1
        for i in range(d):
            total *= hi[i] - lo[i] + 1
        out = np.empty((total, d), dtype=np.int64)
        x = lo.copy()
        count = 0
        sgn = 1 if det > 0 else -1
        adet = det * sgn
        for _ in range(total):
            ok = True
            for i in range(d):
                s = 0
                for j in range(d):
                    s += adj[i, j] * x[j]
                s *= sgn
                if s < 0 or s >= adet:
                    ok = False
                    break
            if ok:
                for j in range(d):
                    out[count, j] = x[j]
                count += 1
            # odometer increment
            k = d - 1
            while k >= 0:
                x[k] += 1
                if x[k] <= hi[k]:
                    break
                x[k] = lo[k]
                k -= 1
        return out[:count]

    @njit(cache=True)
    def _box_points_in_cone_jit(ineqs, lo, hi):  # pragma: no cover - compiled
        d = lo.shape[0]
        m = ineqs.shape[0]
        total = 1
        for i in range(d):
            total *= hi[i] - lo[i] + 1
        out = np.empty((total, d), dtype=np.int64)
        x = lo.copy()
        count = 0
        for _ in range(total):
            ok = True
            for r in range(m):
                s = 0
                for j in range(d):
                    s += ineqs[r, j] * x[j]
                if s < 0:
                    ok = False
                    break
            if ok:
                for j in range(d):
                    out[count, j] = x[j]
                count += 1
            k = d - 1
            while k >= 0:
                x[k] += 1
                if x[k] <= hi[k]:
                    break
                x[k] = lo[k]
                k -= 1
        return out[:count]


def parallelepiped_points(gens, adj, det: int, use_numba: bool | None = None) -> np.ndarray:
    gens = np.asarray(gens, dtype=np.int64)
    adj = np.asarray(adj, dtype=np.int64)
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and HAVE_NUMBA:
        lo, hi = _box_bounds(gens)
        return _parallelepiped_points_jit(gens, adj, np.int64(det), lo.astype(np.int64), hi.astype(np.int64))
    return parallelepiped_points_numpy(gens, adj, det)


def box_points_in_cone(ineqs, lo, hi, use_numba: bool | None = None) -> np.ndarray:
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    ineqs = np.asarray(ineqs, dtype=np.int64).reshape(-1, lo.shape[0])
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba and HAVE_NUMBA:
        return _box_points_in_cone_jit(ineqs, lo, hi)
    return box_points_in_cone_numpy(ineqs, lo, hi)
