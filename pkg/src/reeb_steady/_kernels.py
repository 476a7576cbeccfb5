"""Hot loops of the mesh pipeline, compiled with numba when available.

Set ``REEB_STEADY_NUMBA=0`` to force the vectorized numpy versions (also
used automatically when numba cannot be imported).  Both paths return the
same arrays up to floating-point summation order.
"""
from __future__ import annotations

import os

import numpy as np

_WANT_NUMBA = os.environ.get("REEB_STEADY_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError("disabled by REEB_STEADY_NUMBA")
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

USING_NUMBA = njit is not None


def thread_count() -> int:
    """Worker cap from ``REEB_STEADY_THREADS`` (default: CPU count)."""
    raw = os.environ.get("REEB_STEADY_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


# -- area of a linear-function triangle below a level -------------------------

def _area_below_np(f0, f1, f2, area, t):
    """Vectorized area of ``{F < t}`` in triangles with sorted vertex values."""
    f0, f1, f2, area, t = np.broadcast_arrays(f0, f1, f2, area, t)
    out = np.zeros(t.shape, dtype=float)
    span = f2 - f0
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = area * (t - f0) ** 2 / ((f1 - f0) * span)
        upper = area - area * (f2 - t) ** 2 / ((f2 - f1) * span)
    m_low = (t > f0) & (t <= f1) & (f1 > f0)
    m_up = (t > f1) & (t < f2)
    out[m_low] = lower[m_low]
    out[m_up] = upper[m_up]
    done = (t >= f2) & (t > f0)
    out[done] = area[done]
    return out


def _cumulative_area_np(levels, fs, area, lo, hi):
    k = levels.size
    base = _area_below_np(fs[:, 0], fs[:, 1], fs[:, 2], area, lo)
    full = _area_below_np(fs[:, 0], fs[:, 1], fs[:, 2], area, hi) - base
    # only levels strictly inside the triangle's own range need the partial area;
    # below it the contribution is zero, from its top up it is the full one
    start = np.searchsorted(levels, np.maximum(lo, fs[:, 0]), side="right")
    stop = np.searchsorted(levels, np.minimum(hi, fs[:, 2]), side="left")
    diff = np.zeros(k + 1)
    np.add.at(diff, stop, full)
    cum = np.cumsum(diff[:k])
    counts = np.maximum(stop - start, 0)
    if counts.sum():
        tri = np.repeat(np.arange(len(area)), counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        idx = np.repeat(start, counts) + offs
        part = _area_below_np(fs[tri, 0], fs[tri, 1], fs[tri, 2], area[tri], levels[idx]) - base[tri]
        np.add.at(cum, idx, part)
    return cum


def _link_lower_runs_np(rank, center, ptr, nbr):
    """Number of maximal runs of lower neighbours in each cyclic link."""
    n = len(ptr) - 1
    lengths = np.diff(ptr)
    owner = np.repeat(np.arange(n), lengths)
    lower = rank[nbr] < rank[center[owner]]
    pos = np.arange(len(nbr))
    nxt = pos + 1
    last = ptr[1:] - 1
    nxt[last[lengths > 0]] = ptr[:-1][lengths > 0]
    starts = lower & ~lower[nxt]  # lower followed by upper ends a lower run
    runs = np.zeros(n, dtype=np.int64)
    np.add.at(runs, owner, starts.astype(np.int64))
    n_lower = np.zeros(n, dtype=np.int64)
    np.add.at(n_lower, owner, lower.astype(np.int64))
    return runs, n_lower, lengths


if USING_NUMBA:

    @njit(cache=True)
    def _area_below_one(f0, f1, f2, area, t):  # pragma: no cover - compiled
        if t <= f0:
            return 0.0
        if t >= f2:
            return area
        if t <= f1:
            if f1 == f0:
                return 0.0
            return area * (t - f0) ** 2 / ((f1 - f0) * (f2 - f0))
        return area - area * (f2 - t) ** 2 / ((f2 - f1) * (f2 - f0))

    @njit(cache=True)
    def _cumulative_area_nb(levels, fs, area, lo, hi):  # pragma: no cover - compiled
        k = levels.size
        diff = np.zeros(k + 1)
        cum = np.zeros(k)
        for i in range(area.size):
            f0, f1, f2 = fs[i, 0], fs[i, 1], fs[i, 2]
            base = _area_below_one(f0, f1, f2, area[i], lo[i])
            full = _area_below_one(f0, f1, f2, area[i], hi[i]) - base
            start = np.searchsorted(levels, max(lo[i], f0), side="right")
            stop = np.searchsorted(levels, min(hi[i], f2), side="left")
            diff[stop] += full
            for j in range(start, stop):
                cum[j] += _area_below_one(f0, f1, f2, area[i], levels[j]) - base
        acc = 0.0
        for j in range(k):
            acc += diff[j]
            cum[j] += acc
        return cum

    @njit(cache=True)
    def _link_lower_runs_nb(rank, center, ptr, nbr):  # pragma: no cover - compiled
        n = ptr.size - 1
        runs = np.zeros(n, dtype=np.int64)
        n_lower = np.zeros(n, dtype=np.int64)
        lengths = np.zeros(n, dtype=np.int64)
        for v in range(n):
            a, b = ptr[v], ptr[v + 1]
            lengths[v] = b - a
            rv = rank[center[v]]
            for p in range(a, b):
                q = p + 1 if p + 1 < b else a
                lo_here = rank[nbr[p]] < rv
                if lo_here:
                    n_lower[v] += 1
                    if not rank[nbr[q]] < rv:
                        runs[v] += 1
        return runs, n_lower, lengths


def cumulative_area(levels: np.ndarray, fs: np.ndarray, area: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Area of ``{F < t}`` summed over triangles clipped to ``[lo_i, hi_i]``, at each level ``t``.

    ``fs`` holds each triangle's vertex values sorted ascending; the
    contribution of triangle ``i`` is ``A_i(clip(t)) - A_i(lo_i)``.
    """
    levels = np.ascontiguousarray(levels, dtype=float)
    fs = np.ascontiguousarray(fs, dtype=float)
    area = np.ascontiguousarray(area, dtype=float)
    lo = np.ascontiguousarray(lo, dtype=float)
    hi = np.ascontiguousarray(hi, dtype=float)
    if USING_NUMBA:
        return _cumulative_area_nb(levels, fs, area, lo, hi)
    return _cumulative_area_np(levels, fs, area, lo, hi)


def link_lower_runs(rank: np.ndarray, center: np.ndarray, ptr: np.ndarray, nbr: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per link: (lower runs, lower count, link length); links are cyclic CSR rows."""
    rank = np.ascontiguousarray(rank, dtype=np.int64)
    center = np.ascontiguousarray(center, dtype=np.int64)
    ptr = np.ascontiguousarray(ptr, dtype=np.int64)
    nbr = np.ascontiguousarray(nbr, dtype=np.int64)
    if USING_NUMBA:
        return _link_lower_runs_nb(rank, center, ptr, nbr)
    return _link_lower_runs_np(rank, center, ptr, nbr)


area_below = _area_below_np
