"""Circulation of a discrete 1-form over the level cycles of a mesh field."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .._kernels import thread_count
from ..graph import VertexRole
from .extract import ExtractionResult
from .io import Mesh, MeshError

ANTISYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PushforwardCirculation:
    levels: dict[str, np.ndarray]
    values: dict[str, np.ndarray]
    head_limits: dict[str, float]
    tail_limits: dict[str, float]
    kirchhoff: dict[str, float]

    @property
    def max_residual(self) -> float:
        return max((abs(x) for x in self.kirchhoff.values()), default=0.0)

    def to_json(self) -> dict[str, Any]:
        return {
            "edges": {
                e: {"levels": self.levels[e].tolist(), "circulation": self.values[e].tolist(),
                    "head_limit": self.head_limits[e], "tail_limit": self.tail_limits[e]}
                for e in sorted(self.levels)
            },
            "kirchhoff_residuals": dict(sorted(self.kirchhoff.items())),
        }


def oneform_array(mesh: Mesh, oneform: Any) -> np.ndarray:
    """Values on the mesh edges oriented from the lower to the higher index.

    Accepts such an array directly, or a mapping from directed vertex pairs;
    when both directions of an edge are given they must be opposite.
    """
    if not isinstance(oneform, Mapping):
        arr = np.asarray(oneform, dtype=float)
        if arr.shape != (len(mesh.edges),):
            raise ValueError(f"expected {len(mesh.edges)} edge values, got shape {arr.shape}")
        return arr
    out = np.full(len(mesh.edges), np.nan)
    for (u, w), val in oneform.items():
        k = mesh.edge_id(int(u), int(w))
        v = float(val) if u < w else -float(val)
        if not np.isnan(out[k]) and abs(out[k] - v) > ANTISYMMETRY_TOL * max(1.0, abs(v)):
            raise ValueError(f"1-form is not antisymmetric on edge ({u}, {w})")
        out[k] = v
    if np.isnan(out).any():
        k = int(np.nonzero(np.isnan(out))[0][0])
        raise ValueError(f"1-form is missing edge ({mesh.edges[k, 0]}, {mesh.edges[k, 1]})")
    return out


def exact_oneform(mesh: Mesh, potential: np.ndarray) -> np.ndarray:
    """Discrete gradient ``phi(w) - phi(u)``."""
    potential = np.asarray(potential, dtype=float)
    return potential[mesh.edges[:, 1]] - potential[mesh.edges[:, 0]]


def angular_oneform(mesh: Mesh, angle: np.ndarray) -> np.ndarray:
    """Closed form ``d(angle)`` with differences wrapped into ``(-pi, pi]``."""
    angle = np.asarray(angle, dtype=float)
    d = angle[mesh.edges[:, 1]] - angle[mesh.edges[:, 0]]
    return -((-d + np.pi) % (2 * np.pi) - np.pi)


def _triangle_edge_values(mesh: Mesh, omega: np.ndarray) -> np.ndarray:
    """``W[t, k]`` = form on the directed local edge ``k -> k+1`` of triangle ``t``."""
    tris = mesh.triangles
    n = mesh.n_vertices
    keys = mesh.edges[:, 0] * n + mesh.edges[:, 1]
    out = np.empty(tris.shape)
    for k in range(3):
        a, b = tris[:, k], tris[:, (k + 1) % 3]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        idx = np.searchsorted(keys, lo * n + hi)
        out[:, k] = np.where(a < b, omega[idx], -omega[idx])
    return out


def _level_integral(fv: np.ndarray, W: np.ndarray, t: float) -> float:
    """Whitney integral over the oriented level segments ``F = t`` in the given triangles."""
    below = fv < t
    nb = below.sum(axis=1)
    cross = (nb == 1) | (nb == 2)
    fv, W, below, nb = fv[cross], W[cross], below[cross], nb[cross]
    m = len(fv)
    if m == 0:
        return 0.0
    # pivot: the lone vertex on its side; the segment runs between its two edges
    pivot = np.where(nb == 1, np.argmax(below, axis=1), np.argmin(below, axis=1))
    rows = np.arange(m)
    nxt = (pivot + 1) % 3
    prv = (pivot + 2) % 3

    def point(i, j):
        lam = np.zeros((m, 3))
        fi, fj = fv[rows, i], fv[rows, j]
        s = (fj - t) / (fj - fi)
        lam[rows, i] = s
        lam[rows, j] = 1 - s
        return lam

    # one vertex below: from edge (p, p+1) to edge (p, p+2); one above: from (p-1, p) to (p, p+1)
    p_start = np.where((nb == 1)[:, None], point(pivot, nxt), point(prv, pivot))
    p_end = np.where((nb == 1)[:, None], point(pivot, prv), point(pivot, nxt))
    total = 0.0
    for k in range(3):
        a, b = k, (k + 1) % 3
        total += float(np.sum(W[:, k] * (p_start[:, a] * p_end[:, b] - p_start[:, b] * p_end[:, a])))
    return total


def _safe_levels(lo: float, hi: float, count: int, fsorted: np.ndarray) -> np.ndarray:
    x = lo + (hi - lo) * (1 - np.cos(np.pi * (np.arange(count) + 0.5) / count)) / 2
    idx = np.searchsorted(fsorted, x)
    for k, i in enumerate(idx):
        if i < len(fsorted) and fsorted[i] == x[k]:
            # level through a vertex: move to the middle of the neighbouring gap
            x[k] = 0.5 * (fsorted[i] + fsorted[min(i + 1, len(fsorted) - 1)])
    return x


def pushforward_circulation(
    mesh: Mesh,
    oneform: Any,
    result: ExtractionResult,
    samples_per_edge: int = 9,
    degree: int = 2,
) -> PushforwardCirculation:
    """Sample ``c(t) = int over the level cycle`` on every graph edge.

    Level cycles are oriented as the boundary of ``{F < t}``.  Limits at the
    edge ends come from a polynomial fit of degree ``degree``; the Kirchhoff
    residual at each non-boundary vertex is ``sum(in heads) - sum(out tails)``.
    """
    omega = oneform_array(mesh, oneform)
    W = _triangle_edge_values(mesh, omega)
    tri_f = mesh.F[mesh.triangles]
    fsorted = np.unique(mesh.F)
    g = result.graph
    node_f = np.array([n.f for n in result.nodes])

    jobs = []
    for k, eid in enumerate(result.edge_ids):
        lo, hi = (float(x) for x in g.edge_range(eid))
        for t in _safe_levels(lo, hi, samples_per_edge, fsorted):
            jobs.append((k, eid, t))

    piece_edge = result.piece_edge

    def run(job: tuple[int, str, float]) -> float:
        k, _, t = job
        j = int(np.searchsorted(node_f, t, side="right")) - 1
        tris = result.piece_triangle[(piece_edge == k) & (result.piece_slab == j)]
        if tris.size == 0:
            raise MeshError("extraction", f"no triangles of edge {result.edge_ids[k]} at level {t!r}")
        return _level_integral(tri_f[tris], W[tris], t)

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        values = list(pool.map(run, jobs))

    levels: dict[str, list[float]] = {e: [] for e in result.edge_ids}
    vals: dict[str, list[float]] = {e: [] for e in result.edge_ids}
    for (_, eid, t), v in zip(jobs, values):
        levels[eid].append(t)
        vals[eid].append(v)
    heads, tails = {}, {}
    for eid in result.edge_ids:
        lo, hi = (float(x) for x in g.edge_range(eid))
        t_arr, v_arr = np.array(levels[eid]), np.array(vals[eid])
        coef = np.polynomial.polynomial.polyfit(t_arr, v_arr, min(degree, len(t_arr) - 1))
        heads[eid] = float(np.polynomial.polynomial.polyval(hi, coef))
        tails[eid] = float(np.polynomial.polynomial.polyval(lo, coef))
    kirchhoff = {}
    for v in g.vertices:
        if v.role is VertexRole.BOUNDARY:
            continue
        kirchhoff[v.id] = sum(heads[e] for e in g.in_edges(v.id)) - sum(tails[e] for e in g.out_edges(v.id))
    return PushforwardCirculation(
        {e: np.array(levels[e]) for e in levels}, {e: np.array(vals[e]) for e in vals}, heads, tails, kirchhoff
    )
