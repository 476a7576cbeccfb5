"""Critical points of a piecewise-linear field from lower-link components."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .._kernels import link_lower_runs
from .io import Mesh, MeshError


class PointKind(str, enum.Enum):
    MIN = "Min"
    MAX = "Max"
    SADDLE = "Saddle"
    REGULAR = "Regular"


@dataclass(frozen=True)
class LoopSide:
    """Which side of a boundary loop the surface lies on."""

    loop: int
    above: bool  # True: every neighbour is higher, the loop is a bottom


def _interior_links(mesh: Mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    boundary = np.zeros(mesh.n_vertices, dtype=bool)
    for loop in mesh.boundary_loops:
        boundary[list(loop)] = True
    inner = np.nonzero(~boundary)[0]
    starts, stops = mesh.link_ptr[inner], mesh.link_ptr[inner + 1]
    lengths = stops - starts
    ptr = np.concatenate([[0], np.cumsum(lengths)])
    idx = np.repeat(starts, lengths) + (np.arange(ptr[-1]) - np.repeat(ptr[:-1], lengths))
    return inner, ptr, mesh.link_nbr[idx]


def classify_critical(mesh: Mesh) -> list[tuple[str, PointKind]]:
    """Role of every interior vertex, in vertex order.

    Zero lower runs in the link is a minimum, an all-lower link a maximum,
    two runs a simple saddle; three or more runs is a monkey saddle and is
    rejected.
    """
    inner, ptr, nbr = _interior_links(mesh)
    runs, n_lower, lengths = link_lower_runs(mesh.rank, inner, ptr, nbr)
    kinds = np.full(len(inner), 1, dtype=np.int64)  # regular
    kinds[n_lower == 0] = 0
    kinds[n_lower == lengths] = 2
    kinds[(runs == 2) & (n_lower > 0) & (n_lower < lengths)] = 3
    monkey = np.nonzero(runs >= 3)[0]
    if monkey.size:
        v = int(inner[monkey[0]])
        raise MeshError(
            "non-simple Morse", f"vertex {mesh.ids[v]} is a degenerate saddle with {int(runs[monkey[0]])} lower link components"
        )
    names = (PointKind.MIN, PointKind.REGULAR, PointKind.MAX, PointKind.SADDLE)
    return [(mesh.ids[v], names[k]) for v, k in zip(inner.tolist(), kinds.tolist())]


def critical_vertices(mesh: Mesh) -> list[tuple[int, PointKind]]:
    """Non-regular interior vertices as ``(index, kind)``."""
    index = {i: k for k, i in enumerate(mesh.ids)}
    return [(index[i], kind) for i, kind in classify_critical(mesh) if kind is not PointKind.REGULAR]


def loop_sides(mesh: Mesh) -> list[LoopSide]:
    """Boundary loops must be regular: every neighbour strictly on one side."""
    out = []
    loop_of = mesh.loop_of_vertex
    for k, loop in enumerate(mesh.boundary_loops):
        r = mesh.rank[loop[0]]
        nbrs = np.concatenate([mesh.link_nbr[mesh.link_ptr[v] : mesh.link_ptr[v + 1]] for v in loop])
        nbrs = nbrs[loop_of[nbrs] != k]
        if nbrs.size == 0:
            raise MeshError("boundary not level", f"boundary loop {k} has no interior neighbours")
        up = mesh.rank[nbrs] > r
        if up.all():
            out.append(LoopSide(k, True))
        elif not up.any():
            out.append(LoopSide(k, False))
        else:
            raise MeshError("critical boundary", f"the field has a critical point on boundary loop {k}")
    return out


def critical_counts(mesh: Mesh) -> dict[str, int]:
    counts = {k.value: 0 for k in (PointKind.MIN, PointKind.MAX, PointKind.SADDLE)}
    for _, kind in critical_vertices(mesh):
        counts[kind.value] += 1
    return counts
