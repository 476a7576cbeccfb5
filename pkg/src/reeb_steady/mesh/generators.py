"""Test surfaces: octahedron, parametrized torus, polar disk, voxel solids."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .io import Mesh, build_mesh


def octahedron() -> Mesh:
    """Regular octahedron with ``F = z``."""
    xyz = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    tris = []
    for k in range(4):
        a, b = k, (k + 1) % 4
        tris.append((a, b, 4))
        tris.append((b, a, 5))
    return build_mesh(xyz, xyz[:, 2], tris)


def torus_grid(n_u: int = 50, n_v: int = 50, major: float = 2.0, minor: float = 1.0) -> Mesh:
    """Standard torus standing on its side; ``F`` is the height ``x``.

    Grid vertices include the four critical points of the smooth height.
    """
    u = 2 * np.pi * np.arange(n_u) / n_u
    v = 2 * np.pi * np.arange(n_v) / n_v
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major + minor * np.cos(vv)
    xyz = np.stack([ring * np.cos(uu), ring * np.sin(uu), minor * np.sin(vv)], axis=-1).reshape(-1, 3)
    i, j = np.meshgrid(np.arange(n_u), np.arange(n_v), indexing="ij")
    a = (i * n_v + j).ravel()
    b = (((i + 1) % n_u) * n_v + j).ravel()
    c = (((i + 1) % n_u) * n_v + (j + 1) % n_v).ravel()
    d = (i * n_v + (j + 1) % n_v).ravel()
    tris = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    return build_mesh(xyz, xyz[:, 0], tris)


def torus_angles(n_u: int, n_v: int) -> tuple[np.ndarray, np.ndarray]:
    """Parameter angles ``(u, v)`` of the :func:`torus_grid` vertices."""
    u = 2 * np.pi * np.arange(n_u) / n_u
    v = 2 * np.pi * np.arange(n_v) / n_v
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return uu.ravel(), vv.ravel()


def disk_field(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Level on the unit circle, with an interior minimum, saddle and maximum.

    The small ``y`` term breaks the mirror symmetry, which would otherwise
    leave flat mesh edges and tied critical values after subdivision.
    """
    r2 = x * x + y * y
    well = np.exp(-((x + 0.45) ** 2 + y**2) / 0.08)
    peak = np.exp(-((x - 0.45) ** 2 + y**2) / 0.08)
    return 3.0 - (1.0 - r2) * (0.6 + 2.0 * well - 4.0 * peak - 0.037 * y)


def polar_disk(
    n_r: int = 30, n_theta: int = 64, field: Callable[[np.ndarray, np.ndarray], np.ndarray] = disk_field
) -> Mesh:
    """Unit disk triangulated on a polar grid (center plus ``n_r`` rings)."""
    pts = [(0.0, 0.0)]
    for k in range(1, n_r + 1):
        r = k / n_r
        th = 2 * np.pi * (np.arange(n_theta) + 0.5 * (k % 2)) / n_theta
        pts.extend(zip(r * np.cos(th), r * np.sin(th)))
    pts_a = np.array(pts)

    def ring(k: int, t: int) -> int:
        return 1 + (k - 1) * n_theta + (t % n_theta)

    tris = []
    for t in range(n_theta):
        tris.append((0, ring(1, t), ring(1, t + 1)))
    for k in range(1, n_r):
        shift = k % 2  # odd rings are rotated half a step
        for t in range(n_theta):
            if shift:
                tris.append((ring(k, t), ring(k + 1, t + 1), ring(k, t + 1)))
                tris.append((ring(k, t), ring(k + 1, t), ring(k + 1, t + 1)))
            else:
                tris.append((ring(k, t), ring(k + 1, t), ring(k, t + 1)))
                tris.append((ring(k, t + 1), ring(k + 1, t), ring(k + 1, t + 1)))
    xyz = np.column_stack([pts_a, np.zeros(len(pts_a))])
    F = field(pts_a[:, 0], pts_a[:, 1])
    F[-n_theta:] = field(np.array([1.0]), np.array([0.0]))[0]
    return build_mesh(xyz, F, tris)


def voxel_surface(occupied: Sequence[Sequence[Sequence[int]]], field: Callable[[np.ndarray], np.ndarray] | None = None) -> Mesh:
    """Boundary surface of a union of unit voxels, two triangles per face.

    The solid must have a manifold boundary (no edge- or vertex-only
    contacts).  ``field`` maps positions to values; the default is a
    generic linear height along ``x``.
    """
    occ = np.asarray(occupied, dtype=bool)
    padded = np.pad(occ, 1)
    index: dict[tuple[int, int, int], int] = {}
    tris: list[tuple[int, int, int]] = []

    def vid(p: tuple[int, int, int]) -> int:
        if p not in index:
            index[p] = len(index)
        return index[p]

    for axis in range(3):
        step = np.zeros(3, dtype=int)
        step[axis] = 1
        a1, a2 = (axis + 1) % 3, (axis + 2) % 3
        for cell in zip(*np.nonzero(padded)):
            cell = np.array(cell)
            for sgn in (1, -1):
                nb = cell + sgn * step
                if padded[tuple(nb)]:
                    continue
                base = cell - 1 + (step if sgn > 0 else 0)
                e1 = np.zeros(3, dtype=int)
                e1[a1] = 1
                e2 = np.zeros(3, dtype=int)
                e2[a2] = 1
                q = [tuple(base), tuple(base + e1), tuple(base + e1 + e2), tuple(base + e2)]
                if sgn < 0:
                    q = q[::-1]
                ids = [vid(p) for p in q]
                tris.append((ids[0], ids[1], ids[2]))
                tris.append((ids[0], ids[2], ids[3]))
    xyz = np.zeros((len(index), 3))
    for p, k in index.items():
        xyz[k] = p
    F = field(xyz) if field is not None else xyz[:, 0] + 0.1234 * xyz[:, 1] + 0.0567 * xyz[:, 2]
    return build_mesh(xyz, F, tris)


def pretzel_solid() -> np.ndarray:
    """Occupancy of a flat slab with two holes; its boundary has genus 2."""
    occ = np.ones((5, 3, 1), dtype=int)
    occ[1, 1, 0] = 0
    occ[3, 1, 0] = 0
    return occ


def subdivide(mesh: Mesh) -> Mesh:
    """One step of 1-to-4 midpoint subdivision with the field interpolated linearly."""
    n = mesh.n_vertices
    mid = {(int(u), int(w)): n + k for k, (u, w) in enumerate(mesh.edges)}
    xyz = np.concatenate([mesh.xyz, 0.5 * (mesh.xyz[mesh.edges[:, 0]] + mesh.xyz[mesh.edges[:, 1]])])
    F = np.concatenate([mesh.F, 0.5 * (mesh.F[mesh.edges[:, 0]] + mesh.F[mesh.edges[:, 1]])])

    def m(u: int, w: int) -> int:
        return mid[(u, w) if u < w else (w, u)]

    tris = []
    for a, b, c in mesh.triangles.tolist():
        ab, bc, ca = m(a, b), m(b, c), m(c, a)
        tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    ids = list(mesh.ids) + [f"m{k}" for k in range(len(mesh.edges))]
    return build_mesh(xyz, F, tris, ids, mesh.declared_genus)
