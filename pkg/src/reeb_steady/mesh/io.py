"""Triangle meshes with a per-vertex scalar field.

Loading validates the surface (manifold, connected, oriented, no
degenerate triangles), extracts boundary loops and builds the ordered
vertex links used by the critical-point classifier.  Equal field values are
ordered by vertex index (simulation of simplicity); all vertices of one
boundary loop share a single rank, since a loop is one node of the graph.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

BOUNDARY_CONSTANT_RTOL = 1e-9
ZERO_AREA_RTOL = 1e-14


class MeshError(ValueError):
    """Invalid mesh input; ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True, eq=False)
class Mesh:
    ids: tuple[str, ...]
    xyz: np.ndarray
    F: np.ndarray
    triangles: np.ndarray  # consistently oriented
    areas: np.ndarray
    edges: np.ndarray  # (E, 2) with u < w
    edge_tris: np.ndarray  # (E, 2), -1 where absent
    boundary_loops: tuple[tuple[int, ...], ...]
    rank: np.ndarray  # perturbed order; boundary loops share a rank
    link_ptr: np.ndarray
    link_nbr: np.ndarray  # cyclic (interior) or open (boundary) neighbour lists
    declared_genus: int | None = None
    _edge_index: dict[tuple[int, int], int] = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.ids)

    @property
    def euler_characteristic(self) -> int:
        return len(self.ids) - len(self.edges) + len(self.triangles)

    @property
    def computed_genus(self) -> int:
        return (2 - len(self.boundary_loops) - self.euler_characteristic) // 2

    @property
    def genus(self) -> int:
        return self.computed_genus if self.declared_genus is None else self.declared_genus

    @property
    def area(self) -> float:
        return float(self.areas.sum())

    @property
    def loop_of_vertex(self) -> np.ndarray:
        out = np.full(len(self.ids), -1, dtype=np.int64)
        for k, loop in enumerate(self.boundary_loops):
            out[list(loop)] = k
        return out

    def edge_id(self, u: int, w: int) -> int:
        """Index of the undirected mesh edge ``{u, w}``."""
        if not self._edge_index:
            self._edge_index.update({(int(a), int(b)): k for k, (a, b) in enumerate(self.edges)})
        key = (u, w) if u < w else (w, u)
        return self._edge_index[key]

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "vertices": [
                {"id": i, "xyz": [float(x) for x in p], "F": float(f)} for i, p, f in zip(self.ids, self.xyz, self.F)
            ],
            "triangles": [[int(x) for x in t] for t in self.triangles],
        }
        if self.declared_genus is not None:
            out["genus"] = self.declared_genus
        return out

    def with_declared_genus(self, genus: int | None) -> "Mesh":
        return build_mesh(self.xyz, self.F, self.triangles, self.ids, genus)


def _triangle_areas(xyz: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a, b, c = xyz[tris[:, 0]], xyz[tris[:, 1]], xyz[tris[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def _orient(tris: np.ndarray, edge_of: np.ndarray, edge_tris: np.ndarray) -> np.ndarray:
    """Flip triangles so that neighbours traverse their shared edge oppositely."""
    m = len(tris)
    orig = tris
    tris = tris.copy()
    seen = np.zeros(m, dtype=bool)

    def direction(t: int, e_uv: tuple[int, int]) -> int:
        a, b, c = tris[t]
        u, v = e_uv
        for x, y in ((a, b), (b, c), (c, a)):
            if (x, y) == (u, v):
                return 1
            if (x, y) == (v, u):
                return -1
        raise AssertionError("edge not in triangle")

    for root in range(m):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            t = queue.popleft()
            for k in range(3):
                e = edge_of[t, k]
                others = [x for x in edge_tris[e] if x >= 0 and x != t]
                if not others:
                    continue
                s = others[0]
                # edge_of follows the input vertex order, which flips do not preserve
                uv = (orig[t, k], orig[t, (k + 1) % 3])
                consistent = direction(s, uv) == -direction(t, uv)
                if not seen[s]:
                    if not consistent:
                        tris[s] = tris[s][::-1]
                    seen[s] = True
                    queue.append(s)
                elif not consistent:
                    raise MeshError("non-orientable", f"triangles {t} and {s} cannot be oriented consistently")
    return tris


def _boundary_loops(tris: np.ndarray, edge_tris: np.ndarray, edges: np.ndarray) -> list[list[int]]:
    nxt: dict[int, int] = {}
    for e in np.nonzero(edge_tris[:, 1] < 0)[0]:
        t = edge_tris[e, 0]
        u, w = edges[e]
        a, b, c = tris[t]
        # boundary follows the triangle's own direction along the edge
        for x, y in ((a, b), (b, c), (c, a)):
            if {x, y} == {u, w}:
                if x in nxt:
                    raise MeshError("non-manifold vertex", f"vertex {x} lies on two boundary arcs")
                nxt[int(x)] = int(y)
    loops = []
    pending = set(nxt)
    while pending:
        start = min(pending)
        loop = [start]
        pending.discard(start)
        v = nxt[start]
        while v != start:
            if v not in pending:
                raise MeshError("non-manifold vertex", f"boundary through vertex {v} does not close")
            loop.append(v)
            pending.discard(v)
            v = nxt[v]
        loops.append(loop)
    return loops


def _links(n: int, tris: np.ndarray, boundary: set[int]) -> tuple[np.ndarray, np.ndarray]:
    """Ordered neighbour rings; a ring that does not close is a non-manifold vertex."""
    nexts: list[dict[int, int]] = [dict() for _ in range(n)]
    for a, b, c in tris.tolist():
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            nexts[v][x] = y
    ptr = [0]
    nbr: list[int] = []
    for v in range(n):
        ring = nexts[v]
        if v in boundary:
            heads = set(ring) - set(ring.values())
            if len(heads) != 1:
                raise MeshError("non-manifold vertex", f"vertex {v} has a disconnected link")
            x = heads.pop()
            order = [x]
            while x in ring:
                x = ring[x]
                order.append(x)
        else:
            x = min(ring)
            order = [x]
            while ring[x] != order[0]:
                x = ring[x]
                order.append(x)
                if len(order) > len(ring):
                    break
        if len(order) != len(ring) + (1 if v in boundary else 0):
            raise MeshError("non-manifold vertex", f"vertex {v} has a link that is not a single cycle or path")
        nbr.extend(order)
        ptr.append(len(nbr))
    return np.asarray(ptr, dtype=np.int64), np.asarray(nbr, dtype=np.int64)


def build_mesh(
    xyz: Any,
    F: Any,
    triangles: Any,
    ids: Sequence[str] | None = None,
    genus: int | None = None,
) -> Mesh:
    """Validate raw arrays and assemble a :class:`Mesh`."""
    xyz = np.asarray(xyz, dtype=float)
    F = np.asarray(F, dtype=float)
    tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    n = len(xyz)
    if xyz.ndim != 2 or xyz.shape[1] != 3 or F.shape != (n,):
        raise MeshError("schema", "expected (n, 3) positions and n field values")
    if len(tris) == 0:
        raise MeshError("schema", "mesh has no triangles")
    if tris.min() < 0 or tris.max() >= n:
        raise MeshError("schema", "triangle references a missing vertex")
    if np.any((tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])):
        raise MeshError("zero-area triangle", "triangle repeats a vertex")
    if not np.all(np.isfinite(F)) or not np.all(np.isfinite(xyz)):
        raise MeshError("schema", "non-finite coordinates or field values")
    ids = tuple(str(i) for i in ids) if ids is not None else tuple(f"v{k}" for k in range(n))

    areas = _triangle_areas(xyz, tris)
    scale = float(np.ptp(xyz, axis=0).max()) ** 2 or 1.0
    bad = np.nonzero(areas <= ZERO_AREA_RTOL * scale)[0]
    if bad.size:
        raise MeshError("zero-area triangle", f"triangle {int(bad[0])} has zero area")

    half = np.sort(np.stack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=1), axis=2).reshape(-1, 2)
    edges, inverse, counts = np.unique(half, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.reshape(-1)
    if np.any(counts > 2):
        e = int(np.nonzero(counts > 2)[0][0])
        raise MeshError("non-manifold edge", f"edge ({edges[e, 0]}, {edges[e, 1]}) has {counts[e]} incident triangles")
    edge_of = inverse.reshape(-1, 3)
    edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
    slot = np.zeros(len(edges), dtype=np.int64)
    for t, e in zip(np.repeat(np.arange(len(tris)), 3), inverse):
        edge_tris[e, slot[e]] = t
        slot[e] += 1

    used = np.zeros(n, dtype=bool)
    used[tris.ravel()] = True
    if not used.all():
        raise MeshError("disconnected", f"vertex {int(np.nonzero(~used)[0][0])} belongs to no triangle")
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    inner = edge_tris[edge_tris[:, 1] >= 0]
    adj = coo_matrix((np.ones(len(inner)), (inner[:, 0], inner[:, 1])), shape=(len(tris), len(tris)))
    n_comp, _ = connected_components(adj, directed=False)
    if n_comp != 1:
        raise MeshError("disconnected", f"mesh has {n_comp} connected pieces")

    tris = _orient(tris, edge_of, edge_tris)
    loops = _boundary_loops(tris, edge_tris, edges)
    on_boundary = {v for loop in loops for v in loop}
    link_ptr, link_nbr = _links(n, tris, on_boundary)

    f_range = float(np.ptp(F)) or 1.0
    key = F.copy()
    tie = np.arange(n)
    for k, loop in enumerate(loops):
        vals = F[loop]
        if vals.max() - vals.min() >= BOUNDARY_CONSTANT_RTOL * f_range:
            raise MeshError("boundary not level", f"field varies by {vals.max() - vals.min():.3g} along boundary loop {k}")
        key[loop] = vals.mean()
        tie[loop] = min(loop)
    order = np.lexsort((tie, key))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    for loop in loops:
        rank[loop] = rank[loop].min()

    return Mesh(ids, xyz, F, tris, areas, edges, edge_tris, tuple(tuple(l) for l in loops), rank, link_ptr, link_nbr, genus)


def _parse_off(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.append(line.split())
    if not tokens or not tokens[0][0].endswith("OFF"):
        raise MeshError("schema", "missing OFF header")
    head = tokens[0][1:] if len(tokens[0]) > 1 else None
    rest = tokens[1:]
    if head is None:
        head, rest = rest[0], rest[1:]
    nv, nf = int(head[0]), int(head[1])
    vrows = rest[:nv]
    frows = rest[nv : nv + nf]
    if len(vrows) != nv or len(frows) != nf:
        raise MeshError("schema", "OFF file is truncated")
    xyz = np.array([[float(x) for x in r[:3]] for r in vrows])
    # a fourth vertex column carries the field; otherwise the field is z
    F = np.array([float(r[3]) if len(r) > 3 else float(r[2]) for r in vrows])
    tris = []
    for r in frows:
        k = int(r[0])
        idx = [int(x) for x in r[1 : 1 + k]]
        if k != 3:
            raise MeshError("schema", f"only triangles are supported (face with {k} vertices)")
        tris.append(idx)
    return xyz, F, np.array(tris, dtype=np.int64)


def mesh_from_json(obj: dict[str, Any]) -> Mesh:
    try:
        verts = obj["vertices"]
        ids = [str(v.get("id", k)) for k, v in enumerate(verts)]
        xyz = [v["xyz"] for v in verts]
        F = [v["F"] for v in verts]
        index = {i: k for k, i in enumerate(ids)}
        tris = [[t if isinstance(t, int) else index[str(t)] for t in tri] for tri in obj["triangles"]]
    except (KeyError, TypeError, AttributeError) as exc:
        raise MeshError("schema", f"bad mesh record: {exc}") from exc
    return build_mesh(xyz, F, tris, ids, obj.get("genus"))


def load_mesh(path: str | Path, genus: int | None = None) -> Mesh:
    """Read an OFF or JSON mesh; ``genus`` overrides any genus declared in the file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        mesh = mesh_from_json(json.loads(text))
        return mesh if genus is None else mesh.with_declared_genus(genus)
    xyz, F, tris = _parse_off(text)
    return build_mesh(xyz, F, tris, None, genus)


def write_off(mesh: Mesh, path: str | Path) -> None:
    lines = ["OFF", f"{mesh.n_vertices} {len(mesh.triangles)} {len(mesh.edges)}"]
    lines += [f"{p[0]!r} {p[1]!r} {p[2]!r} {f!r}" for p, f in zip(mesh.xyz.tolist(), mesh.F.tolist())]
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")
