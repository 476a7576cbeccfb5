"""Measured Reeb graph of a mesh field, with the pushforward of the area.

The surface minus the critical levels splits into slab pieces: the part of
a triangle between two consecutive critical ranks.  Pieces are glued
across shared mesh edges inside a slab, and across a critical level inside
one triangle unless that triangle touches the critical node.  The glued
components are the graph edges; each one touches exactly one critical node
at its bottom and one at its top.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .._kernels import cumulative_area
from ..graph import MeasuredReebGraph, VertexRole, trunk_and_branches, validate_graph
from ..measures import EdgeMeasure, LogFit, fit_log_coefficients, total_mass_and_weight
from .critical import PointKind, critical_vertices, loop_sides
from .io import Mesh, MeshError

DEFAULT_FIT_WINDOW = 0.25
MIN_SAMPLES = 12


@dataclass(frozen=True)
class Node:
    id: str
    role: VertexRole
    rank: int
    f: float
    members: tuple[int, ...]  # mesh vertices (one, or a whole boundary loop)


@dataclass(frozen=True)
class SaddleFit:
    saddle: str
    edges: tuple[str, str, str]  # trunk, branch, branch
    samples: tuple[tuple[np.ndarray, np.ndarray], ...]
    fit: LogFit

    def to_json(self) -> dict[str, Any]:
        return {
            "saddle": self.saddle,
            "edges": list(self.edges),
            "kappa": list(self.fit.kappa),
            "stderr": list(self.fit.stderr),
            "ratios": list(self.fit.ratios),
            "tables": [{"u": u.tolist(), "mu": mu.tolist()} for u, mu in self.samples],
        }


@dataclass(frozen=True, eq=False)
class ExtractionResult:
    graph: MeasuredReebGraph
    nodes: tuple[Node, ...]  # sorted by rank; slab j lies between nodes j and j + 1
    piece_triangle: np.ndarray
    piece_slab: np.ndarray
    piece_edge: np.ndarray  # index into ``edge_ids``
    edge_ids: tuple[str, ...]
    diagnostics: tuple[SaddleFit, ...]

    def edge_of_piece(self, triangle: int, level: float) -> str | None:
        """Graph edge containing the part of ``triangle`` at height ``level``."""
        fs = np.array([n.f for n in self.nodes])
        j = int(np.searchsorted(fs, level, side="right")) - 1
        hit = np.nonzero((self.piece_triangle == triangle) & (self.piece_slab == j))[0]
        return self.edge_ids[self.piece_edge[hit[0]]] if hit.size else None

    def diagnostics_json(self) -> dict[str, Any]:
        return {"saddles": [d.to_json() for d in self.diagnostics]}


def _nodes(mesh: Mesh) -> list[Node]:
    roles = {PointKind.MIN: VertexRole.MIN, PointKind.MAX: VertexRole.MAX, PointKind.SADDLE: VertexRole.SADDLE}
    out = [
        Node(mesh.ids[v], roles[kind], int(mesh.rank[v]), float(mesh.F[v]), (v,)) for v, kind in critical_vertices(mesh)
    ]
    for side in loop_sides(mesh):
        loop = mesh.boundary_loops[side.loop]
        out.append(Node(f"loop{side.loop}", VertexRole.BOUNDARY, int(mesh.rank[loop[0]]), float(mesh.F[list(loop)].mean()), loop))
    return sorted(out, key=lambda n: n.rank)


def _pieces(mesh: Mesh, ranks: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r = mesh.rank[mesh.triangles]
    lo = np.searchsorted(ranks, r.min(axis=1), side="right") - 1
    hi = np.searchsorted(ranks, r.max(axis=1), side="left") - 1
    count = np.maximum(hi - lo + 1, 0)
    offset = np.concatenate([[0], np.cumsum(count)])
    return lo, count, offset


def extract_reeb(mesh: Mesh, fit_window: float = DEFAULT_FIT_WINDOW) -> ExtractionResult:
    """Sweep the mesh into a measured Reeb graph with per-saddle log-fit tables."""
    nodes = _nodes(mesh)
    if len(nodes) < 2:
        raise MeshError("non-simple Morse", "the field needs at least two critical nodes")
    ranks = np.array([n.rank for n in nodes])
    node_of = np.full(mesh.n_vertices, -1, dtype=np.int64)
    for k, n in enumerate(nodes):
        node_of[list(n.members)] = k
    tri_nodes = node_of[mesh.triangles]

    j_lo, count, offset = _pieces(mesh, ranks)
    n_pieces = int(offset[-1])
    p_tri = np.repeat(np.arange(len(mesh.triangles)), count)
    p_slab = j_lo[p_tri] + (np.arange(n_pieces) - offset[p_tri])

    # glue inside a slab across interior mesh edges
    inner = np.nonzero(mesh.edge_tris[:, 1] >= 0)[0]
    er = mesh.rank[mesh.edges[inner]]
    e_lo = np.searchsorted(ranks, er.min(axis=1), side="right") - 1
    e_hi = np.searchsorted(ranks, er.max(axis=1), side="left") - 1
    e_cnt = np.maximum(e_hi - e_lo + 1, 0)
    e_rep = np.repeat(np.arange(len(inner)), e_cnt)
    e_slab = e_lo[e_rep] + (np.arange(e_cnt.sum()) - np.repeat(np.cumsum(e_cnt) - e_cnt, e_cnt))
    t1 = mesh.edge_tris[inner[e_rep], 0]
    t2 = mesh.edge_tris[inner[e_rep], 1]
    src = [offset[t1] + e_slab - j_lo[t1]]
    dst = [offset[t2] + e_slab - j_lo[t2]]
    # glue across a critical level, except through the level component of the node
    items = np.nonzero(p_slab + 1 < j_lo[p_tri] + count[p_tri])[0]
    regular = _regular_crossings(items, p_tri, p_slab, offset, j_lo, tri_nodes, inner, e_lo, e_cnt, e_rep, e_slab, t1, t2, len(nodes))
    src.append(items[regular])
    dst.append(items[regular] + 1)
    src_a, dst_a = np.concatenate(src), np.concatenate(dst)
    adj = coo_matrix((np.ones(len(src_a)), (src_a, dst_a)), shape=(n_pieces, n_pieces))
    n_comp, comp = connected_components(adj, directed=False)

    touch_lo = np.any(tri_nodes[p_tri] == p_slab[:, None], axis=1)
    touch_hi = np.any(tri_nodes[p_tri] == (p_slab + 1)[:, None], axis=1)
    bottoms: list[set[int]] = [set() for _ in range(n_comp)]
    tops: list[set[int]] = [set() for _ in range(n_comp)]
    for c, s in zip(comp[touch_lo].tolist(), p_slab[touch_lo].tolist()):
        bottoms[c].add(s)
    for c, s in zip(comp[touch_hi].tolist(), (p_slab[touch_hi] + 1).tolist()):
        tops[c].add(s)
    for c in range(n_comp):
        if len(bottoms[c]) != 1 or len(tops[c]) != 1:
            raise MeshError("non-simple Morse", f"a level component meets {len(bottoms[c])} lower and {len(tops[c])} upper critical nodes")

    ends = [(bottoms[c].pop(), tops[c].pop()) for c in range(n_comp)]
    for a, b in ends:
        if nodes[a].f >= nodes[b].f:
            raise MeshError("non-simple Morse", f"critical nodes {nodes[a].id} and {nodes[b].id} share the level F = {nodes[a].f!r}")
    order = sorted(range(n_comp), key=lambda c: (nodes[ends[c][0]].f, nodes[ends[c][1]].f, nodes[ends[c][0]].id, nodes[ends[c][1]].id, c))
    width = max(3, len(str(n_comp - 1)))
    edge_name = {c: f"e{k:0{width}d}" for k, c in enumerate(order)}

    measures = _edge_tables(mesh, nodes, p_tri, p_slab, comp, n_comp, ends, tri_nodes)
    graph = MeasuredReebGraph.build(
        [(n.id, n.role, n.f) for n in nodes],
        [(edge_name[c], nodes[ends[c][0]].id, nodes[ends[c][1]].id, measures[c]) for c in range(n_comp)],
    )
    b1, _ = homology_dimensions_unchecked(graph)
    graph = MeasuredReebGraph(graph.vertices, graph.edges, b1, len(mesh.boundary_loops), graph.height_tol)
    problems = validate_graph(graph)
    if problems:
        raise MeshError("extraction", "; ".join(f"{p.code}: {p.message} ({p.where})" for p in problems))

    edge_ids = tuple(edge_name[c] for c in range(n_comp))
    diags = tuple(_saddle_fit(graph, n.id, fit_window) for n in nodes if n.role is VertexRole.SADDLE)
    return ExtractionResult(graph, tuple(nodes), p_tri, p_slab, comp, edge_ids, diags)


def _regular_crossings(items, p_tri, p_slab, offset, j_lo, tri_nodes, inner, e_lo, e_cnt, e_rep, e_slab, t1, t2, n_nodes):
    """Mask of level crossings ``(T, k)`` that avoid the component of node ``k``.

    An item is a triangle with pieces on both sides of critical level
    ``k``.  Items meet through mesh edges that cross the level strictly and
    through the node itself (one virtual vertex per level).
    """
    n_items = len(items)
    level = p_slab[items] + 1
    item_of = np.full(len(p_tri), -1, dtype=np.int64)
    item_of[items] = np.arange(n_items)
    # an edge crosses level k strictly when k lies inside its slab range
    crosses = e_slab > e_lo[e_rep]
    k = e_slab[crosses]
    a = item_of[offset[t1[crosses]] + (k - 1) - j_lo[t1[crosses]]]
    b = item_of[offset[t2[crosses]] + (k - 1) - j_lo[t2[crosses]]]
    at_node = np.any(tri_nodes[p_tri[items]] == level[:, None], axis=1)
    src = np.concatenate([a, np.nonzero(at_node)[0]])
    dst = np.concatenate([b, n_items + level[at_node]])
    size = n_items + n_nodes
    adj = coo_matrix((np.ones(len(src)), (src, dst)), shape=(size, size))
    _, comp = connected_components(adj, directed=False)
    singular = comp[n_items + level]
    return comp[:n_items] != singular


def homology_dimensions_unchecked(g: MeasuredReebGraph) -> tuple[int, int]:
    b1 = len(g.edges) - len(g.vertices) + 1
    k = sum(v.role is VertexRole.BOUNDARY for v in g.vertices)
    return b1, (b1 if k == 0 else b1 + k - 1)


def _edge_tables(mesh, nodes, p_tri, p_slab, comp, n_comp, ends, tri_nodes) -> list[EdgeMeasure]:
    fs_nodes = np.array([n.f for n in nodes])
    # per (component, triangle): lowest and highest slab
    key = comp.astype(np.int64) * len(mesh.triangles) + p_tri
    order = np.lexsort((p_slab, key))
    key_s, slab_s = key[order], p_slab[order]
    first = np.concatenate([[True], key_s[1:] != key_s[:-1]])
    last = np.concatenate([key_s[1:] != key_s[:-1], [True]])
    g_key = key_s[first]
    g_comp = g_key // len(mesh.triangles)
    g_tri = g_key % len(mesh.triangles)
    g_lo = fs_nodes[slab_s[first]]
    g_hi = fs_nodes[slab_s[last] + 1]
    tri_f = np.sort(mesh.F[mesh.triangles], axis=1)

    flat = np.nonzero(np.all(tri_nodes >= 0, axis=1) & (tri_nodes[:, 0] == tri_nodes[:, 1]) & (tri_nodes[:, 1] == tri_nodes[:, 2]))[0]
    flat_area = np.zeros(len(nodes))
    np.add.at(flat_area, tri_nodes[flat, 0], mesh.areas[flat])

    out = []
    for c in range(n_comp):
        sel = g_comp == c
        lo, hi = nodes[ends[c][0]].f, nodes[ends[c][1]].f
        tris = g_tri[sel]
        vals = mesh.F[mesh.triangles[tris]].ravel()
        inside = np.unique(vals[(vals > lo) & (vals < hi)])
        levels = np.concatenate([[lo], inside, [hi]])
        cum = cumulative_area(levels, tri_f[tris], mesh.areas[tris], g_lo[sel], g_hi[sel])
        cum = np.maximum.accumulate(np.maximum(cum, 0.0))
        cum[0] = 0.0
        # triangles lying flat inside a boundary loop have no slab; give them to the adjacent edge
        for end, where in ((ends[c][0], 0), (ends[c][1], -1)):
            if flat_area[end] and nodes[end].role is VertexRole.BOUNDARY:
                if where == 0:
                    cum[1:] += flat_area[end]
                else:
                    cum[-1] += flat_area[end]
        out.append(EdgeMeasure.from_table(levels.tolist(), cum.tolist()))
    return out


def _saddle_fit(g: MeasuredReebGraph, saddle: str, window: float) -> SaddleFit:
    trunk, (b1, b2) = trunk_and_branches(g, saddle)
    fs = g.f(saddle)
    lengths = [float(g.edge_range(e)[1] - g.edge_range(e)[0]) for e in (trunk, b1, b2)]
    reach = window * min(lengths)
    samples = []
    for eid in (trunk, b1, b2):
        e = g.edge(eid)
        f, cum = (np.asarray(x, dtype=float) for x in e.measure.table)
        if e.tail == saddle:
            u, mu = f - fs, cum - cum[0]
        else:
            u, mu = f - fs, cum[-1] - cum
        keep = np.abs(u) <= reach
        if keep.sum() < MIN_SAMPLES:
            # short edges: fall back to the samples nearest the saddle
            keep = np.zeros(len(u), dtype=bool)
            keep[np.argsort(np.abs(u))[:MIN_SAMPLES]] = True
        samples.append((u[keep], mu[keep]))
    try:
        fit = fit_log_coefficients(samples)
    except ValueError:
        nan = (float("nan"),) * 3
        fit = LogFit(nan, nan, nan)
    return SaddleFit(saddle, (trunk, b1, b2), tuple(samples), fit)


# -- compatibility ---------------------------------------------------------------

@dataclass(frozen=True)
class CheckEntry:
    name: str
    ok: bool
    expected: Any
    found: Any

    def to_json(self) -> dict[str, Any]:
        return {"check": self.name, "ok": self.ok, "expected": self.expected, "found": self.found}


@dataclass(frozen=True)
class CompatibilityReport:
    entries: tuple[CheckEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict[str, Any]:
        return {"ok": self.ok, "checks": [e.to_json() for e in self.entries]}


def compatibility_check(g: MeasuredReebGraph, mesh: Mesh, rtol: float = 1e-6) -> CompatibilityReport:
    """Genus, boundary count and total volume of the graph against the surface."""
    b1, _ = homology_dimensions_unchecked(g)
    n_bnd = sum(v.role is VertexRole.BOUNDARY for v in g.vertices)
    mass, _ = total_mass_and_weight(g)
    area = mesh.area
    return CompatibilityReport(
        (
            CheckEntry("genus", b1 == mesh.genus, mesh.genus, b1),
            CheckEntry("boundary", n_bnd == len(mesh.boundary_loops), len(mesh.boundary_loops), n_bnd),
            CheckEntry("volume", abs(float(mass) - area) <= rtol * area, area, float(mass)),
        )
    )


__all__ = [
    "CheckEntry",
    "CompatibilityReport",
    "ExtractionResult",
    "Node",
    "SaddleFit",
    "compatibility_check",
    "extract_reeb",
]
