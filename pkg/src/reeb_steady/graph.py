"""Measured Reeb graphs: structure, validation, homology, refinement."""
from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

import numpy as np
from scipy import optimize

from .measures import EdgeMeasure, MeasureError
from .numbers import Num, dump_num, parse_num

if TYPE_CHECKING:
    from .circulation import CirculationFunction

DEFAULT_HEIGHT_TOL = 1e-12


class VertexRole(str, enum.Enum):
    MIN = "Min"
    MAX = "Max"
    SADDLE = "Saddle"
    BOUNDARY = "Boundary"
    MARKER = "Marker"  # 2-valent subdivision point, only in refined graphs


class InvalidGraphError(ValueError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"invalid measured Reeb graph: {lines}")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: str | None = None

    def __str__(self) -> str:
        return f"{self.code} [{self.where}]: {self.message}" if self.where else f"{self.code}: {self.message}"

    def to_json(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "where": self.where}


@dataclass(frozen=True)
class Vertex:
    id: str
    role: VertexRole
    f: Num


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    measure: EdgeMeasure


@dataclass(frozen=True)
class MeasuredReebGraph:
    """The triple (graph, height function, edge measures).

    Vertices and edges are kept in id order so that every derived object
    (linear systems, reports, JSON) is deterministic.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    genus: int | None = None
    boundary_components: int | None = None
    height_tol: float = DEFAULT_HEIGHT_TOL
    coordinates: tuple[tuple[str, str], ...] | None = field(default=None, compare=False)

    @classmethod
    def build(
        cls,
        vertices: Iterable[tuple[str, VertexRole | str, Num]],
        edges: Iterable[tuple[str, str, str, EdgeMeasure | None]],
        **kwargs: Any,
    ) -> "MeasuredReebGraph":
        """Convenience constructor; a ``None`` measure means unit density."""
        vs = tuple(sorted((Vertex(i, VertexRole(r), f) for i, r, f in vertices), key=lambda v: v.id))
        fmap = {v.id: v.f for v in vs}
        es = []
        for eid, t, h, m in edges:
            if m is None:
                lo, hi = fmap[t], fmap[h]
                m = EdgeMeasure.uniform(lo, hi, Fraction(1) if isinstance(lo, Fraction) else 1.0)
            es.append(Edge(eid, t, h, m))
        return cls(vs, tuple(sorted(es, key=lambda e: e.id)), **kwargs)

    # -- lookups ----------------------------------------------------------
    @cached_property
    def _vmap(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _emap(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _incidence(self) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
        ins: dict[str, list[str]] = defaultdict(list)
        outs: dict[str, list[str]] = defaultdict(list)
        for e in self.edges:
            outs[e.tail].append(e.id)
            ins[e.head].append(e.id)
        return ins, outs

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: k for k, e in enumerate(self.edges)}

    def vertex(self, vid: str) -> Vertex:
        return self._vmap[vid]

    def edge(self, eid: str) -> Edge:
        return self._emap[eid]

    def in_edges(self, vid: str) -> list[str]:
        return self._incidence[0].get(vid, [])

    def out_edges(self, vid: str) -> list[str]:
        return self._incidence[1].get(vid, [])

    def f(self, vid: str) -> Num:
        return self._vmap[vid].f

    def edge_range(self, eid: str) -> tuple[Num, Num]:
        e = self._emap[eid]
        return self._vmap[e.tail].f, self._vmap[e.head].f

    def saddles(self) -> list[str]:
        return [v.id for v in self.vertices if v.role is VertexRole.SADDLE]

    def boundary_vertices(self) -> list[str]:
        return [v.id for v in self.vertices if v.role is VertexRole.BOUNDARY]

    @property
    def closed(self) -> bool:
        return not self.boundary_vertices()

    @cached_property
    def weights(self) -> dict[str, Num]:
        """``rho(e) = int_e f dmu`` for every edge."""
        return {e.id: e.measure.weight() for e in self.edges}

    @property
    def exact(self) -> bool:
        return all(isinstance(v.f, Fraction) for v in self.vertices) and all(e.measure.exact for e in self.edges)

    def with_measures(self, measures: Mapping[str, EdgeMeasure]) -> "MeasuredReebGraph":
        edges = tuple(Edge(e.id, e.tail, e.head, measures.get(e.id, e.measure)) for e in self.edges)
        return MeasuredReebGraph(
            self.vertices, edges, self.genus, self.boundary_components, self.height_tol, self.coordinates
        )

    def relabeled(self, vmap: Mapping[str, str], emap: Mapping[str, str]) -> "MeasuredReebGraph":
        vs = [(vmap[v.id], v.role, v.f) for v in self.vertices]
        es = [(emap[e.id], vmap[e.tail], vmap[e.head], e.measure) for e in self.edges]
        coords = None
        if self.coordinates:
            coords = tuple((emap[e], end) for e, end in self.coordinates)
        return MeasuredReebGraph.build(
            vs, es, genus=self.genus, boundary_components=self.boundary_components, coordinates=coords
        )

    # -- JSON -------------------------------------------------------------
    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "MeasuredReebGraph":
        try:
            verts = [(str(v["id"]), VertexRole(v["role"]), parse_num(v["f"])) for v in obj["vertices"]]
        except (KeyError, ValueError, TypeError) as exc:
            raise InvalidGraphError([Violation("schema", f"bad vertex record: {exc}")]) from exc
        fmap = {vid: f for vid, _, f in verts}
        edges = []
        problems = []
        for e in obj["edges"]:
            try:
                eid, t, h = str(e["id"]), str(e["tail"]), str(e["head"])
            except KeyError as exc:
                raise InvalidGraphError([Violation("schema", f"bad edge record: {exc}")]) from exc
            if t not in fmap or h not in fmap:
                problems.append(Violation("unknown vertex", f"edge refers to missing vertex {t if t not in fmap else h}", eid))
                continue
            try:
                m = EdgeMeasure.from_json(e.get("measure", {"kind": "poly_log", "poly": [1]}), fmap[t], fmap[h])
            except (MeasureError, KeyError, TypeError) as exc:
                problems.append(Violation("measure", str(exc), eid))
                continue
            edges.append((eid, t, h, m))
        if problems:
            raise InvalidGraphError(problems)
        surface = obj.get("surface") or {}
        coords = obj.get("coordinates")
        return cls.build(
            verts,
            edges,
            genus=surface.get("genus"),
            boundary_components=surface.get("boundary_components"),
            coordinates=tuple((str(c["edge"]), str(c.get("end", "tail"))) for c in coords) if coords else None,
        )

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "vertices": [{"id": v.id, "role": v.role.value, "f": dump_num(v.f)} for v in self.vertices],
            "edges": [
                {"id": e.id, "tail": e.tail, "head": e.head, "measure": e.measure.to_json()} for e in self.edges
            ],
        }
        if self.genus is not None or self.boundary_components is not None:
            out["surface"] = {"genus": self.genus, "boundary_components": self.boundary_components}
        if self.coordinates:
            out["coordinates"] = [{"edge": e, "end": end} for e, end in self.coordinates]
        return out

    @classmethod
    def load(cls, path: str) -> "MeasuredReebGraph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# -- validation ---------------------------------------------------------------

def validate_graph(g: MeasuredReebGraph, check_measures: bool = True) -> list[Violation]:
    """Every violated Reeb-graph axiom, with the offending id; empty means valid."""
    out: list[Violation] = []
    seen_v: set[str] = set()
    for v in g.vertices:
        if v.id in seen_v:
            out.append(Violation("duplicate id", "vertex id repeated", v.id))
        seen_v.add(v.id)
    seen_e: set[str] = set()
    for e in g.edges:
        if e.id in seen_e:
            out.append(Violation("duplicate id", "edge id repeated", e.id))
        seen_e.add(e.id)
        if e.tail not in seen_v or e.head not in seen_v:
            out.append(Violation("unknown vertex", "edge endpoint is not a vertex", e.id))
            continue
        if e.tail == e.head:
            out.append(Violation("self-loop", "edges must join distinct vertices", e.id))
            continue
        ft, fh = g.f(e.tail), g.f(e.head)
        if isinstance(ft, Fraction) and isinstance(fh, Fraction):
            bad = not ft < fh
        else:
            bad = not float(fh) - float(ft) > g.height_tol
        if bad:
            out.append(Violation("non-monotone edge", f"f(tail)={ft} is not below f(head)={fh}", e.id))
    if out:
        return out

    for v in g.vertices:
        n_in, n_out = len(g.in_edges(v.id)), len(g.out_edges(v.id))
        if v.role in (VertexRole.MIN, VertexRole.MAX, VertexRole.BOUNDARY):
            if n_in + n_out != 1:
                out.append(Violation("valence", f"{v.role.value} vertex must be 1-valent, has {n_in + n_out}", v.id))
            elif v.role is VertexRole.MIN and n_out != 1:
                out.append(Violation("in/out pattern", "Min must have one outgoing edge", v.id))
            elif v.role is VertexRole.MAX and n_in != 1:
                out.append(Violation("in/out pattern", "Max must have one incoming edge", v.id))
        elif v.role is VertexRole.SADDLE:
            if n_in + n_out != 3:
                out.append(Violation("valence", f"Saddle must be 3-valent, has {n_in + n_out}", v.id))
            elif (n_in, n_out) not in ((2, 1), (1, 2)):
                out.append(Violation("in/out pattern", f"Saddle has {n_in} in / {n_out} out", v.id))
        elif v.role is VertexRole.MARKER:
            if (n_in, n_out) != (1, 1):
                out.append(Violation("in/out pattern", "Marker must have one incoming and one outgoing edge", v.id))

    if g.vertices and not _connected(g):
        out.append(Violation("disconnected", "graph is not connected"))

    if check_measures:
        for e in g.edges:
            m = e.measure
            lo, hi = g.edge_range(e.id)
            if m.lo != lo or m.hi != hi:
                if abs(float(m.lo) - float(lo)) > 1e-9 or abs(float(m.hi) - float(hi)) > 1e-9:
                    out.append(Violation("measure range", f"measure on [{m.lo}, {m.hi}] but edge spans [{lo}, {hi}]", e.id))
                    continue
            for t in m.log_terms:
                if t.anchor == "external":
                    continue
                vid = e.tail if t.anchor == "tail" else e.head
                if g.vertex(vid).role is not VertexRole.SADDLE:
                    out.append(Violation("log term", f"log term anchored at non-saddle {vid}", e.id))
            try:
                if m.min_interior_density() <= 0:
                    out.append(Violation("density", "density is not positive on the edge interior", e.id))
            except FloatingPointError:
                out.append(Violation("density", "density could not be evaluated", e.id))

        if g.genus is not None or g.boundary_components is not None:
            b1 = len(g.edges) - len(g.vertices) + 1
            if g.genus is not None and g.genus != b1:
                out.append(Violation("genus", f"declared genus {g.genus} but b1 = {b1}"))
            k = len(g.boundary_vertices())
            if g.boundary_components is not None and g.boundary_components != k:
                out.append(Violation("boundary", f"declared {g.boundary_components} boundary components, graph has {k}"))
    return out


def _connected(g: MeasuredReebGraph) -> bool:
    adj: dict[str, list[str]] = defaultdict(list)
    for e in g.edges:
        adj[e.tail].append(e.head)
        adj[e.head].append(e.tail)
    start = g.vertices[0].id
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(g.vertices)


def require_valid(g: MeasuredReebGraph, check_measures: bool = False) -> None:
    problems = validate_graph(g, check_measures=check_measures)
    if problems:
        raise InvalidGraphError(problems)


def homology_dimensions(g: MeasuredReebGraph) -> tuple[int, int]:
    """``(b1, dim H1(graph, boundary vertices))``."""
    require_valid(g)
    b1 = len(g.edges) - len(g.vertices) + 1
    k = len(g.boundary_vertices())
    return b1, (b1 if k == 0 else b1 + k - 1)


def trunk_and_branches(g: MeasuredReebGraph, v: str) -> tuple[str, tuple[str, str]]:
    """The trunk (lone edge on the minority side) and the two branches."""
    if g.vertex(v).role is not VertexRole.SADDLE:
        raise ValueError(f"vertex {v} is not a saddle")
    ins, outs = g.in_edges(v), g.out_edges(v)
    if len(ins) == 2 and len(outs) == 1:
        return outs[0], (ins[0], ins[1])
    if len(ins) == 1 and len(outs) == 2:
        return ins[0], (outs[0], outs[1])
    raise InvalidGraphError([Violation("in/out pattern", f"Saddle has {len(ins)} in / {len(outs)} out", v)])


# -- refinement ---------------------------------------------------------------

class DegenerateZeroSetError(ValueError):
    pass


@dataclass(frozen=True)
class RefinedGraph:
    """A graph subdivided at ``f = 0`` and at zeros of a circulation function.

    ``parent`` maps every sub-edge to its original edge; ``head_limits``
    carries the circulation function onto the sub-edges when one was given.
    """

    graph: MeasuredReebGraph
    parent: dict[str, str]
    head_limits: dict[str, Num] | None
    markers: tuple[str, ...]

    def merged(self) -> MeasuredReebGraph:
        """Undo the subdivision (used to check round-tripping)."""
        children: dict[str, list[str]] = defaultdict(list)
        for sub, orig in self.parent.items():
            children[orig].append(sub)
        keep = [v for v in self.graph.vertices if v.role is not VertexRole.MARKER]
        edges = []
        for orig, subs in children.items():
            subs = sorted(subs, key=lambda s: self.graph.edge_range(s)[0])
            tail = self.graph.edge(subs[0]).tail
            head = self.graph.edge(subs[-1]).head
            pieces = []
            logs = {}
            for s in subs:
                m = self.graph.edge(s).measure
                pieces.extend(m.pieces)
                for t in m.log_terms:
                    logs[(t.at, t.coef)] = t
            lo, hi = self.graph.f(tail), self.graph.f(head)
            from .measures import LogTerm, _merge_pieces, _anchor_label

            lt = tuple(LogTerm(t.at, t.coef, _anchor_label(t.at, lo, hi)) for t in logs.values())
            m = EdgeMeasure(lo, hi, tuple(_merge_pieces(pieces)), lt, "piecewise")
            edges.append((orig, tail, head, m))
        return MeasuredReebGraph.build(
            [(v.id, v.role, v.f) for v in keep],
            edges,
            genus=self.graph.genus,
            boundary_components=self.graph.boundary_components,
        )


def _circ_profile(m: EdgeMeasure, tail_limit: Num):
    """c(f) = lambda^-(e) + rho([tail, f]) as a float function."""
    base = float(tail_limit)
    lo = m.lo

    def c(f: float) -> float:
        return base + float(m.weight(lo, f))

    return c


def refine_at_zeros(
    g: MeasuredReebGraph,
    c: "CirculationFunction | None" = None,
    zero_tol: float = 1e-12,
) -> RefinedGraph:
    """Insert 2-valent markers where ``f = 0`` or where ``c`` vanishes.

    Along an edge ``dc/df = f * density``, so ``c`` is monotone on each side
    of ``f = 0``: after cutting at ``f = 0`` every piece has at most one
    interior zero, which is bracketed by the endpoint values and located
    with Brent's method.  Values within ``zero_tol`` of zero at a piece's
    endpoint count as zero there, which makes refinement idempotent.
    """
    require_valid(g)
    verts = [(v.id, v.role, v.f) for v in g.vertices]
    edges = []
    parent: dict[str, str] = {}
    heads: dict[str, Num] | None = {} if c is not None else None
    markers: list[str] = []
    for e in g.edges:
        lo, hi = g.edge_range(e.id)
        cuts: list[Num] = []
        if lo < 0 < hi:
            cuts.append(0 * lo)
        if c is not None:
            prof = _circ_profile(e.measure, c.tail_limit(e.id))
            pts = [lo, *cuts, hi]
            for a, b in zip(pts[:-1], pts[1:]):
                ca, cb = prof(float(a)), prof(float(b))
                if abs(ca) <= zero_tol or abs(cb) <= zero_tol:
                    _check_not_flat(prof, a, b, zero_tol, e.id)
                    continue
                if (ca > 0) != (cb > 0):
                    root = optimize.brentq(prof, float(a), float(b), xtol=1e-15, rtol=4 * np.finfo(float).eps)
                    if float(a) < root < float(b):
                        cuts.append(root)
        cuts = sorted(set(cuts), key=float)
        pts = [lo, *cuts, hi]
        names = [e.tail]
        for k, x in enumerate(cuts):
            mid = f"{e.id}@{k}"
            verts.append((mid, VertexRole.MARKER, x))
            names.append(mid)
            markers.append(mid)
        names.append(e.head)
        tail_lim = c.tail_limit(e.id) if c is not None else None
        for k in range(len(pts) - 1):
            sub = e.id if not cuts else f"{e.id}#{k}"
            m = e.measure if not cuts else e.measure.restrict(pts[k], pts[k + 1])
            edges.append((sub, names[k], names[k + 1], m))
            parent[sub] = e.id
            if heads is not None:
                w = e.measure.weight(pts[0], pts[k + 1])
                heads[sub] = tail_lim + w
    rg = MeasuredReebGraph.build(verts, edges, genus=g.genus, boundary_components=g.boundary_components)
    return RefinedGraph(rg, parent, heads, tuple(markers))


def _check_not_flat(prof, a: Num, b: Num, tol: float, eid: str) -> None:
    xs = np.linspace(float(a), float(b), 9)[1:-1]
    if all(abs(prof(x)) <= tol for x in xs):
        raise DegenerateZeroSetError(f"circulation vanishes on a subinterval of edge {eid}")
