"""Generalized enstrophies and orbit comparison."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .circulation import CirculationFunction, unique_circulation
from .graph import MeasuredReebGraph, require_valid, trunk_and_branches
from .measures import MeasureError
from .numbers import Num, dump_num

DEFAULT_ORDER = 10
DEFAULT_REL_TOL = 1e-9
MAX_SEARCH_EDGES = 64


@dataclass(frozen=True)
class MomentTable:
    order: int
    rows: dict[str, tuple[Num, ...]]
    total: tuple[Num, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "edges": {e: [dump_num(x) for x in row] for e, row in sorted(self.rows.items())},
            "total": [dump_num(x) for x in self.total],
        }

    def to_csv(self) -> str:
        header = "edge," + ",".join(f"m{i}" for i in range(self.order + 1))
        lines = [header]
        for e, row in sorted(self.rows.items()):
            lines.append(e + "," + ",".join(str(dump_num(x)) for x in row))
        lines.append("total," + ",".join(str(dump_num(x)) for x in self.total))
        return "\n".join(lines) + "\n"


def moment_table(g: MeasuredReebGraph, order: int = DEFAULT_ORDER) -> MomentTable:
    if order < 0:
        raise ValueError("moment order must be nonnegative")
    rows = {e.id: tuple(e.measure.integrate(i) for i in range(order + 1)) for e in g.edges}
    total = tuple(sum((r[i] for r in rows.values()), Fraction(0)) for i in range(order + 1))
    return MomentTable(order, rows, total)


def _close(a: Num, b: Num, tol: float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= tol * max(1.0, abs(float(a)), abs(float(b)))


@dataclass(frozen=True)
class Equivalent:
    vertex_map: dict[str, str]
    edge_map: dict[str, str]

    def to_json(self) -> dict[str, Any]:
        return {"status": "equivalent", "vertex_map": dict(sorted(self.vertex_map.items())), "edge_map": dict(sorted(self.edge_map.items()))}


@dataclass(frozen=True)
class Distinct:
    """``invariant`` names what separated the graphs; ``detail`` says where."""

    invariant: str
    detail: dict[str, Any]

    def to_json(self) -> dict[str, Any]:
        return {"status": "distinct", "invariant": self.invariant, **self.detail}


def _forced_circulation(g: MeasuredReebGraph, c: CirculationFunction | None) -> CirculationFunction:
    if c is not None:
        return c
    return unique_circulation(g)


def orbit_equivalent(
    g1: MeasuredReebGraph,
    g2: MeasuredReebGraph,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_REL_TOL,
    c1: CirculationFunction | None = None,
    c2: CirculationFunction | None = None,
) -> Equivalent | Distinct:
    """Search for a height-preserving graph isomorphism matching all Casimirs.

    Equivalence is up to moment order ``order``.  When no isomorphism
    survives, the reported invariant is the one that failed at the deepest
    point of the search (the closest near-match).
    """
    require_valid(g1)
    require_valid(g2)
    if max(len(g1.edges), len(g2.edges)) > MAX_SEARCH_EDGES:
        raise ValueError(f"isomorphism search is limited to {MAX_SEARCH_EDGES} edges")
    c1 = _forced_circulation(g1, c1)
    c2 = _forced_circulation(g2, c2)

    for label, n1, n2 in (("vertex count", len(g1.vertices), len(g2.vertices)), ("edge count", len(g1.edges), len(g2.edges))):
        if n1 != n2:
            return Distinct(label, {"values": [n1, n2]})
    roles1 = sorted(v.role.value for v in g1.vertices)
    roles2 = sorted(v.role.value for v in g2.vertices)
    if roles1 != roles2:
        return Distinct("vertex roles", {"values": [roles1, roles2]})

    t1, t2 = moment_table(g1, order), moment_table(g2, order)
    for i in range(order + 1):
        if not _close(t1.total[i], t2.total[i], tol):
            return Distinct("total moment", {"order": i, "values": [dump_num(t1.total[i]), dump_num(t2.total[i])]})

    edges1 = sorted(g1.edges, key=lambda e: (float(g1.f(e.tail)), float(g1.f(e.head)), e.id))
    vmap: dict[str, str] = {}
    used_v: set[str] = set()
    emap: dict[str, str] = {}
    used_e: set[str] = set()
    deepest: list[Any] = [-1, Distinct("structure", {"message": "no edge correspondence"})]

    def fail(depth: int, d: Distinct) -> None:
        if depth > deepest[0]:
            deepest[0], deepest[1] = depth, d

    def bind(a: str, b: str, added: list[str]) -> bool:
        if a in vmap:
            return vmap[a] == b
        if b in used_v:
            return False
        va, vb = g1.vertex(a), g2.vertex(b)
        if va.role is not vb.role or not _close(va.f, vb.f, tol):
            return False
        vmap[a] = b
        used_v.add(b)
        added.append(a)
        return True

    def check_edge(depth: int, e1, e2) -> bool:
        r1, r2 = t1.rows[e1.id], t2.rows[e2.id]
        for i in range(order + 1):
            if not _close(r1[i], r2[i], tol):
                fail(depth, Distinct("edge moment", {"order": i, "edge": e1.id, "candidate": e2.id, "values": [dump_num(r1[i]), dump_num(r2[i])]}))
                return False
        h1, h2 = c1.head_limit(e1.id), c2.head_limit(e2.id)
        if not _close(h1, h2, tol):
            fail(depth, Distinct("circulation", {"edge": e1.id, "candidate": e2.id, "values": [dump_num(h1), dump_num(h2)]}))
            return False
        return True

    def search(k: int) -> bool:
        if k == len(edges1):
            return True
        e1 = edges1[k]
        for e2 in g2.edges:
            if e2.id in used_e:
                continue
            added: list[str] = []
            if bind(e1.tail, e2.tail, added) and bind(e1.head, e2.head, added):
                if check_edge(k, e1, e2):
                    emap[e1.id] = e2.id
                    used_e.add(e2.id)
                    if search(k + 1):
                        return True
                    del emap[e1.id]
                    used_e.discard(e2.id)
            else:
                fail(k, Distinct("structure", {"edge": e1.id, "candidate": e2.id, "message": "endpoint roles or heights differ"}))
            for a in added:
                used_v.discard(vmap.pop(a))
        return False

    if search(0):
        return Equivalent(dict(vmap), dict(emap))
    return deepest[1]


# -- moving density between branches -------------------------------------------

def _poly_mul(p: Sequence[Num], q: Sequence[Num]) -> list[Num]:
    out: list[Num] = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def bump_polynomial(a: Num, b: Num, scale: Num = Fraction(1, 10)) -> list[Num]:
    """Coefficients of ``scale * (f - a)^2 (b - f)^2`` (lowest degree first)."""
    sq = _poly_mul([-a, 1], [-a, 1])
    sq2 = _poly_mul([b, -1], [b, -1])
    return [scale * x for x in _poly_mul(sq, sq2)]


def move_density_between_branches(
    g: MeasuredReebGraph,
    saddle: str,
    bump: Sequence[Num],
    a: Num,
    b: Num,
    samples: int = 1000,
) -> MeasuredReebGraph:
    """Add ``bump`` on ``[a, b]`` to the first branch and remove it from the second.

    Total moments are unchanged exactly, per-edge moments shift by
    ``+-int f^i bump``.
    """
    _, (b1, b2) = trunk_and_branches(g, saddle)
    if not any(bump):
        return g
    m1, m2 = g.edge(b1).measure, g.edge(b2).measure
    neg = [-x for x in bump]
    try:
        n1 = m1.add_density(bump, a, b)
        n2 = m2.add_density(neg, a, b)
    except MeasureError as exc:
        raise MeasureError(f"both branches must cover [{a}, {b}]: {exc}") from exc
    xs = float(a) + (float(b) - float(a)) * (np.arange(samples) + 0.5) / samples
    for eid, m in ((b1, n1), (b2, n2)):
        dens = m.density(xs)
        bad = int(np.argmin(dens))
        if dens[bad] <= 0:
            raise MeasureError(f"density on edge {eid} becomes non-positive at f = {xs[bad]:.6g}")
    return g.with_measures({b1: n1, b2: n2})
