"""The steady polytope: sign constraints on saddle limits over the circulation space."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import _exact
from .circulation import AffineCirculationSpace
from .graph import MeasuredReebGraph, require_valid, trunk_and_branches
from .lp import maximize
from .numbers import Num, dump_num

MAX_VERTEX_DIM = 6
MAX_PATTERN_SADDLES = 20


@dataclass(frozen=True)
class Inequality:
    """``normal . t + offset < 0`` (or ``<= 0`` when not strict)."""

    normal: tuple[Num, ...]
    offset: Num
    strict: bool = True
    label: tuple[str, str] | None = None  # (saddle id, edge id)

    def value(self, t: Sequence[Num]) -> Num:
        return sum((a * b for a, b in zip(self.normal, t)), self.offset)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "normal": [dump_num(x) for x in self.normal],
            "offset": dump_num(self.offset),
            "strict": self.strict,
        }
        if self.label:
            out["saddle"], out["edge"] = self.label
        return out


@dataclass(frozen=True)
class HRep:
    dim: int
    inequalities: tuple[Inequality, ...]

    def contains(self, t: Sequence[Num], tol: float = 0.0) -> bool:
        for q in self.inequalities:
            v = q.value(t)
            if (q.strict and not v < -tol) or (not q.strict and v > tol):
                return False
        return True

    def closure(self) -> "HRep":
        return HRep(self.dim, tuple(Inequality(q.normal, q.offset, False, q.label) for q in self.inequalities))

    def to_json(self) -> dict[str, Any]:
        return {"dim": self.dim, "H": [q.to_json() for q in self.inequalities]}


@dataclass(frozen=True)
class VRep:
    vertices: tuple[tuple[Fraction, ...], ...]
    rays: tuple[tuple[Fraction, ...], ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "vertices": [[dump_num(x) for x in v] for v in self.vertices],
            "rays": [[dump_num(x) for x in r] for r in self.rays],
        }


@dataclass(frozen=True)
class Feasible:
    interior_point: tuple[Fraction, ...]
    slack: Fraction | float  # float("inf") when the slack is unbounded

    status = "feasible"

    def to_json(self) -> dict[str, Any]:
        slack = "inf" if self.slack == float("inf") else dump_num(self.slack)
        return {"status": "feasible", "interior_point": [dump_num(x) for x in self.interior_point], "slack": slack}


@dataclass(frozen=True)
class Empty:
    status = "empty"

    def to_json(self) -> dict[str, Any]:
        return {"status": "empty"}


@dataclass(frozen=True)
class Bounded:
    def to_json(self) -> dict[str, Any]:
        return {"bounded": True}


@dataclass(frozen=True)
class Unbounded:
    direction: tuple[Fraction, ...]

    def to_json(self) -> dict[str, Any]:
        return {"bounded": False, "direction": [dump_num(x) for x in self.direction]}


# -- building systems -------------------------------------------------------

def _saddle_inequalities(space: AffineCirculationSpace, v: str, sgn: int) -> list[Inequality]:
    g = space.graph
    trunk, branches = trunk_and_branches(g, v)
    out = []
    for eid in sorted((trunk, *branches)):
        normal, offset = space.limit_affine(eid, v)
        if sgn > 0:  # limit > 0  <=>  -limit < 0
            normal, offset = [-x for x in normal], -offset
        out.append(Inequality(tuple(normal), offset, True, (v, eid)))
    return out


def negative_system(g: MeasuredReebGraph, space: AffineCirculationSpace) -> HRep:
    """All saddle limits strictly negative, in the coordinates of ``space``."""
    require_valid(g)
    if not g.closed:
        raise ValueError("graph has boundary vertices; use balanced_regions for bordered surfaces")
    ineqs: list[Inequality] = []
    for v in sorted(g.saddles()):
        ineqs.extend(_saddle_inequalities(space, v, -1))
    return HRep(space.dim, tuple(ineqs))


# -- LP queries ---------------------------------------------------------------

def _reduced_rows(h: HRep) -> tuple[list[tuple[tuple[Fraction, ...], Fraction, bool]], Fraction | None, bool]:
    """Deduplicated non-constant rows, the slack cap from constant strict rows,
    and whether a constant row is violated outright."""
    rows: dict[tuple[tuple[Fraction, ...], bool], Fraction] = {}
    cap: Fraction | None = None
    for q in h.inequalities:
        normal = tuple(Fraction(x) for x in q.normal)
        off = Fraction(q.offset)
        if not any(normal):
            if off > 0 or (off == 0 and q.strict):
                return [], None, True
            if q.strict:
                cap = -off if cap is None else min(cap, -off)
            continue
        key = (normal, q.strict)
        # of two parallel rows with the same normal only the tighter one matters
        rows[key] = max(rows.get(key, off), off)
    return [(n, o, s) for (n, s), o in rows.items()], cap, False


def feasibility(h: HRep, float_tol: float = 1e-9) -> Feasible | Empty:
    """Maximize the common slack ``s`` of the strict inequalities.

    Feasible iff the optimum is positive; the maximizer is a center-like
    interior point.  Non-strict rows are kept as plain constraints.  With
    float data the optimum must clear ``float_tol`` instead of zero.
    """
    d = h.dim
    reduced, cap, violated = _reduced_rows(h)
    if violated:
        return Empty()
    rows, rhs = [], []
    for normal, off, strict in reduced:
        rows.append([*normal, 1 if strict else 0])
        rhs.append(-off)
    rows.append([0] * d + [-1])  # s >= 0
    rhs.append(0)
    if cap is not None:
        rows.append([0] * d + [1])
        rhs.append(cap)
    c = [0] * d + [1]
    res = maximize(c, rows, rhs)
    if res.status == "infeasible":
        return Empty()
    if res.status == "unbounded":
        capped = maximize(c, rows + [[0] * d + [1]], rhs + [1])
        assert capped.x is not None
        return Feasible(tuple(capped.x[:d]), float("inf"))
    assert res.x is not None and res.value is not None
    exact = all(isinstance(x, (Fraction, int)) for q in h.inequalities for x in (*q.normal, q.offset))
    threshold = 0 if exact else float_tol
    if res.value <= threshold and any(q.strict for q in h.inequalities):
        return Empty()
    return Feasible(tuple(res.x[:d]), res.value)


def _recession_rows(h: HRep) -> list[list[Fraction]]:
    return [[Fraction(x) for x in q.normal] for q in h.inequalities if any(q.normal)]


def boundedness(h: HRep) -> Bounded | Unbounded:
    """Bounded iff the recession cone ``{d : normal . d <= 0}`` is ``{0}``.

    By Stiemke's alternative the cone is trivial exactly when the normals
    span the space and some strictly positive combination of them
    vanishes; that is one LP.  Only when it fails are the per-coordinate
    LPs over the box ``[-1, 1]^d`` run, to produce a direction.
    """
    d = h.dim
    cone = sorted({tuple(r) for r in _recession_rows(h)})
    if d == 0:
        return Bounded()
    if cone and len(_exact.rref([list(r) for r in cone], d)[1]) == d:
        # y >= 1 componentwise with sum_i y_i n_i = 0
        m = len(cone)
        eq_rows, eq_rhs = [], []
        for k in range(d):
            row = [r[k] for r in cone]
            eq_rows += [row, [-x for x in row]]
            eq_rhs += [0, 0]
        lower = [[-1 if j == i else 0 for j in range(m)] for i in range(m)]
        res = maximize([0] * m, eq_rows + lower, eq_rhs + [-1] * m)
        if res.status == "optimal":
            return Bounded()
    box_rows, box_rhs = [], []
    for k in range(d):
        e = [0] * d
        e[k] = 1
        box_rows.append(e)
        box_rhs.append(1)
        box_rows.append([-x for x in e])
        box_rhs.append(1)
    rows = [list(r) for r in cone] + box_rows
    rhs = [0] * len(cone) + box_rhs
    for k in range(d):
        for s in (1, -1):
            c = [0] * d
            c[k] = s
            res = maximize(c, rows, rhs)
            if res.status == "optimal" and res.value is not None and res.value > 0:
                assert res.x is not None
                return Unbounded(_primitive(res.x))
    return Bounded()


def _primitive(v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    m = max(abs(x) for x in v)
    return tuple(Fraction(x) / m for x in v) if m else tuple(Fraction(x) for x in v)


def enumerate_vertices(h: HRep) -> VRep:
    """Vertices and extreme rays of the closure (exact, brute force for d <= 6)."""
    d = h.dim
    if d > MAX_VERTEX_DIM:
        raise ValueError(f"vertex enumeration is limited to dimension {MAX_VERTEX_DIM}; use feasibility/boundedness")
    if isinstance(feasibility(h), Empty):
        return VRep(())
    closed = h.closure()
    rows = [([Fraction(x) for x in q.normal], -Fraction(q.offset)) for q in closed.inequalities if any(q.normal)]

    def inside(t: Sequence[Fraction]) -> bool:
        return all(q.value(t) <= 0 for q in closed.inequalities)

    verts: set[tuple[Fraction, ...]] = set()
    if d == 0:
        verts.add(())
    for subset in itertools.combinations(range(len(rows)), d):
        a = [rows[i][0] for i in subset]
        b = [rows[i][1] for i in subset]
        t = _exact.solve_square(a, b)
        if t is not None and inside(t):
            verts.add(tuple(t))

    cone = [r for r, _ in rows]
    rays: set[tuple[Fraction, ...]] = set()
    if d >= 1:
        for subset in itertools.combinations(range(len(cone)), d - 1):
            sub = [cone[i] for i in subset]
            if sub:
                sol = _exact.solve_affine(sub, [Fraction(0)] * len(sub))
                if sol is None or len(sol[1]) != 1:
                    continue
                direction = sol[1][0]
            else:
                if d != 1:
                    continue
                direction = [Fraction(1)]
            for s in (1, -1):
                r = [s * x for x in direction]
                if all(sum(a * b for a, b in zip(n, r)) <= 0 for n in cone):
                    rays.add(_primitive(r))
    return VRep(tuple(sorted(verts)), tuple(sorted(rays)))


# -- sign patterns --------------------------------------------------------------

@dataclass(frozen=True)
class SignPattern:
    signs: tuple[tuple[str, int], ...]  # (saddle id, +1 / -1)

    def to_json(self) -> dict[str, str]:
        return {v: ("+" if s > 0 else "-") for v, s in self.signs}


@dataclass(frozen=True)
class Region:
    pattern: SignPattern
    hrep: HRep
    verdict: Feasible | Empty = field(compare=False)

    def to_json(self) -> dict[str, Any]:
        return {"pattern": self.pattern.to_json(), **self.hrep.to_json(), **self.verdict.to_json()}


def balanced_regions(g: MeasuredReebGraph, space: AffineCirculationSpace) -> list[Region]:
    """One region per assignment of a common sign to each saddle's limits."""
    require_valid(g)
    saddles = sorted(g.saddles())
    if len(saddles) > MAX_PATTERN_SADDLES:
        raise ValueError(f"{len(saddles)} saddles exceed the {MAX_PATTERN_SADDLES}-saddle enumeration cap")
    per_saddle = {v: {s: _saddle_inequalities(space, v, s) for s in (-1, 1)} for v in saddles}
    out = []
    for combo in itertools.product((-1, 1), repeat=len(saddles)):
        ineqs: list[Inequality] = []
        for v, s in zip(saddles, combo):
            ineqs.extend(per_saddle[v][s])
        h = HRep(space.dim, tuple(ineqs))
        out.append(Region(SignPattern(tuple(zip(saddles, combo))), h, feasibility(h)))
    return out


def circulation_lower_bounds(g: MeasuredReebGraph) -> dict[str, Num]:
    """``sum of rho(e')`` over edges ``e' <= e`` (``e'`` reaches ``e`` upward)."""
    require_valid(g)
    if not g.closed:
        raise ValueError("lower bounds are stated for closed graphs")
    below: dict[str, set[str]] = {}

    def ancestors(vid: str) -> set[str]:
        if vid not in below:
            acc = {vid}
            for e in g.in_edges(vid):
                acc |= ancestors(g.edge(e).tail)
            below[vid] = acc
        return below[vid]

    for v in sorted(g.vertices, key=lambda v: v.f):
        ancestors(v.id)
    out = {}
    for e in g.edges:
        anc = ancestors(e.tail)
        total: Num = g.weights[e.id]
        for other in g.edges:
            if other.id != e.id and other.head in anc:
                total += g.weights[other.id]
        out[e.id] = total
    return out

