"""Circulation functions: antiderivatives of the density ``f dmu`` on a Reeb graph.

A circulation function is stored by its head limits ``lambda+(e)``; tail
limits follow from Newton-Leibniz, ``lambda-(e) = lambda+(e) - rho(e)``.
The Kirchhoff rule at a non-boundary vertex ``v`` reads

    sum_{e -> v} lambda+(e) = sum_{e <- v} lambda-(e),

which is linear in the head limits with an integer coefficient matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np

from . import _exact
from .graph import InvalidGraphError, MeasuredReebGraph, Violation, VertexRole, require_valid, trunk_and_branches
from .numbers import FLOAT_SIGN_TOL, Num, ToleranceError, dump_num, parse_num, sign

RESIDUAL_ACCEPT = 1e-10
RESIDUAL_REJECT = 1e-6


class ArithmeticModeError(ValueError):
    pass


@dataclass(frozen=True)
class CirculationFunction:
    graph: MeasuredReebGraph
    head_limits: Mapping[str, Num]

    def head_limit(self, eid: str) -> Num:
        return self.head_limits[eid]

    def tail_limit(self, eid: str) -> Num:
        return self.head_limits[eid] - self.graph.weights[eid]

    def limit_at(self, eid: str, vid: str) -> Num:
        """Limit of ``c`` along edge ``eid`` as it approaches its endpoint ``vid``."""
        e = self.graph.edge(eid)
        if vid == e.head:
            return self.head_limit(eid)
        if vid == e.tail:
            return self.tail_limit(eid)
        raise ValueError(f"vertex {vid} is not an endpoint of edge {eid}")

    def kirchhoff_residuals(self) -> dict[str, Num]:
        g = self.graph
        out = {}
        for v in g.vertices:
            if v.role is VertexRole.BOUNDARY:
                continue
            inflow = sum((self.head_limit(e) for e in g.in_edges(v.id)), Fraction(0))
            outflow = sum((self.tail_limit(e) for e in g.out_edges(v.id)), Fraction(0))
            out[v.id] = inflow - outflow
        return out

    def to_json(self) -> dict[str, Any]:
        return {"head_limits": {e.id: dump_num(self.head_limits[e.id]) for e in self.graph.edges}}

    @classmethod
    def from_json(cls, g: MeasuredReebGraph, obj: Mapping[str, Any]) -> "CirculationFunction":
        raw = obj["head_limits"]
        missing = [e.id for e in g.edges if e.id not in raw]
        if missing:
            raise InvalidGraphError([Violation("circulation", "missing head limit", m) for m in missing])
        return cls(g, {e.id: parse_num(raw[e.id]) for e in g.edges})


@dataclass(frozen=True)
class Infeasible:
    """No antiderivative exists (closed graph with nonzero total weight)."""

    total_weight: Num
    residual: float = 0.0

    def to_json(self) -> dict[str, Any]:
        return {"status": "infeasible", "total_weight": dump_num(self.total_weight)}


@dataclass(frozen=True)
class AffineCirculationSpace:
    """``particular + sum_i t_i * basis[i]``.

    ``coordinates[i]`` names the limit that equals ``t_i``: a pair
    ``(edge id, "tail" | "head")``.  The solver picks the tail limits of
    the free (spanning-tree complement) edges; :meth:`reparametrize` moves
    to any other set of limits that determines the point.
    """

    graph: MeasuredReebGraph
    particular: CirculationFunction
    basis: tuple[Mapping[str, Num], ...]
    coordinates: tuple[tuple[str, str], ...]
    exact: bool = True
    free_edges: tuple[str, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def point(self, t: Sequence[Num]) -> CirculationFunction:
        if len(t) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(t)}")
        heads = dict(self.particular.head_limits)
        for ti, delta in zip(t, self.basis):
            for eid, d in delta.items():
                if d:
                    heads[eid] = heads[eid] + ti * d
        return CirculationFunction(self.graph, heads)

    def limit_affine(self, eid: str, vid: str) -> tuple[list[Num], Num]:
        """``(normal, offset)`` with ``limit(eid at vid) = normal . t + offset``."""
        offset = self.particular.limit_at(eid, vid)
        return [delta.get(eid, 0) for delta in self.basis], offset

    def reparametrize(self, coords: Sequence[tuple[str, str]]) -> "AffineCirculationSpace":
        """Same affine space, new coordinates ``u_i`` = the named limits."""
        if len(coords) != self.dim:
            raise ValueError(f"need {self.dim} coordinate limits, got {len(coords)}")
        rows, offs = [], []
        for eid, end in coords:
            if end not in ("tail", "head"):
                raise ValueError(f"coordinate end must be 'tail' or 'head', got {end!r}")
            e = self.graph.edge(eid)
            normal, off = self.limit_affine(eid, e.tail if end == "tail" else e.head)
            rows.append(normal)
            offs.append(off)
        # u = A t + b  =>  t = A^{-1}(u - b)
        if self.exact:
            inv = _exact.inverse(rows)
            if inv is None:
                raise ValueError("chosen limits do not determine a point of the space")
        else:
            a = np.array(rows, dtype=float)
            if np.linalg.matrix_rank(a) < self.dim:
                raise ValueError("chosen limits do not determine a point of the space")
            inv = np.linalg.inv(a).tolist()
        d = self.dim
        t0 = [-sum(inv[i][j] * offs[j] for j in range(d)) for i in range(d)]
        base = self.point(t0)
        new_basis = []
        for j in range(d):
            delta = {}
            for e in self.graph.edges:
                delta[e.id] = sum(inv[i][j] * self.basis[i].get(e.id, 0) for i in range(d))
            new_basis.append(delta)
        return AffineCirculationSpace(
            self.graph, base, tuple(new_basis), tuple(coords), self.exact, self.free_edges
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "coordinates": [{"edge": e, "end": end} for e, end in self.coordinates],
            "particular": self.particular.to_json(),
            "basis": [{e.id: dump_num(delta.get(e.id, 0)) for e in self.graph.edges} for delta in self.basis],
        }


def _kirchhoff_system(g: MeasuredReebGraph) -> tuple[list[list[int]], list[Num]]:
    idx = g.edge_index
    rows, rhs = [], []
    for v in g.vertices:
        if v.role is VertexRole.BOUNDARY:
            continue
        row = [0] * len(g.edges)
        b: Num = Fraction(0)
        for e in g.in_edges(v.id):
            row[idx[e]] += 1
        for e in g.out_edges(v.id):
            row[idx[e]] -= 1
            b -= g.weights[e]
        rows.append(row)
        rhs.append(b)
    return rows, rhs


def _resolve_mode(g: MeasuredReebGraph, arith: str) -> bool:
    exact_weights = all(isinstance(w, Fraction) for w in g.weights.values())
    if arith == "exact":
        if not exact_weights:
            raise ArithmeticModeError("exact arithmetic requested but some edge weights are not rational")
        return True
    if arith == "float":
        return False
    if arith != "auto":
        raise ValueError(f"unknown arithmetic mode {arith!r}")
    return exact_weights


def solve_circulation_space(g: MeasuredReebGraph, arith: str = "auto") -> AffineCirculationSpace | Infeasible:
    """Particular antiderivative plus a basis of the homogeneous solutions.

    The homogeneous part only depends on the integer incidence pattern, so
    free edges and basis vectors are always computed exactly.  The
    particular solution is exact for rational weights; in float mode it is
    a least-squares solution whose residual decides feasibility
    (``< 1e-10`` accept, ``> 1e-6`` infeasible, otherwise
    :class:`ToleranceError`).
    """
    require_valid(g)
    exact = _resolve_mode(g, arith)
    rows, rhs = _kirchhoff_system(g)
    n = len(g.edges)
    ids = [e.id for e in g.edges]
    total_weight = sum(g.weights.values(), Fraction(0))

    zero_rhs = [Fraction(0)] * len(rows)
    homog = _exact.solve_affine(rows, zero_rhs) if rows else ([Fraction(0)] * n, _identity(n), list(range(n)))
    assert homog is not None
    _, null, free = homog

    if exact:
        sol = _exact.solve_affine(rows, rhs) if rows else ([Fraction(0)] * n, [], [])
        if sol is None:
            return Infeasible(total_weight)
        x = list(sol[0])
    else:
        a = np.array(rows, dtype=float).reshape(len(rows), n)
        b = np.array([float(v) for v in rhs])
        x0 = np.linalg.lstsq(a, b, rcond=None)[0] if rows else np.zeros(n)
        scale = max(1.0, float(np.max(np.abs(b)))) if rows else 1.0
        resid = float(np.max(np.abs(a @ x0 - b))) / scale if rows else 0.0
        if resid > RESIDUAL_REJECT:
            return Infeasible(float(total_weight), resid)
        if resid > RESIDUAL_ACCEPT:
            raise ToleranceError("Kirchhoff system residual between accept and reject thresholds", resid)
        x = [float(v) for v in x0]

    # shift so that the coordinates are the tail limits of the free edges
    for j, col in enumerate(free):
        target = g.weights[ids[col]]
        shift = target - x[col]
        if shift:
            x = [xi + shift * ni for xi, ni in zip(x, null[j])]
    conv = (lambda v: v) if exact else float
    particular = CirculationFunction(g, {ids[k]: conv(x[k]) for k in range(n)})
    basis = tuple({ids[k]: conv(vec[k]) for k in range(n)} for vec in null)
    free_ids = tuple(ids[c] for c in free)
    space = AffineCirculationSpace(g, particular, basis, tuple((e, "tail") for e in free_ids), exact, free_ids)
    if g.coordinates and len(g.coordinates) == space.dim:
        space = space.reparametrize(g.coordinates)
    return space


def _identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


# -- evaluation -----------------------------------------------------------------

def evaluate(c: CirculationFunction, eid: str, f0: Num) -> Num:
    """``c`` at the interior point of ``eid`` with height ``f0``."""
    lo, hi = c.graph.edge_range(eid)
    if not lo < f0 < hi:
        raise ValueError(f"height {f0} outside the open range ({lo}, {hi}) of edge {eid}")
    return c.head_limit(eid) - c.graph.edge(eid).measure.weight(f0, hi)


def vertex_limits(c: CirculationFunction, v: str) -> tuple[Num, Num, Num]:
    """``(trunk, branch, branch)`` limits of ``c`` at saddle ``v``."""
    trunk, (b1, b2) = trunk_and_branches(c.graph, v)
    return c.limit_at(trunk, v), c.limit_at(b1, v), c.limit_at(b2, v)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a sign test over all saddles.

    ``status`` is one of ``"balanced"``, ``"unbalanced"``, ``"negative"``,
    ``"violation"`` or ``"indeterminate"``; ``witness`` names a saddle whose
    limits decide (or fail to decide) the answer.
    """

    status: str
    witness: str | None = None
    limits: tuple[Num, Num, Num] | None = None

    @property
    def ok(self) -> bool | None:
        if self.status == "indeterminate":
            return None
        return self.status in ("balanced", "negative")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
            out["limits"] = [dump_num(x) for x in self.limits or ()]
        return out


def is_balanced(c: CirculationFunction, tol: float = FLOAT_SIGN_TOL) -> Verdict:
    undecided: Verdict | None = None
    for v in c.graph.saddles():
        lims = vertex_limits(c, v)
        signs = [sign(x, tol) for x in lims]
        if any(s == 0 for s in signs) or (1 in signs and -1 in signs):
            return Verdict("unbalanced", v, lims)
        if None in signs and undecided is None:
            undecided = Verdict("indeterminate", v, lims)
    return undecided or Verdict("balanced")


def is_totally_negative(c: CirculationFunction, tol: float = FLOAT_SIGN_TOL) -> Verdict:
    if not c.graph.closed:
        raise ValueError("total negativity is the criterion for closed surfaces; graph has boundary vertices")
    undecided: Verdict | None = None
    for v in c.graph.saddles():
        lims = vertex_limits(c, v)
        signs = [sign(x, tol) for x in lims]
        if any(s is not None and s >= 0 for s in signs):
            return Verdict("violation", v, lims)
        if None in signs and undecided is None:
            undecided = Verdict("indeterminate", v, lims)
    return undecided or Verdict("negative")


def edge_profile(c: CirculationFunction, eid: str, samples: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Heights and values of ``c`` at ``samples`` points spanning the closed edge."""
    m = c.graph.edge(eid).measure
    lo, hi = float(m.lo), float(m.hi)
    fs = np.linspace(lo, hi, samples)
    base = float(c.tail_limit(eid))
    vals = np.array([base + float(m.weight(m.lo, x)) if x > lo else base for x in fs])
    vals[-1] = float(c.head_limit(eid))
    return fs, vals


def edge_concavity_check(c: CirculationFunction, eid: str, samples: int = 100, tol: float = 1e-12) -> bool:
    """Shape test for ``c`` along one edge.

    ``dc/df = f * density`` is negative below ``f = 0`` and positive above,
    so along the edge ``c`` first falls and then rises: at most one interior
    turning point, which is a minimum, and no sample exceeds the larger
    endpoint limit.  Together with nonpositive endpoint limits this is what
    forces ``c < 0`` inside an edge of a totally negative function.
    """
    _, vals = edge_profile(c, eid, samples)
    d = np.diff(vals)
    scale = tol * max(1.0, float(np.max(np.abs(vals))))
    s = np.sign(np.where(np.abs(d) <= scale, 0.0, d))
    s = s[s != 0]
    changes = int(np.count_nonzero(np.diff(s)))
    if changes > 1 or (changes == 1 and s[0] > 0):
        return False
    return bool(np.all(vals <= max(vals[0], vals[-1]) + scale))


def unique_circulation(g: MeasuredReebGraph, arith: str = "auto") -> CirculationFunction:
    """The circulation function of a graph whose antiderivative is forced."""
    space = solve_circulation_space(g, arith)
    if isinstance(space, Infeasible):
        raise ValueError(f"graph admits no antiderivative (total weight {space.total_weight})")
    if space.dim:
        raise ValueError(f"circulation space has dimension {space.dim}; a circulation function must be supplied")
    return space.particular
