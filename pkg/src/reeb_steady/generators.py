"""Random measured Reeb graphs built by an upward sweep.

The sweep keeps a set of open strands (edges whose head is not placed
yet), grouped into components of the sublevel set by a union-find.  Each
event adds one vertex at the next integer height:

* birth: a Min (or a Boundary circle) opens a new strand and component;
* split: a 1-in/2-out saddle;
* merge: a 2-in/1-out saddle; merging two strands of one component closes
  a cycle (``b1 += 1``), merging different components joins them;
* death: a Max (or a Boundary circle) closes a strand.

Heights are shifted by a half-integer so that ``f = 0`` falls strictly
inside the range and never on a vertex.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .graph import MeasuredReebGraph, VertexRole
from .measures import EdgeMeasure, Piece

FAMILIES = ("tree", "closed", "bordered")


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[int, int] = {}

    def add(self, x: int) -> None:
        self.parent[x] = x

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


@dataclass
class _Strand:
    tail: str
    comp: int


def random_graph(
    rng: random.Random,
    genus: int,
    boundaries: int = 0,
    extra_events: int = 3,
    positive: bool = False,
    float_heights: bool = False,
) -> MeasuredReebGraph:
    """A valid measured Reeb graph with ``b1 = genus`` and ``boundaries`` Boundary vertices.

    Closed graphs (``boundaries == 0``) get densities rescaled so that
    ``rho(Gamma) = 0`` exactly.  With ``positive=True`` all heights are
    positive (no rescaling then, so only bordered graphs are allowed).
    """
    if positive and boundaries == 0:
        raise ValueError("a closed graph with all heights positive has no antiderivative")
    verts: list[tuple[str, VertexRole, int]] = []
    edges: list[tuple[str, str, str]] = []
    strands: list[_Strand] = []
    uf = _UnionFind()
    state = {"height": 0, "comp": 0, "cycles": 0, "bnd": boundaries, "births": 0}

    def new_vertex(role: VertexRole) -> str:
        vid = f"v{len(verts):02d}"
        verts.append((vid, role, state["height"]))
        state["height"] += 1
        return vid

    def close(strand: _Strand, head: str) -> None:
        edges.append((f"e{len(edges):02d}", strand.tail, head))

    def birth(role: VertexRole) -> None:
        v = new_vertex(role)
        state["comp"] += 1
        uf.add(state["comp"])
        strands.append(_Strand(v, state["comp"]))

    def split(i: int) -> None:
        s = strands.pop(i)
        v = new_vertex(VertexRole.SADDLE)
        close(s, v)
        strands.extend([_Strand(v, s.comp), _Strand(v, s.comp)])

    def merge(i: int, j: int) -> None:
        a, b = strands[i], strands[j]
        for k in sorted((i, j), reverse=True):
            strands.pop(k)
        v = new_vertex(VertexRole.SADDLE)
        close(a, v)
        close(b, v)
        if uf.find(a.comp) == uf.find(b.comp):
            state["cycles"] += 1
        else:
            uf.union(a.comp, b.comp)
        strands.append(_Strand(v, uf.find(a.comp)))

    def death(i: int, role: VertexRole) -> None:
        s = strands.pop(i)
        close(s, new_vertex(role))

    def comp_sizes() -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, s in enumerate(strands):
            out.setdefault(uf.find(s.comp), []).append(k)
        return out

    def use_boundary() -> bool:
        if state["bnd"] > 0 and rng.random() < 0.5:
            state["bnd"] -= 1
            return True
        return False

    birth(VertexRole.BOUNDARY if use_boundary() else VertexRole.MIN)
    for _ in range(extra_events):
        comps = comp_sizes()
        choice = rng.random()
        if choice < 0.3 and state["births"] < 2:
            state["births"] += 1
            birth(VertexRole.BOUNDARY if use_boundary() else VertexRole.MIN)
        elif choice < 0.6:
            split(rng.randrange(len(strands)))
        elif choice < 0.8 and len(comps) > 1:
            (c1, c2) = rng.sample(sorted(comps), 2)
            merge(rng.choice(comps[c1]), rng.choice(comps[c2]))
        else:
            big = [c for c, ks in comps.items() if len(ks) >= 2]
            if big:
                ks = comps[rng.choice(big)]
                death(rng.choice(ks), VertexRole.BOUNDARY if use_boundary() else VertexRole.MAX)
            else:
                split(rng.randrange(len(strands)))
    # close the required number of cycles
    while state["cycles"] < genus:
        comps = comp_sizes()
        big = [c for c, ks in comps.items() if len(ks) >= 2]
        if big and rng.random() < 0.7:
            i, j = rng.sample(comps[rng.choice(big)], 2)
            merge(i, j)
        else:
            split(rng.randrange(len(strands)))
    # join the components
    while len(comp_sizes()) > 1:
        comps = comp_sizes()
        c1, c2 = rng.sample(sorted(comps), 2)
        merge(rng.choice(comps[c1]), rng.choice(comps[c2]))
    # enough strands to absorb the remaining boundary circles as tops
    while len(strands) < state["bnd"]:
        split(rng.randrange(len(strands)))
    while strands:
        role = VertexRole.MAX
        if state["bnd"] > 0 and (len(strands) <= state["bnd"] or rng.random() < 0.5):
            state["bnd"] -= 1
            role = VertexRole.BOUNDARY
        death(rng.randrange(len(strands)), role)
    assert state["bnd"] == 0

    n = state["height"]
    if positive:
        shift = Fraction(-1)  # heights 1, 2, ...
    else:
        shift = Fraction(rng.randrange(n - 1)) + Fraction(1, 2)
    heights = {vid: Fraction(h) - shift for vid, _, h in verts}
    measures = {eid: _random_density(rng, heights[t], heights[h]) for eid, t, h in edges}
    if boundaries == 0:
        measures = _balance(measures)
    vlist = [(vid, role, float(heights[vid]) if float_heights else heights[vid]) for vid, role, _ in verts]
    if float_heights:
        measures = {k: _to_float(m) for k, m in measures.items()}
    return MeasuredReebGraph.build(
        vlist,
        [(eid, t, h, measures[eid]) for eid, t, h in edges],
        genus=genus,
        boundary_components=boundaries,
    )


def _random_density(rng: random.Random, lo: Fraction, hi: Fraction) -> EdgeMeasure:
    def val() -> Fraction:
        return Fraction(rng.randint(1, 9), rng.randint(1, 4))

    if lo < 0 < hi:
        z = Fraction(0)
        return EdgeMeasure(lo, hi, (Piece(lo, z, (val(),)), Piece(z, hi, (val(),))), (), "piecewise")
    return EdgeMeasure.uniform(lo, hi, val())


def _balance(measures: dict[str, EdgeMeasure]) -> dict[str, EdgeMeasure]:
    """Scale the density on ``f > 0`` so that the total weight vanishes."""
    neg = pos = Fraction(0)
    for m in measures.values():
        for p in m.pieces:
            w = p.poly[0] * (p.hi * p.hi - p.lo * p.lo) / 2
            if p.hi <= 0:
                neg += w
            else:
                pos += w
    lam = -neg / pos
    out = {}
    for k, m in measures.items():
        pieces = tuple(Piece(p.lo, p.hi, (p.poly[0] * lam,)) if p.lo >= 0 else p for p in m.pieces)
        out[k] = EdgeMeasure(m.lo, m.hi, pieces, (), m.kind)
    return out


def _to_float(m: EdgeMeasure) -> EdgeMeasure:
    pieces = tuple(Piece(float(p.lo), float(p.hi), tuple(float(x) for x in p.poly)) for p in m.pieces)
    return EdgeMeasure(float(m.lo), float(m.hi), pieces, (), m.kind)


def family(rng: random.Random, name: str) -> MeasuredReebGraph:
    """One graph from a named family: ``tree``, ``closed`` (genus 1-3), ``bordered`` (k = 1-3)."""
    if name == "tree":
        return random_graph(rng, 0, 0, extra_events=rng.randint(0, 5))
    if name == "closed":
        return random_graph(rng, rng.randint(1, 3), 0, extra_events=rng.randint(0, 4))
    if name == "bordered":
        return random_graph(rng, rng.randint(0, 2), rng.randint(1, 3), extra_events=rng.randint(0, 4))
    raise ValueError(f"unknown family {name!r}; choose from {FAMILIES}")


def graphs(seed: int, name: str, count: int) -> Iterator[MeasuredReebGraph]:
    rng = random.Random(seed)
    for _ in range(count):
        yield family(rng, name)
