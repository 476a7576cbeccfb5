"""Named measured Reeb graphs used by the tests, the CLI and the fixtures."""
from __future__ import annotations

from fractions import Fraction as Fr
from typing import Sequence

from .graph import MeasuredReebGraph, VertexRole
from .measures import EdgeMeasure, realize_weight
from .numbers import Num

MIN, MAX, SAD, BND = VertexRole.MIN, VertexRole.MAX, VertexRole.SADDLE, VertexRole.BOUNDARY


def segment() -> MeasuredReebGraph:
    """Sphere with one minimum and one maximum, unit density on ``[0, 1]``."""
    return MeasuredReebGraph.build([("lo", MIN, Fr(0)), ("hi", MAX, Fr(1))], [("e", "lo", "hi", None)], genus=0)


def torus(a: Sequence[Num] = (-3, -1, 2, 2)) -> MeasuredReebGraph:
    """Genus-one graph C -> D => E -> F whose edge weights are ``a``.

    The single coordinate is the tail limit of ``e2`` (the parameter ``z``
    of the double edge).
    """
    a = [Fr(x) if not isinstance(x, float) else x for x in a]
    heights = {"C": Fr(-2), "D": Fr(-1), "E": Fr(1), "F": Fr(2)}
    verts = [("C", MIN, heights["C"]), ("D", SAD, heights["D"]), ("E", SAD, heights["E"]), ("F", MAX, heights["F"])]
    ends = [("e1", "C", "D"), ("e2", "D", "E"), ("e3", "D", "E"), ("e4", "E", "F")]
    edges = [(eid, t, h, realize_weight(heights[t], heights[h], w)) for (eid, t, h), w in zip(ends, a)]
    return MeasuredReebGraph.build(verts, edges, genus=1, boundary_components=0, coordinates=(("e2", "tail"),))


def pretzel() -> MeasuredReebGraph:
    """Genus-two graph with edge weights ``(-1, -1, 0, 0, 0, 1, 1)``.

    Coordinates are the tail limits of the two edges G -> H, so the
    totally negative region is the trapezoid with corners (-2, 0), (-1, 0),
    (0, -1), (0, -2).
    """
    h = {"C": Fr(-3), "D": Fr(-2), "G": Fr(-1), "H": Fr(1), "E": Fr(2), "F": Fr(3)}
    verts = [("C", MIN, h["C"]), ("D", SAD, h["D"]), ("G", SAD, h["G"]), ("H", SAD, h["H"]), ("E", SAD, h["E"]), ("F", MAX, h["F"])]
    dens = {
        "CD": ("C", "D", Fr(2, 5)),
        "DG": ("D", "G", Fr(2, 3)),
        "GHa": ("G", "H", Fr(1)),
        "GHb": ("G", "H", Fr(1)),
        "DE": ("D", "E", Fr(1)),
        "HE": ("H", "E", Fr(2, 3)),
        "EF": ("E", "F", Fr(2, 5)),
    }
    edges = [(eid, t, hd, EdgeMeasure.uniform(h[t], h[hd], d)) for eid, (t, hd, d) in dens.items()]
    return MeasuredReebGraph.build(
        verts, edges, genus=2, boundary_components=0, coordinates=(("GHa", "tail"), ("GHb", "tail"))
    )


def forced_disk() -> MeasuredReebGraph:
    """Disk with interior min, saddle, max; every weight positive.

    The forced circulation has saddle limits ``(2, -3, 5)``.
    """
    verts = [("m", MIN, Fr(1)), ("s", SAD, Fr(2)), ("b", BND, Fr(3)), ("M", MAX, Fr(4))]
    edges = [
        ("e0_min", "m", "s", EdgeMeasure.uniform(Fr(1), Fr(2), Fr(4, 3))),
        ("e1_max", "s", "M", EdgeMeasure.uniform(Fr(2), Fr(4), Fr(1, 2))),
        ("e2_bnd", "s", "b", EdgeMeasure.uniform(Fr(2), Fr(3), Fr(2, 5))),
    ]
    return MeasuredReebGraph.build(verts, edges, genus=0, boundary_components=1)


def two_maxima() -> MeasuredReebGraph:
    """Sphere with one minimum, a saddle and two maxima sharing ``[-1, 2]``."""
    verts = [("A", MIN, Fr(-2)), ("S", SAD, Fr(-1)), ("B1", MAX, Fr(2)), ("B2", MAX, Fr(2))]
    edges = [
        ("trunk", "A", "S", EdgeMeasure.uniform(Fr(-2), Fr(-1), Fr(2))),
        ("left", "S", "B1", None),
        ("right", "S", "B2", None),
    ]
    return MeasuredReebGraph.build(verts, edges, genus=0, boundary_components=0)


def annulus() -> MeasuredReebGraph:
    """Annulus between two boundary circles; no saddles."""
    verts = [("in", BND, Fr(1)), ("out", BND, Fr(2))]
    return MeasuredReebGraph.build(verts, [("e", "in", "out", None)], genus=0, boundary_components=2)


NAMED = {
    "segment": segment,
    "torus": torus,
    "pretzel": pretzel,
    "forced_disk": forced_disk,
    "two_maxima": two_maxima,
    "annulus": annulus,
}
