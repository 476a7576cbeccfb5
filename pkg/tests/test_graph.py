import random
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_steady import (
    InvalidGraphError,
    MeasuredReebGraph,
    VertexRole,
    homology_dimensions,
    refine_at_zeros,
    solve_circulation_space,
    trunk_and_branches,
    validate_graph,
)
from reeb_steady.catalog import NAMED, forced_disk, segment, torus
from reeb_steady.generators import family, graphs


def codes(g):
    return {v.code for v in validate_graph(g)}


def test_segment_and_torus_are_valid():
    assert validate_graph(segment()) == []
    assert validate_graph(torus()) == []


def test_flat_edge_is_non_monotone():
    g = MeasuredReebGraph.build([("a", "Min", Fr(1)), ("b", "Max", Fr(1))], [("e", "a", "b", None)])
    assert "non-monotone edge" in codes(g)


def test_violations_name_the_axiom():
    bad_valence = MeasuredReebGraph.build(
        [("a", "Min", Fr(0)), ("s", "Saddle", Fr(1)), ("b", "Max", Fr(2))],
        [("e1", "a", "s", None), ("e2", "s", "b", None)],
    )
    assert "valence" in codes(bad_valence)
    loop = MeasuredReebGraph.build([("a", "Saddle", Fr(0))], [("e", "a", "a", None)])
    assert "self-loop" in codes(loop)
    split = MeasuredReebGraph.build(
        [("a", "Min", Fr(0)), ("b", "Max", Fr(1)), ("c", "Min", Fr(0)), ("d", "Max", Fr(1))],
        [("e", "a", "b", None), ("f", "c", "d", None)],
    )
    assert "disconnected" in codes(split)
    wrong_genus = MeasuredReebGraph.build([("a", "Min", Fr(0)), ("b", "Max", Fr(1))], [("e", "a", "b", None)], genus=1)
    assert "genus" in codes(wrong_genus)


def test_homology_dimensions_examples():
    assert homology_dimensions(segment()) == (0, 0)
    assert homology_dimensions(torus()) == (1, 1)
    assert homology_dimensions(forced_disk()) == (0, 0)


def test_trunk_and_branches():
    g = torus()
    assert trunk_and_branches(g, "D") == ("e1", ("e2", "e3"))  # 1 in / 2 out
    assert trunk_and_branches(g, "E") == ("e4", ("e2", "e3"))  # 2 in / 1 out
    with pytest.raises(ValueError):
        trunk_and_branches(g, "C")


def test_json_round_trip_for_named_graphs():
    for name, make in NAMED.items():
        g = make()
        back = MeasuredReebGraph.from_json(g.to_json())
        assert back.to_json() == g.to_json(), name
        assert back.weights == g.weights


def test_invalid_graph_error_carries_violations():
    g = MeasuredReebGraph.build([("a", "Min", Fr(1)), ("b", "Max", Fr(0))], [("e", "a", "b", None)])
    with pytest.raises(InvalidGraphError) as info:
        homology_dimensions(g)
    assert any(v.code == "non-monotone edge" for v in info.value.violations)


# -- refinement -------------------------------------------------------------------

def test_refinement_without_sign_changes_adds_nothing():
    g = MeasuredReebGraph.build([("a", "Boundary", Fr(1)), ("b", "Boundary", Fr(2))], [("e", "a", "b", None)])
    space = solve_circulation_space(g)
    c = space.point([Fr(-5)])
    r = refine_at_zeros(g, c)
    assert r.markers == ()
    assert r.graph.to_json() == g.to_json()


def test_refinement_marks_height_zero():
    g = MeasuredReebGraph.build([("a", "Min", Fr(-1)), ("b", "Max", Fr(1))], [("e", "a", "b", None)])
    r = refine_at_zeros(g)
    assert [r.graph.f(m) for m in r.markers] == [0]


def _dense_zeros(g, c, eid, n=10_000):
    # oracle: trapezoid cumulative of f * density, bracket sign changes
    m = g.edge(eid).measure
    lo, hi = float(m.lo), float(m.hi)
    f = np.linspace(lo, hi, n)
    integrand = f * m.density(f)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(f))])
    vals = float(c.tail_limit(eid)) + cum
    s = np.sign(vals)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    return [0.5 * (f[k] + f[k + 1]) for k in idx]


def test_torus_refinement_matches_dense_sampling():
    g = torus((-3, -1, 2, 2))
    c = solve_circulation_space(g, "exact").point([Fr(-1, 2)])
    r = refine_at_zeros(g, c)
    for e in g.edges:
        got = sorted(float(r.graph.f(m)) for m in r.markers if m.startswith(e.id + "@"))
        zeros = _dense_zeros(g, c, e.id)
        lo, hi = g.edge_range(e.id)
        heights = sorted(zeros + ([0.0] if lo < 0 < hi else []))
        assert len(got) == len(heights)
        assert np.allclose(got, heights, atol=1e-3)


def test_refinement_carries_limits_and_merges_back():
    g = torus((-3, -1, 2, 2))
    c = solve_circulation_space(g, "exact").point([Fr(-1, 2)])
    r = refine_at_zeros(g, c)
    for sub, orig in r.parent.items():
        if r.graph.edge(sub).head == g.edge(orig).head:
            assert float(r.head_limits[sub]) == pytest.approx(float(c.head_limit(orig)))
    merged = r.merged()
    assert {e.id for e in merged.edges} == {e.id for e in g.edges}
    for e in g.edges:
        assert merged.edge(e.id).measure.weight() == e.measure.weight()


# -- properties over generated families ------------------------------------------

@given(seed=st.integers(0, 10_000), name=st.sampled_from(["tree", "closed", "bordered"]))
def test_generated_graphs_are_valid_and_balanced_in_degree(seed, name):
    g = family(random.Random(seed), name)
    assert validate_graph(g) == []
    out_minus_in = sum(len(g.out_edges(v.id)) - len(g.in_edges(v.id)) for v in g.vertices)
    assert out_minus_in == 0
    assert len(g.edges) - len(g.vertices) + 1 >= 0


@given(seed=st.integers(0, 10_000), name=st.sampled_from(["tree", "closed"]))
def test_closed_surface_euler_census(seed, name):
    g = family(random.Random(seed), name)
    roles = [v.role for v in g.vertices]
    b1 = len(g.edges) - len(g.vertices) + 1
    n_min, n_max, n_sad = (roles.count(r) for r in (VertexRole.MIN, VertexRole.MAX, VertexRole.SADDLE))
    assert n_min + n_max - n_sad == 2 - 2 * b1


@given(seed=st.integers(0, 10_000))
def test_refinement_is_idempotent(seed):
    g = family(random.Random(seed), "closed")
    space = solve_circulation_space(g)
    rng = random.Random(seed + 1)
    c = space.point([Fr(rng.randint(-30, 30), 10) for _ in range(space.dim)])
    once = refine_at_zeros(g, c)
    rc = type(c)(once.graph, once.head_limits)
    twice = refine_at_zeros(once.graph, rc)
    assert twice.markers == ()


def test_homology_matches_circulation_nullspace_on_200_graphs():
    for k, g in enumerate(graphs(77, "bordered", 100)):
        assert homology_dimensions(g)[1] == solve_circulation_space(g).dim, k
    for k, g in enumerate(graphs(78, "closed", 100)):
        assert homology_dimensions(g)[1] == solve_circulation_space(g).dim, k
