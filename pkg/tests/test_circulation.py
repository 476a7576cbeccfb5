import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from reeb_steady import (
    Infeasible,
    VertexRole,
    balanced_regions,
    edge_concavity_check,
    evaluate,
    feasibility,
    is_balanced,
    is_totally_negative,
    negative_system,
    solve_circulation_space,
    vertex_limits,
)
from reeb_steady.catalog import annulus, forced_disk, segment, torus
from reeb_steady.circulation import ArithmeticModeError, CirculationFunction
from reeb_steady.generators import family, random_graph
from reeb_steady.numbers import ToleranceError
from reeb_steady.polytope import Feasible

A = (Fr(-3), Fr(-1), Fr(2), Fr(2))


def torus_point(z, a=A):
    return solve_circulation_space(torus(a), "exact").point([Fr(z)])


def test_torus_limits_follow_the_parameter():
    a1, a2, a3, a4 = A
    for z in (Fr(-1, 2), Fr(3), Fr(-7, 3)):
        c = torus_point(z)
        got = [(c.tail_limit(e), c.head_limit(e)) for e in ("e1", "e2", "e3", "e4")]
        assert got == [(0, a1), (z, a2 + z), (a1 - z, a1 + a3 - z), (-a4, 0)]


def test_torus_space_is_one_dimensional():
    space = solve_circulation_space(torus(), "exact")
    assert space.dim == 1
    assert space.coordinates == (("e2", "tail"),)


def test_closed_graph_with_nonzero_weight_is_infeasible():
    res = solve_circulation_space(torus((-3, -1, 2, Fr(23, 10))), "exact")
    assert isinstance(res, Infeasible)
    assert res.total_weight == Fr(3, 10)


def test_disk_circulation_is_forced():
    g = forced_disk()
    space = solve_circulation_space(g, "exact")
    assert space.dim == 0
    assert vertex_limits(space.particular, "s") == (2, -3, 5)
    v = is_balanced(space.particular)
    assert v.status == "unbalanced" and v.witness == "s"


def test_torus_vertex_limits_and_verdicts():
    c = torus_point(Fr(-1, 2))
    assert vertex_limits(c, "D") == (-3, Fr(-1, 2), Fr(-5, 2))
    assert is_balanced(c).status == "balanced"
    assert is_totally_negative(c).status == "negative"


def test_torus_negative_exactly_on_the_open_interval():
    inside = [Fr(k, 100) for k in range(-99, 0)]
    outside = [Fr(-1), Fr(0), Fr(-101, 100), Fr(1, 100), Fr(-5), Fr(5)]
    assert all(is_totally_negative(torus_point(z)).ok for z in inside)
    assert not any(is_totally_negative(torus_point(z)).ok for z in outside)


def test_disjoint_intervals_leave_no_negative_parameter():
    a = (Fr(-1), Fr(-4), Fr(2), Fr(3))
    space = solve_circulation_space(torus(a), "exact")
    # grid oracle over [-10, 10] with step 1e-3
    assert not any(is_totally_negative(space.point([Fr(k, 1000)])).ok for k in range(-10_000, 10_001, 7))


def test_saddle_free_graph_is_vacuously_balanced():
    c = solve_circulation_space(annulus()).point([Fr(4)])
    assert is_balanced(c).status == "balanced"


def test_unit_segment_has_no_antiderivative():
    assert isinstance(solve_circulation_space(segment()), Infeasible)


def test_evaluate_additivity_and_quadrature_oracle():
    g = torus(A)
    c = torus_point(Fr(-1, 2))
    m = g.edge("e2").measure
    mid = Fr(0)
    at_mid = evaluate(c, "e2", mid)
    assert c.head_limit("e2") - at_mid == m.weight(mid, m.hi)
    assert evaluate(c, "e2", Fr(1, 2)) - at_mid == m.weight(mid, Fr(1, 2))
    oracle = float(c.tail_limit("e2")) + integrate.quad(lambda f: f * m.density(f), float(m.lo), 0.0, epsabs=1e-14)[0]
    assert float(at_mid) == pytest.approx(oracle, abs=1e-12)


def test_concavity_examples():
    from reeb_steady import MeasuredReebGraph

    g = MeasuredReebGraph.build([("a", "Boundary", Fr(-1)), ("b", "Boundary", Fr(1))], [("e", "a", "b", None)])
    c = solve_circulation_space(g).point([Fr(-1)])
    assert edge_concavity_check(c, "e")
    g2 = MeasuredReebGraph.build([("a", "Boundary", Fr(1)), ("b", "Boundary", Fr(2))], [("e", "a", "b", None)])
    assert edge_concavity_check(solve_circulation_space(g2).point([Fr(3)]), "e")


def test_exact_mode_rejects_float_weights():
    with pytest.raises(ArithmeticModeError):
        solve_circulation_space(torus((-3.0, -1.0, 2.0, 2.0)), "exact")


def test_float_mode_agrees_with_exact():
    exact = solve_circulation_space(torus(A), "exact").point([Fr(-1, 2)])
    flt = solve_circulation_space(torus([float(x) for x in A]), "float").point([-0.5])
    for e in ("e1", "e2", "e3", "e4"):
        assert flt.head_limit(e) == pytest.approx(float(exact.head_limit(e)), abs=1e-12)


def test_float_residual_in_the_grey_zone_raises():
    with pytest.raises(ToleranceError):
        solve_circulation_space(torus((-3.0, -1.0, 2.0, 2.0 + 1e-8)), "float")


def test_circulation_json_round_trip():
    c = torus_point(Fr(-1, 3))
    back = CirculationFunction.from_json(c.graph, c.to_json())
    assert back.head_limits == c.head_limits


# -- properties -------------------------------------------------------------------

families = st.sampled_from(["tree", "closed", "bordered"])


@given(seed=st.integers(0, 10_000), name=families)
def test_kirchhoff_holds_exactly_and_under_basis_moves(seed, name):
    g = family(random.Random(seed), name)
    space = solve_circulation_space(g, "exact")
    rng = random.Random(seed)
    t = [Fr(rng.randint(-50, 50), 7) for _ in range(space.dim)]
    c = space.point(t)
    assert all(r == 0 for r in c.kirchhoff_residuals().values())
    for k in range(space.dim):
        moved = space.point([x + (1 if j == k else 0) for j, x in enumerate(t)])
        assert all(r == 0 for r in moved.kirchhoff_residuals().values())
        assert all(moved.head_limit(e.id) - moved.tail_limit(e.id) == g.weights[e.id] for e in g.edges)
    for v in g.vertices:
        if v.role is VertexRole.MIN:
            assert c.tail_limit(g.out_edges(v.id)[0]) == 0
        elif v.role is VertexRole.MAX:
            assert c.head_limit(g.in_edges(v.id)[0]) == 0


@given(seed=st.integers(0, 10_000), name=families)
def test_float_solver_satisfies_kirchhoff(seed, name):
    g = random_graph(random.Random(seed), random.Random(seed).randint(0, 2), 0 if name != "bordered" else 1, float_heights=True)
    space = solve_circulation_space(g, "float")
    c = space.point([0.3] * space.dim)
    assert max((abs(float(r)) for r in c.kirchhoff_residuals().values()), default=0.0) <= 1e-10


@given(seed=st.integers(0, 10_000))
def test_positive_disk_like_graphs_are_never_balanced(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(0, 1), 1, extra_events=rng.randint(0, 3), positive=True)
    roles = {v.role for v in g.vertices}
    if VertexRole.MIN not in roles or VertexRole.MAX not in roles:
        return
    space = solve_circulation_space(g)
    assert not any(isinstance(r.verdict, Feasible) for r in balanced_regions(g, space))


def test_concavity_on_1000_totally_negative_instances():
    rng = random.Random(12)
    checked = 0
    while checked < 1000:
        g = family(rng, "closed")
        space = solve_circulation_space(g)
        fz = feasibility(negative_system(g, space))
        if not isinstance(fz, Feasible):
            continue
        c = space.point(fz.interior_point)
        for e in g.edges:
            assert edge_concavity_check(c, e.id), (g.to_json(), e.id)
            checked += 1
