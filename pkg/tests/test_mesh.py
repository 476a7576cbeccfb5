import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_steady import VertexRole
from reeb_steady.mesh import (
    MeshError,
    angular_oneform,
    build_mesh,
    classify_critical,
    compatibility_check,
    critical_counts,
    exact_oneform,
    extract_reeb,
    load_mesh,
    mesh_from_json,
    pushforward_circulation,
    write_off,
)
from reeb_steady.mesh.generators import (
    octahedron,
    polar_disk,
    pretzel_solid,
    subdivide,
    torus_angles,
    torus_grid,
    voxel_surface,
)

TETRA = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
TETRA_TRIS = [(0, 2, 1), (0, 1, 3), (1, 2, 3), (0, 3, 2)]


def error_code(*args, **kw):
    with pytest.raises(MeshError) as info:
        build_mesh(*args, **kw)
    return info.value.code


# -- loading -----------------------------------------------------------------------

def test_tetrahedron_is_a_sphere():
    m = build_mesh(TETRA, TETRA[:, 2] + 0.1 * TETRA[:, 0], TETRA_TRIS)
    assert m.euler_characteristic == 2 and m.genus == 0 and m.boundary_loops == ()


def test_load_errors_are_coded():
    # a fifth triangle on edge (0, 1) makes it non-manifold
    xyz = np.vstack([TETRA, [[0.5, -1, 0]]])
    assert error_code(xyz, xyz[:, 2], TETRA_TRIS + [(0, 1, 4)]) == "non-manifold edge"
    assert error_code(TETRA, TETRA[:, 2], TETRA_TRIS + [(0, 0, 1)]) == "zero-area triangle"
    flat = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    assert error_code(flat, flat[:, 0], [(0, 1, 2)]) == "zero-area triangle"
    two = np.vstack([TETRA, TETRA + 5])
    assert error_code(two, two[:, 2], TETRA_TRIS + [tuple(k + 4 for k in t) for t in TETRA_TRIS]) == "disconnected"
    assert error_code(TETRA, TETRA[:, 2], [(0, 1, 2), (0, 1, 5)]) == "schema"
    # one triangle with a sloped edge has a boundary that is not a level set
    tri = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    assert error_code(tri, tri[:, 0], [(0, 1, 2)]) == "boundary not level"


def test_moebius_strip_is_non_orientable():
    n = 6
    xyz = []
    for k in range(n):
        t = 2 * np.pi * k / n
        for s in (-0.3, 0.3):
            r = 1 + s * np.cos(t / 2)
            xyz.append([r * np.cos(t), r * np.sin(t), s * np.sin(t / 2)])
    xyz = np.array(xyz)
    tris = []
    for k in range(n):
        a, b = 2 * k, 2 * k + 1
        if k + 1 < n:
            c, d = 2 * k + 2, 2 * k + 3
        else:
            c, d = 1, 0  # the half twist
        tris += [(a, c, b), (b, c, d)]
    with pytest.raises(MeshError) as info:
        build_mesh(xyz, np.zeros(len(xyz)), tris)
    assert info.value.code == "non-orientable"


@given(seed=st.integers(0, 10_000))
def test_scrambled_orientations_are_repaired(seed):
    base = torus_grid(8, 8)
    rng = np.random.default_rng(seed)
    tris = base.triangles.copy()
    flip = rng.random(len(tris)) < 0.5
    tris[flip] = tris[flip][:, ::-1]
    m = build_mesh(base.xyz, base.F, tris)
    directed = np.concatenate([m.triangles[:, [0, 1]], m.triangles[:, [1, 2]], m.triangles[:, [2, 0]]])
    # oriented closed surface: every directed edge appears once, its reverse once
    assert len({tuple(d) for d in directed.tolist()}) == len(directed)
    assert {tuple(d) for d in directed[:, ::-1].tolist()} == {tuple(d) for d in directed.tolist()}


def test_off_and_json_round_trips(tmp_path):
    m = torus_grid(8, 8)
    write_off(m, tmp_path / "t.off")
    back = load_mesh(tmp_path / "t.off")
    assert np.array_equal(back.xyz, m.xyz) and np.array_equal(back.F, m.F)
    assert np.array_equal(back.triangles, m.triangles)
    (tmp_path / "t.json").write_text(json.dumps(m.to_json()))
    again = load_mesh(tmp_path / "t.json")
    assert np.array_equal(again.F, m.F) and again.ids == m.ids
    assert load_mesh(tmp_path / "t.json", genus=3).genus == 3


def test_off_without_field_column_uses_height(tmp_path):
    lines = ["OFF", "4 4 6"] + [" ".join(str(x) for x in p) for p in TETRA] + [f"3 {a} {b} {c}" for a, b, c in TETRA_TRIS]
    (tmp_path / "t.off").write_text("\n".join(lines))
    assert np.array_equal(load_mesh(tmp_path / "t.off").F, TETRA[:, 2])


def test_json_triangles_may_name_vertices():
    obj = {
        "vertices": [{"id": f"p{k}", "xyz": p.tolist(), "F": float(p[2] + 0.1 * p[0])} for k, p in enumerate(TETRA)],
        "triangles": [[f"p{k}" for k in t] for t in TETRA_TRIS],
    }
    assert mesh_from_json(obj).n_vertices == 4
    with pytest.raises(MeshError):
        mesh_from_json({"vertices": [{"xyz": [0, 0, 0]}], "triangles": []})


# -- critical points and extraction ------------------------------------------------

def test_octahedron_gives_a_segment():
    m = octahedron()
    assert critical_counts(m) == {"Min": 1, "Max": 1, "Saddle": 0}
    res = extract_reeb(m)
    g = res.graph
    assert [v.role for v in g.vertices] == [VertexRole.MAX, VertexRole.MIN]
    assert len(g.edges) == 1 and res.diagnostics == ()
    assert compatibility_check(g, m).ok


def test_torus_topology():
    m = torus_grid(20, 20)
    assert m.euler_characteristic == 0
    assert critical_counts(m) == {"Min": 1, "Max": 1, "Saddle": 2}
    g = extract_reeb(m).graph
    b1 = len(g.edges) - len(g.vertices) + 1
    assert b1 == 1 - m.euler_characteristic // 2 == g.genus


def test_pretzel_voxels_have_genus_two():
    m = voxel_surface(pretzel_solid())
    assert m.genus == 2
    res = extract_reeb(m)
    assert res.graph.genus == 2 and len(res.diagnostics) == 4
    assert compatibility_check(res.graph, m).ok


def test_disk_has_a_boundary_node():
    m = polar_disk(12, 24)
    g = extract_reeb(m).graph
    assert sorted(v.role.value for v in g.vertices) == ["Boundary", "Max", "Min", "Saddle"]
    assert compatibility_check(g, m).ok


def test_monkey_saddle_is_rejected():
    m = polar_disk(10, 24, lambda x, y: 1 + (1 - x * x - y * y) * (x**3 - 3 * x * y * y))
    with pytest.raises(MeshError) as info:
        classify_critical(m)
    assert info.value.code == "non-simple Morse"


def shape(res):
    g = res.graph
    return sorted(
        (g.vertex(e.tail).role.value, round(float(g.f(e.tail)), 12), g.vertex(e.head).role.value, round(float(g.f(e.head)), 12))
        for e in g.edges
    )


@pytest.mark.parametrize(
    "make",
    [octahedron, lambda: torus_grid(16, 16), lambda: polar_disk(12, 24), lambda: voxel_surface(pretzel_solid())],
    ids=["sphere", "torus", "disk", "pretzel"],
)
def test_graph_is_stable_under_two_subdivisions(make):
    m = make()
    shapes = []
    for _ in range(3):
        res = extract_reeb(m)
        shapes.append(shape(res))
        mass = sum(float(e.measure.mass()) for e in res.graph.edges)
        assert mass == pytest.approx(m.area, rel=1e-12)
        m = subdivide(m)
    assert shapes[0] == shapes[1] == shapes[2]


def test_edge_tables_are_monotone_and_sum_to_the_area():
    m = torus_grid(24, 24)
    res = extract_reeb(m)
    per_edge = np.zeros(len(res.edge_ids))
    for e in res.graph.edges:
        table = e.measure.to_json()["cumulative"]
        assert all(b >= a for a, b in zip(table, table[1:]))
        assert table[0] == 0
    for k, eid in enumerate(res.edge_ids):
        per_edge[k] = float(res.graph.edge(eid).measure.mass())
    assert per_edge.sum() == pytest.approx(m.area, rel=1e-12)


# -- compatibility ------------------------------------------------------------------

def test_compatibility_faults():
    m = torus_grid(16, 16)
    g = extract_reeb(m).graph
    sphere_claim = octahedron().with_declared_genus(1)
    report = compatibility_check(extract_reeb(octahedron()).graph, sphere_claim)
    assert not report.ok and [e.name for e in report.entries if not e.ok] == ["genus"]

    from reeb_steady import MeasuredReebGraph

    dropped = g.edges[0].id
    edges = [(e.id, e.tail, e.head, e.measure if e.id != dropped else None) for e in g.edges]
    h = MeasuredReebGraph.build([(v.id, v.role, v.f) for v in g.vertices], edges, genus=1)
    bad = compatibility_check(h, m)
    assert [e.name for e in bad.entries if not e.ok] == ["volume"]


# -- pushforward circulation ------------------------------------------------------

@pytest.fixture(scope="module")
def torus30():
    m = torus_grid(30, 30)
    return m, extract_reeb(m)


def test_exact_forms_push_forward_to_zero(torus30):
    m, res = torus30
    p = pushforward_circulation(m, exact_oneform(m, np.sin(3 * m.F) + m.xyz[:, 1]), res)
    assert max(np.abs(v).max() for v in p.values.values()) < 1e-12
    assert p.max_residual < 1e-12


def test_tube_angle_winds_once_on_middle_edges(torus30):
    m, res = torus30
    _, v = torus_angles(30, 30)
    p = pushforward_circulation(m, angular_oneform(m, v), res)
    g = res.graph
    middle = [e.id for e in g.edges if g.vertex(e.tail).role is VertexRole.SADDLE and g.vertex(e.head).role is VertexRole.SADDLE]
    assert len(middle) == 2
    assert sorted(round(float(np.mean(p.values[e])) / (2 * np.pi), 9) for e in middle) == [-1, 1]
    for e in g.edges:
        if e.id not in middle:
            assert np.abs(p.values[e.id]).max() < 1e-9
    assert p.max_residual < 1e-9


def test_oneform_mapping_must_be_antisymmetric():
    m = octahedron()
    form = {(int(u), int(w)): 1.0 for u, w in m.edges}
    form.update({(int(w), int(u)): 1.0 for u, w in m.edges[:1]})
    with pytest.raises(ValueError):
        pushforward_circulation(m, form, extract_reeb(m))


def test_saddle_log_fits_approach_two_minus_one_minus_one():
    # 2:-1:-1 up to the normalization of the trunk coefficient
    for n, tol in ((50, 0.1), (100, 0.05)):
        res = extract_reeb(torus_grid(n, n))
        assert len(res.diagnostics) == 2
        for d in res.diagnostics:
            r = d.fit.ratios
            assert r[0] == pytest.approx(2.0) and abs(r[1] + 1) < tol and abs(r[2] + 1) < tol
