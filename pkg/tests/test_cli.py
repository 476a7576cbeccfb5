import json
import subprocess
import sys

import pytest

from reeb_steady.mesh import write_off
from reeb_steady.mesh.generators import octahedron, torus_grid

from .helpers import fixture, run_cli, run_cli_json


def test_torus_interval():
    code, rep = run_cli_json("check-steady", fixture("torus.json"))
    assert code == 0
    assert rep["verdict"] == "admits steady flow"
    assert rep["interval"] == {"open": ["-1", "0"]}


def test_weights_flag_makes_the_polytope_empty():
    code, rep = run_cli_json("check-steady", fixture("torus.json"), "--a", "-1,-4,2,3")
    assert code == 2 and rep["verdict"] == "empty polytope"


def test_weights_flag_length_is_checked():
    code, _, err = run_cli("check-steady", fixture("torus.json"), "--a", "1,2")
    assert code == 3 and "--a" in err


def test_point_checks():
    assert run_cli("check-steady", fixture("torus.json"), "--point", "-1/2")[0] == 0
    assert run_cli("check-steady", fixture("torus.json"), "--point", "1/2")[0] == 2


def test_disk_is_negative():
    code, rep = run_cli_json("check-steady", fixture("forced_disk.json"))
    assert code == 2 and rep["verdict"] == "no balanced region"


def test_segment_has_no_circulation():
    code, rep = run_cli_json("circulation-space", fixture("segment.json"))
    assert code == 2 and rep["status"] == "infeasible"


def test_invalid_inputs(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("validate", str(bad))[0] == 3
    flat = tmp_path / "flat.json"
    flat.write_text(json.dumps({
        "vertices": [{"id": "a", "role": "Min", "f": 1}, {"id": "b", "role": "Max", "f": 1}],
        "edges": [{"id": "e", "tail": "a", "head": "b"}],
    }))
    code, rep = run_cli_json("validate", str(flat))
    assert code == 3 and rep["violations"][0]["code"] == "non-monotone edge"
    assert run_cli("validate", str(tmp_path / "missing.json"))[0] == 3


def test_usage_errors():
    assert run_cli("frobnicate")[0] == 64
    assert run_cli()[0] == 64
    assert run_cli("validate")[0] == 64


@pytest.mark.parametrize(
    "argv",
    [
        ("check-steady", "torus.json"),
        ("polytope", "pretzel.json", "--vertices"),
        ("casimirs", "two_maxima.json"),
        ("certificate", "torus.json"),
        ("circulation-space", "pretzel.json"),
    ],
    ids=lambda a: a[0],
)
def test_exact_runs_are_byte_identical(argv):
    args = (argv[0], fixture(argv[1]), *argv[2:])
    first = run_cli(*args)
    assert first == run_cli(*args)
    assert first[0] == 0


def test_catalog_and_generate_feed_validate(tmp_path):
    for name in ("segment", "torus", "pretzel", "forced_disk"):
        code, out, _ = run_cli("catalog", name)
        p = tmp_path / f"{name}.json"
        p.write_text(out)
        assert run_cli("validate", str(p))[0] == 0, name
    code, out, _ = run_cli("generate", "--family", "closed", "--seed", "4")
    (tmp_path / "gen.json").write_text(out)
    assert code == 0 and run_cli("validate", str(tmp_path / "gen.json"))[0] == 0


def test_validate_report_can_be_fed_back(tmp_path):
    _, out, _ = run_cli("validate", fixture("torus.json"))
    (tmp_path / "report.json").write_text(out)
    assert run_cli("check-steady", str(tmp_path / "report.json"))[0] == 0


def test_polytope_vertices_of_the_pretzel():
    code, rep = run_cli_json("polytope", fixture("pretzel.json"), "--vertices")
    assert code == 0
    verts = {tuple(v) for v in rep["vrep"]["vertices"]}
    assert verts == {("-2", "0"), ("0", "-2"), ("-1", "0"), ("0", "-1")}
    assert rep["boundedness"] == {"bounded": True}


def test_casimirs_csv():
    code, out, _ = run_cli("casimirs", fixture("torus.json"), "--format", "csv", "--order", "3")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[0].split(",")[:2] == ["edge", "m0"]


def test_orbit_equiv_codes():
    torus = fixture("torus.json")
    assert run_cli("orbit-equiv", torus, torus)[0] == 3  # circulation not determined
    assert run_cli("orbit-equiv", torus, torus, "--point1", "-1/2", "--point2", "-1/2")[0] == 0
    code, rep = run_cli_json("orbit-equiv", torus, torus, "--point1", "-1/2", "--point2", "-1/3")
    assert code == 2 and rep["invariant"] == "circulation"
    assert run_cli("orbit-equiv", fixture("forced_disk.json"), fixture("forced_disk.json"))[0] == 0
    code, rep = run_cli_json("orbit-equiv", torus, fixture("pretzel.json"), "--point1", "-1/2", "--point2", "-1/2,-1/2")
    assert code == 2 and rep["status"] == "distinct"


def test_certificate_on_the_torus():
    code, rep = run_cli_json("certificate", fixture("torus.json"), "--point", "-1/2")
    assert code == 0 and rep["status"] == "certificate"
    assert rep["max_cycle_integral"] < 1e-12


def test_verify_triple_flags_and_file(tmp_path):
    code, rep = run_cli_json("verify-triple", "--chart", "cylinder", "--zeta", "0.3,1,0.2", "--c", "0.7", "--grid", "60", "--levels", "20")
    assert code == 0 and rep["ok"]
    spec = tmp_path / "t.json"
    spec.write_text(json.dumps({"chart": "hyperbolic", "zeta": [0, -1], "eps": -1, "c": -1.5}))
    assert run_cli("verify-triple", str(spec), "--grid", "60", "--levels", "20")[0] == 0
    spec.write_text(json.dumps({"chart": "hyperbolic", "zeta": [0, 1], "eps": 1, "c": -1.0}))
    assert run_cli("verify-triple", str(spec))[0] == 3


def test_reeb_extract_round_trip(tmp_path):
    write_off(torus_grid(20, 20), tmp_path / "t.off")
    graph = tmp_path / "g.json"
    code, rep = run_cli_json("reeb-extract", str(tmp_path / "t.off"), "--out", str(graph), "--diagnostics", str(tmp_path / "d.json"))
    assert code == 0 and rep["compatibility"]["ok"]
    assert rep["mesh"]["euler_characteristic"] == 0
    assert run_cli("validate", str(graph))[0] == 0
    assert len(json.loads((tmp_path / "d.json").read_text())["saddles"]) == 2
    code, space = run_cli_json("circulation-space", str(graph))
    assert code == 0 and space["dim"] == 1


def test_reeb_extract_declared_genus_mismatch(tmp_path):
    write_off(octahedron(), tmp_path / "o.off")
    code, rep = run_cli_json("reeb-extract", str(tmp_path / "o.off"), "--genus", "1")
    assert code == 2 and not rep["compatibility"]["ok"]
    (tmp_path / "bad.off").write_text("OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n")
    assert run_cli("reeb-extract", str(tmp_path / "bad.off"))[0] == 3


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "reeb_steady", "check-steady", fixture("forced_disk.json")], capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["verdict"] == "no balanced region"


def test_grey_zone_residual_exits_with_tolerance_code():
    code, _, err = run_cli("check-steady", fixture("torus.json"), "--a", "-3,-1,2,2.00000001", "--arith", "float")
    assert code == 4 and "tolerance" in err
