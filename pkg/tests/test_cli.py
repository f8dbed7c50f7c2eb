import json
import subprocess
import sys

import pytest

from chipgog.cli import main
from chipgog.fixtures import k4_graph
from chipgog.io import parse_graph, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    assert set(data) == {"command", "inputs", "results", "checks"}
    for c in data["checks"]:
        assert set(c) == {"name", "expected", "actual", "status"}
        assert c["status"] in ("PASS", "FAIL")
    return code, data


def test_jacobian_fixtures(capsys):
    code, out, _ = run(capsys, "jacobian", "k4.graph")
    assert code == 0 and out.splitlines()[:2] == ["Jac = 4 4", "order = 16"]
    code, out, _ = run(capsys, "jacobian", "petersen.graph")
    assert code == 0 and out.splitlines()[0] == "Jac = 2 10 10 10"
    code, out, _ = run(capsys, "jacobian", "path3.graph")
    assert code == 0 and out.splitlines()[:2] == ["Jac =", "order = 1"]


def test_jacobian_json(capsys):
    code, data = run_json(capsys, "jacobian", "k4.graph")
    assert code == 0 and data["command"] == "jacobian"
    assert data["results"]["invariant_factors"] == [4, 4]


def test_weights_flag(tmp_path, capsys):
    w = tmp_path / "w.weights"
    w.write_text("W a 2\nW b 2\nWH a:b 2\nWH b:a 2\n")
    code, data = run_json(capsys, "jacobian", "k4.graph", "--weights", str(w))
    assert code == 0 and data["results"]["order"] == data["results"]["matrix_tree_order"]


def test_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "k4.graph")
    assert code == 0 and "4 vertices, 6 edges" in out
    p = tmp_path / "two.graph"
    p.write_text("V a\nV b\n")
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "FAIL  connected" in out


def test_input_errors_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.graph"
    p.write_text("V a\nH x a\nE x y\n")
    code, _, err = run(capsys, "jacobian", str(p))
    assert code == 2 and "bad.graph:3:" in err
    code, _, err = run(capsys, "jacobian", str(tmp_path / "none.graph"))
    assert code == 2
    code, _, err = run(capsys, "verify-all", "nosuch")
    assert code == 2
    code, _, err = run(capsys, "ogods", "k4.graph", "k4_abc.action")
    assert code == 2 and "order 3" in err


def test_trees(capsys):
    code, out, _ = run(capsys, "trees", "k4.graph", "--list")
    assert code == 0 and out.startswith("spanning trees = 16")
    assert len([l for l in out.splitlines() if l.startswith("  ")]) == 16


def test_zeta(capsys):
    code, data = run_json(capsys, "zeta", "k4.graph")
    assert code == 0
    assert data["results"]["leading_coefficient"] == 256 and data["results"]["vanishing_order"] == 3
    code, out, _ = run(capsys, "zeta", "path3.graph")
    assert code == 0 and "tree" in out


def test_quotient_output(capsys, tmp_path):
    out_file = tmp_path / "q.graph"
    code, _, _ = run(capsys, "quotient", "k4.graph", "k4_abc.action", "-o", str(out_file))
    assert code == 0
    first = out_file.read_text()
    run(capsys, "quotient", "k4.graph", "k4_abc.action", "-o", str(out_file))
    assert out_file.read_text() == first
    x = parse_graph(first)
    assert sorted(x.cv) == [1, 3] and len(x.graph.loops) == 1
    code, out, _ = run(capsys, "quotient", "petersen.graph", "petersen_ab_abc.action")
    assert sorted(parse_graph(out.split("\n\n")[0]).cv) == [2, 2, 2, 6]


def test_trivial_quotient(capsys, tmp_path):
    a = tmp_path / "id.action"
    a.write_text("")
    code, out, _ = run(capsys, "quotient", "k4.graph", str(a))
    assert code == 0
    assert parse_graph(out.split("\n\n")[0]).graph == parse_graph(write_graph(k4_graph())).graph


def test_verify_cover(capsys):
    code, out, _ = run(capsys, "verify-cover", "k4.graph", "k4_ab.action")
    assert code == 0
    lines = out.splitlines()
    assert lines[:4] == ["|G| = 2", "Jac(cover) = 4 4", "Jac(quotient) = 4", "Jac0 = 4"]
    code, out, _ = run(capsys, "verify-cover", "k4.graph", "k4_ab_cd.action")
    assert code == 1 and "FAIL  |Jac0| * |Jac(quotient)| = |Jac(cover)|" in out


def test_ogods(capsys):
    code, out, _ = run(capsys, "ogods", "petersen.graph", "petersen_ab.action")
    assert code == 0 and "ogods = 17" in out and "total weight = 20" in out
    code, data = run_json(capsys, "ogods", "petersen.graph", "petersen_ab-cd.action",
                          "--symmetry", "petersen_ab-cd.symmetry")
    assert code == 0
    assert data["results"]["count"] == 46 and data["results"]["total_weight"] == 100
    assert len(data["results"]["classes"]) == 15


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify-all", "empty")
    assert code == 0 and out.startswith("fixture empty")
    code, out, _ = run(capsys, "verify-all", "empty-fixture")
    assert code == 0
    code, data = run_json(capsys, "verify-all", "k4")
    rows = data["results"]["rows"]
    assert [r["subgroup"] for r in rows] == ["C2", "C2,2", "V4", "C3"]
    assert all(r["status"] == "PASS" for r in rows)
    assert [r["Jac"] for r in rows] == ["4", "2", "2", ""]
    failed = [c["name"] for c in data["checks"] if c["status"] == "FAIL"]
    # the K4 Klein quotient has a voltage Jacobian of twice the predicted order
    assert failed and all(name.startswith("k4//V4") for name in failed)
    assert code == 1


def test_verify_all_petersen(capsys):
    code, data = run_json(capsys, "verify-all", "petersen")
    rows = data["results"]["rows"]
    assert len(rows) == 8 and all(r["status"] == "PASS" for r in rows)
    failed = {c["name"].split(":")[0] for c in data["checks"] if c["status"] == "FAIL"}
    assert failed == {"petersen//(Z/2)^2 (normal)", "petersen//D4"}


def test_deterministic_output(capsys):
    outs = {run(capsys, "verify-all", "k4")[1] for _ in range(2)}
    assert len(outs) == 1


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "chipgog.cli", "jacobian", "k4.graph"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("Jac = 4 4")
