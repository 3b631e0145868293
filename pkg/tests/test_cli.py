import json
import subprocess
import sys

import numpy as np
import pytest

from nodalsurplus.cli import main
from nodalsurplus.instances import STANDARD_GRAPHS


@pytest.fixture
def graph_file(tmp_path):
    def make(name):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(STANDARD_GRAPHS[name]().to_json()))
        return str(path)
    return make


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_graph_check(graph_file, capsys):
    code, out, _ = run(["graph", "check", "--graph", graph_file("b")], capsys)
    d = json.loads(out)
    assert code == 0 and d["beta"] == 2 and d["disjoint_cycles"] and d["bridges"] == [[2, 3]]


@pytest.mark.parametrize("content", [
    '{"n": 3, "edges": [[0, 1], [1, 2]], "extra": 1}',
    '{"n": 3, "edges": [[1, 0], [1, 2]]}',
    '{"n": 3, "edges": [[0, 1.5], [1, 2]]}',
    '{"n": 4, "edges": [[0, 1], [2, 3]]}',
    '{"n": 3, "edges": [[0, 1], [0, 1], [1, 2]]}',
    'not json',
])
def test_bad_graph_exit_2(tmp_path, capsys, content):
    path = tmp_path / "g.json"
    path.write_text(content)
    code, _, err = run(["graph", "check", "--graph", str(path)], capsys)
    assert code == 2 and err.startswith("error:")


def test_usage_error_exit_2(capsys):
    assert run(["verify", "nonsense", "--graph", "x"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_gen_roundtrip(graph_file, tmp_path, capsys):
    g = graph_file("a")
    out = tmp_path / "h.json"
    assert main(["gen", "--graph", g, "--seed", "3", "--output", str(out)]) == 0
    code, text, _ = run(["gsc", "--graph", g, "--matrix", str(out)], capsys)
    d = json.loads(text)
    assert code == 0 and d["verdict"] == "PASS" and d["distinct"]["verdict"] == "PASS"
    # file matrix and seeded matrix agree
    assert run(["gsc", "--graph", g, "--seed", "3"], capsys)[1] == text


def test_gsc_flat_band_indeterminate(tmp_path, capsys):
    from nodalsurplus.instances import flat_band_instance

    fb = flat_band_instance()
    gp, hp = tmp_path / "g.json", tmp_path / "h.json"
    gp.write_text(json.dumps(fb.h.graph.to_json()))
    hp.write_text(json.dumps(fb.h.to_json()))
    code, out, _ = run(["gsc", "--graph", str(gp), "--matrix", str(hp)], capsys)
    assert code == 1 and json.loads(out)["verdict"] == "INDETERMINATE"


def test_surplus(graph_file, capsys):
    code, out, _ = run(["surplus", "--graph", graph_file("b"), "--seed", "1"], capsys)
    d = json.loads(out)
    assert code == 0 and d["orbit_size"] == 32
    assert all(r["counts"] == [1, 2, 1] and r["binomial_pass"] for r in d["results"])


def test_verify_gate(graph_file, capsys):
    assert run(["verify", "binomial", "--graph", graph_file("theta")], capsys)[0] == 2
    code, out, _ = run(["verify", "binomial", "--graph", graph_file("theta"), "--exploratory"], capsys)
    d = json.loads(out)
    assert code == 0 and d["asserted"] is False


@pytest.mark.parametrize("what", ["binomial", "morse", "monotone", "schur", "haynsworth", "current"])
def test_verify_passes(graph_file, capsys, what):
    code, out, _ = run(["verify", what, "--graph", graph_file("b"), "--seed", "7"], capsys)
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "PASS" and d["asserted"]
    assert all(r["verdict"] == "PASS" for r in d["results"])


def test_verify_localglobal(graph_file, capsys):
    code, out, _ = run(["verify", "localglobal", "--graph", graph_file("a"), "--grid", "16"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "PASS"


def test_threads_byte_identical(graph_file, capsys, monkeypatch):
    argv = ["verify", "morse", "--graph", graph_file("b"), "--seed", "2"]
    one = run(argv + ["--threads", "1"], capsys)[1]
    four = run(argv + ["--threads", "4"], capsys)[1]
    monkeypatch.setenv("NODALSURPLUS_THREADS", "3")
    env = run(argv, capsys)[1]
    assert one == four == env


def test_scan_csv(graph_file, capsys):
    code, out, _ = run(["scan", "--graph", graph_file("b"), "--eps", "1", "--cycle", "0",
                        "--k", "3", "--samples", "32"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "t,lambda,deriv" and len(lines) == 34
    trailer = json.loads(lines[-1][2:])
    assert lines[-1].startswith("# ") and trailer["verdict"] == "PASS"
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:-1]])
    assert rows[0, 0] == 0.0 and rows[-1, 0] == pytest.approx(np.pi)


def test_scan_bad_eps(graph_file, capsys):
    assert run(["scan", "--graph", graph_file("b"), "--eps", "4"], capsys)[0] == 2
    assert run(["scan", "--graph", graph_file("b"), "--k", "all"], capsys)[0] == 2


def test_flatband_demo(capsys):
    code, out, _ = run(["flatband-demo"], capsys)
    d = json.loads(out)
    assert code == 0 and d["scan"] == "FLAT_BAND" and d["gsc"] != "PASS"
    assert max(d["distance_to_lambda"]) <= 1e-9


def test_module_entry_point(graph_file):
    res = subprocess.run([sys.executable, "-m", "nodalsurplus", "graph", "check", "--graph", graph_file("a")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["beta"] == 1
