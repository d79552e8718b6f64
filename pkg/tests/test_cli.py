import json
import math
import subprocess
import sys

import pytest

from tightspan.cli import main
from tightspan.metric_core import cycle_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out)


@pytest.fixture
def c4_file(tmp_path):
    p = tmp_path / "c4.json"
    p.write_text(cycle_graph(4).to_json())
    return str(p)


def test_witness_command(capsys):
    code, rep = report(capsys, "linf", "--op", "witness", "--dim", "2", "--lambda", "0.05")
    assert code == 0
    assert rep["result"]["verdict"] == "VALID"
    code, rep = report(capsys, "linf", "--op", "witness", "--dim", "1", "--lambda", "0.05")
    assert code == 1 and rep["result"]["verdict"] == "INVALID"


def test_barycenter_command(capsys):
    code, rep = report(capsys, "circle", "--op", "barycenter", "--grid", "360", "--r", "0.7853981")
    m = rep["result"]["barycenter"]
    assert code == 0
    assert min(m, 2 * math.pi - m) <= 2 * math.pi / 720 * 2
    assert rep["tolerances"]["tol_grid"] == pytest.approx(2 * math.pi / 360)


def test_span_finite_commands(capsys, c4_file):
    code, rep = report(capsys, "span-finite", "--op", "minimal", "--input", c4_file, "--values", "1,1,1,1")
    assert code == 0 and rep["result"]["minimal"]
    code, rep = report(capsys, "span-finite", "--op", "minimal", "--input", c4_file, "--values", "2,2,2,2")
    assert code == 1
    code, rep = report(capsys, "span-finite", "--op", "project", "--input", c4_file, "--values", "2,2,2,2")
    assert code == 0 and rep["result"]["projection"] == pytest.approx([1, 1, 1, 1], abs=1e-6)
    code, rep = report(capsys, "span-finite", "--op", "vertices", "--k", "3")
    assert code == 0 and rep["result"]["distinct"] == 8


def test_mountain_and_vr_commands(capsys, c4_file):
    code, rep = report(capsys, "mountain", "--op", "admissible", "--m", "2", "--n", "1")
    assert code == 0 and rep["passed"]
    code, rep = report(capsys, "mountain", "--op", "build", "--m", "1", "--n", "2", "--resolution", "32")
    assert code == 0 and rep["result"]["value"] == pytest.approx(math.pi / 3)
    code, rep = report(capsys, "vr", "--op", "treecheck", "--input", c4_file)
    assert code == 1 and rep["result"]["delta"] == 2
    code, rep = report(capsys, "vr", "--op", "label", "--r", str(0.4 * math.pi))
    assert rep["result"]["label"] == "S^3"


def test_vr_sweep_csv(capsys):
    code, out, _ = run(capsys, "vr", "--op", "components", "--random-tree", "8", "--format", "csv",
                       "--strict", "closed")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "scale,components"
    assert lines[-1].endswith(",1")
    code, out, _ = run(capsys, "circle", "--op", "homotopy", "--r", "0.5", "--kuratowski", "1.0",
                       "--t", "0.5", "--grid", "12", "--format", "csv")
    rows = out.strip().splitlines()
    assert code == 0 and len(rows) == 25
    for row in rows[1:]:
        for field in row.split(","):
            assert field == f"{float(field):.12g}"


def test_deterministic_reports(capsys, tmp_path):
    args = ["linf", "--op", "convexity", "--shape", "box", "--dim", "1", "--samples", "500",
            "--count", "30", "--seed", "3", "--no-timestamp"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timestamp_present_by_default(capsys):
    code, out, _ = run(capsys, "vr", "--op", "label", "--r", "0.3")
    assert "timestamp" in json.loads(out)


def test_exit_codes(capsys, tmp_path, c4_file):
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "span-finite", "--op", "minimal")[0] == 2
    assert run(capsys, "span-finite", "--op", "minimal", "--input", str(tmp_path / "missing.json"),
               "--values", "1")[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"labels": [1, 2]}')
    code, _, err = run(capsys, "span-finite", "--op", "minimal", "--input", str(bad), "--values", "1,1")
    assert code == 4 and "schema" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(capsys, "vr", "--op", "treecheck", "--input", str(broken))[0] == 4
    code, _, err = run(capsys, "span-finite", "--op", "minimal", "--input", c4_file, "--values", "0,0,0,0")
    assert code == 5 and "precondition" in err
    assert run(capsys, "linf", "--op", "minimal", "--point", "0,0", "--dim", "2")[0] == 5
    assert run(capsys, "vr", "--op", "label", "--r", "0.3", "--format", "csv")[0] == 2


def test_custom_linf_shape(capsys, tmp_path):
    p = tmp_path / "pts.json"
    seg = [[-1 + k / 100, 0] for k in range(201)]
    p.write_text(json.dumps({"points": seg + [[0, 3]]}))
    code, rep = report(capsys, "linf", "--op", "surrounding", "--shape", "custom", "--dim", "1",
                       "--input", str(p), "--point", "0,2")
    assert code == 1 and not rep["result"]["surrounding"]
    p.write_text(json.dumps({"points": "nope"}))
    assert run(capsys, "linf", "--op", "minimal", "--shape", "custom", "--input", str(p),
               "--point", "0,0")[0] == 4


def test_verify_subset(capsys, monkeypatch):
    monkeypatch.setenv("TIGHTSPAN_THREADS", "2")
    code, out, err = run(capsys, "verify", "--suite", "1,12,13", "--no-timestamp")
    rep = json.loads(out)
    assert code == 0
    assert [c["criterion"] for c in rep["result"]["criteria"]] == [1, 12, 13]
    assert "seconds" not in rep["result"]["criteria"][0]
    assert err.count("[PASS]") == 3
    monkeypatch.setenv("TIGHTSPAN_THREADS", "many")
    assert run(capsys, "verify", "--suite", "13")[0] == 2
    monkeypatch.delenv("TIGHTSPAN_THREADS")
    assert run(capsys, "verify", "--suite", "99")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tightspan", "vr", "--op", "label", "--r", "0.2",
                           "--no-timestamp"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["label"] == "S^1"
