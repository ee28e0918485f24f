import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qgs import catalog
from qgs import graphs as gr
from qgs import io as qio
from qgs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_matrix(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def sweep_s(header, row, n):
    vals = dict(zip(header, row))
    return np.array([[complex(float(vals[f"s_{i}_{j}_re"]), float(vals[f"s_{i}_{j}_im"]))
                      for j in range(n)] for i in range(n)])


def test_smatrix_free_point_interaction(capsys):
    code, out, _ = run(capsys, "smatrix", "--builtin", "pointint:1,0,0,1,0",
                       "--lambda-min", "0.5", "--lambda-max", "2", "--grid", "3")
    assert code == 0
    header, rows = read_matrix(out)
    assert header[0] == "lambda" and header[-2:] == ["exceptional", "kernel_dim"]
    assert len(rows) == 3
    for row in rows:
        assert np.allclose(sweep_s(header, row, 2), [[0, 1], [1, 0]], atol=1e-12)


def test_smatrix_example42_builtin(capsys):
    code, out, _ = run(capsys, "smatrix", "--builtin", "example42", "--a", "3.14159265",
                       "--lambda-min", "0.5", "--lambda-max", "3", "--grid", "4")
    assert code == 0
    header, rows = read_matrix(out)
    for row in rows:
        lam = float(row[0])
        assert np.max(np.abs(sweep_s(header, row, 4) - catalog.example42_smatrix(3.14159265, lam))) <= 1e-10


def test_smatrix_single_point(capsys):
    code, out, _ = run(capsys, "smatrix", "builtin:delta:1", "--lambda", "1")
    assert code == 0
    _, rows = read_matrix(out)
    assert len(rows) == 1 and rows[0][0] == "1"


def test_smatrix_parallel_output_is_identical(capsys, tmp_path):
    outs = []
    for jobs in ("1", "4"):
        path = tmp_path / f"out{jobs}.csv"
        assert main(["smatrix", "--builtin", "example42-merged", "--a", "1.1", "--b", "0.7",
                     "--lambda-min", "0.5", "--lambda-max", "9", "--grid", "25",
                     "--jobs", jobs, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_compose_example41_pipeline(capsys):
    code, out, _ = run(capsys, "compose", "builtin:delta:1", "builtin:delta:2",
                       "--ports", "1:0", "--lengths", "1.3", "--lambda", "2.0", "--verify")
    assert code == 0
    lines = dict(l.split("=", 1) for l in out.splitlines() if "=" in l)
    assert float(lines["oracle_defect"]) <= 1e-8
    assert lines["compatible"] == "true"


def test_compose_example42_at_resonance(capsys):
    pi = str(np.pi)
    code, out, _ = run(capsys, "compose", "builtin:example42", "builtin:example42", "--a", pi,
                       "--ports", "2:0,3:1", "--lengths", f"{pi},{pi}", "--lambda", "4", "--verify")
    assert code == 0
    lines = dict(l.split("=", 1) for l in out.splitlines() if "=" in l)
    assert lines["resonance_dim"] == "1" and lines["compatible"] == "false"
    assert float(lines["oracle_defect"]) <= 1e-6


@pytest.mark.parametrize("ports,lengths", [("1:0,0:1", "1.0"), ("1:0", "1,2"), ("0:0,0:1", "1,1"),
                                           ("9:0", "1"), ("1-0", "1")])
def test_compose_port_errors(capsys, ports, lengths):
    code, _, err = run(capsys, "compose", "builtin:delta:1", "builtin:delta:2",
                       "--ports", ports, "--lengths", lengths, "--lambda", "1")
    assert code == 5 and "error" in err


def test_eigs_example42_merged(capsys):
    pi = str(np.pi)
    code, out, _ = run(capsys, "eigs", "--builtin", "example42-merged", "--a", pi, "--b", pi,
                       "--lambda-min", "0.5", "--lambda-max", "10", "--grid", "301",
                       "--overlap-edges", "2,3")
    assert code == 0
    _, rows = read_matrix(out)
    lams = [float(r[0]) for r in rows]
    assert np.allclose(lams, [1, 4, 9], atol=1e-6)
    assert all(r[1] == "1" and r[2] == "1" for r in rows)


def test_transfer_delta(capsys):
    code, out, _ = run(capsys, "transfer", "--builtin", "delta:2", "--lambda", "4")
    assert code == 0
    lines = dict(l.split("=", 1) for l in out.splitlines() if "=" in l)
    assert float(lines["j_defect"]) <= 1e-9 and lines["degenerate"] == "false"
    _, rows = read_matrix(out.split("\ndegenerate")[0])
    assert complex(float(rows[0][2]), float(rows[0][3])) == pytest.approx(1 + 0.5j)


def test_transfer_odd_channel_count_is_numeric_error(capsys):
    code, _, _ = run(capsys, "transfer", "--builtin", "kirchhoff:3", "--lambda", "1")
    assert code == 4


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "all")
    assert code == 0
    assert out.count("PASS") == 5


def test_parse_and_self_adjoint_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "smatrix", str(bad), "--lambda", "1")[0] == 2
    short = tmp_path / "short.json"
    short.write_text(json.dumps({"external": 1, "internal": [], "A": [[1, 0]], "B": []}))
    assert run(capsys, "smatrix", str(short), "--lambda", "1")[0] == 2
    g = gr.MetricGraph(1, (), np.eye(1), 1j * np.eye(1))
    path = tmp_path / "nsa.json"
    qio.write_graph(g, path)
    code, _, err = run(capsys, "smatrix", str(path), "--lambda", "1")
    assert code == 3 and "self-adjoint" in err
    assert run(capsys, "smatrix", "--builtin", "nosuch", "--lambda", "1")[0] == 2
    assert run(capsys, "smatrix", "--builtin", "delta:1", "--lambda-min", "2",
               "--lambda-max", "1", "--grid", "3")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_graph_file_round_trip(tmp_path, rng):
    for g in [gr.random_graph(2, 2, rng), gr.example42_vertex(0.3), catalog.example41_graph(1.7)]:
        path = tmp_path / "g.json"
        qio.write_graph(g, path)
        assert qio.read_graph(path) == g


def test_graph_file_drives_smatrix(capsys, tmp_path):
    path = tmp_path / "ex42.json"
    qio.write_graph(gr.example42_vertex(1.2), path)
    code, out, _ = run(capsys, "smatrix", str(path), "--lambda", "2.5")
    header, rows = read_matrix(out)
    assert code == 0
    assert np.max(np.abs(sweep_s(header, rows[0], 4) - catalog.example42_smatrix(1.2, 2.5))) <= 1e-12


def test_tolerance_env_var_reaches_solver(capsys, monkeypatch):
    # just off the resonance sigma_min/sigma_max of Z is about 1.5e-7
    argv = ("smatrix", "--builtin", "example42-merged", "--a", str(np.pi), "--b", str(np.pi),
            "--lambda", str(4 + 1e-6))
    flags = []
    for value in ("1e-10", "1e-6"):
        monkeypatch.setenv("QGS_TOLERANCE", value)
        code, out, _ = run(capsys, *argv)
        header, rows = read_matrix(out)
        assert code == 0
        flags.append(rows[0][header.index("exceptional")])
    assert flags == ["0", "1"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qgs.cli", "smatrix", "--builtin", "kirchhoff:2",
                           "--lambda", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("lambda,")
