import math
import subprocess
import sys

import numpy as np
import pytest

from qgchar.assembly import phi
from qgchar.cli import main, parse_z_range
from qgchar.document import parse_graph_document


@pytest.fixture
def run(capsys, data_dir, monkeypatch):
    monkeypatch.chdir(data_dir)

    def _run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def _csv(text):
    lines = text.strip().split("\n")
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


def test_z_range_parsing():
    assert parse_z_range("0:1:3") == (0.0, 1.0, 3)
    assert parse_z_range("-5:60", need_count=False) == (-5.0, 60.0, None)
    with pytest.raises(Exception):
        parse_z_range("0:1")
    with pytest.raises(Exception):
        parse_z_range("2:1:3")


def test_eval_csv(run):
    code, out, _ = run("eval", "--graph", "interval_dirichlet.json", "--root", "1", "--kind", "dirichlet", "--z-range", "0:1:3")
    assert code == 0
    header, rows = _csv(out)
    assert header == ["z", "phi"]
    assert [float(r[0]) for r in rows] == [0.0, 0.5, 1.0]
    assert float(rows[2][1]) == pytest.approx(math.sin(1.0), rel=1e-15)
    assert "\r" not in out


def test_spectrum_unit_interval(run):
    code, out, _ = run("spectrum", "--graph", "interval_dirichlet.json", "--root", "1", "--kind", "dirichlet", "--z-range", "0:100")
    assert code == 0
    header, rows = _csv(out)
    assert header == ["z", "multiplicity_flag", "residual"]
    assert [float(r[0]) for r in rows] == pytest.approx([math.pi**2, 4 * math.pi**2, 9 * math.pi**2], rel=1e-12)
    assert {r[1] for r in rows} == {"Simple"}


def test_two_port_columns(run):
    code, out, _ = run("two-port", "--graph", "edge_unit.json", "--z-range", "0:0:1")
    assert code == 0
    header, rows = _csv(out)
    assert header == ["z", "phi_dd", "phi_dn", "phi_nd", "phi_nn", "delta"]
    assert [float(x) for x in rows[0]] == [0.0, 1.0, 1.0, 1.0, 0.0, 1.0]


def test_seventeen_digits(run, data_dir):
    _, out, _ = run("eval", "--graph", "interval_dirichlet.json", "--root", "1", "--kind", "dirichlet", "--z-range", "2:2:1")
    graph = parse_graph_document((data_dir / "interval_dirichlet.json").read_bytes()).graph
    assert out == "z,phi\n2,%.17g\n" % phi(graph, 1, "dirichlet", 2.0)


def test_compose_parallel_two_unit_edges(run):
    code, out, _ = run(
        "compose", "--mode", "parallel", "--graph", "edge_unit.json", "--graph", "edge_unit.json", "--z-range", "0.1:40:25"
    )
    assert code == 0
    header, rows = _csv(out)
    assert header[-1] == "phi_nn"
    for r in rows:
        z = float(r[0])
        assert float(r[-1]) == pytest.approx(-4 * math.sin(math.sqrt(z)) ** 2, abs=1e-10)


def test_compose_series_and_many_parallel(run):
    code, out, _ = run(
        "compose", "--mode", "series", "--graph", "edge_unit.json", "--graph", "edge_unit.json", "--graph", "edge_unit.json",
        "--z-range", "2:2:1",
    )
    assert code == 0
    lam = math.sqrt(2.0)
    assert float(_csv(out)[1][0][1]) == pytest.approx(math.sin(3 * lam) / lam, rel=1e-13)
    code, out, _ = run(
        "compose", "--mode", "parallel", "--graph", "edge_unit.json", "--graph", "edge_unit.json", "--graph", "edge_q.json",
        "--z-range", "1:5:3",
    )
    assert code == 0
    assert _csv(out)[0] == ["z", "phi_nn"]


@pytest.mark.parametrize(
    "identity", ["series-1.1", "series-3.x", "lagrange-3.5", "parallel-5.i", "parallel-theorem", "parallel-m"]
)
def test_verify_pass_and_injected_failure(run, identity):
    args = ["verify", "--identity", identity, "--graph", "star_robin.json", "--graph", "path3_sampled.json", "--z-range=-5:60:50"]
    code, out, _ = run(*args)
    assert code == 0, out
    assert out.splitlines()[-1] == "result: PASS"
    assert "graphs: star_robin.json, path3_sampled.json" in out
    code, out, _ = run(*args, "--inject-sign-error")
    assert code == 3
    assert out.splitlines()[-1] == "result: FAIL"


def test_verify_lagrange_on_intervals(run):
    code, out, _ = run(
        "verify", "--identity", "lagrange-3.5", "--graph", "edge_unit.json", "--graph", "edge_q.json", "--z-range=-5:60:50"
    )
    assert code == 0
    line = next(x for x in out.splitlines() if x.startswith("defect"))
    assert "ratio=1.000000000000000e+00" in line


def test_verify_is_deterministic(run):
    args = ["verify", "--identity", "series-3.x", "--graph", "edge_unit.json", "--graph", "star_robin.json", "--z-range", "0:30:20"]
    assert run(*args)[1] == run(*args)[1]


def test_verify_parallel_m_three_graphs(run):
    code, out, _ = run(
        "verify", "--identity", "parallel-m", "--graph", "edge_unit.json", "--graph", "edge_unit.json", "--graph", "star_robin.json",
        "--z-range", "0.5:40:40",
    )
    assert code == 0, out


class TestExitCodes:
    def test_usage_error(self, run):
        code, _, err = run("eval", "--graph", "interval_dirichlet.json", "--root", "1", "--kind", "sideways", "--z-range", "0:1:2")
        assert code == 1
        assert "invalid choice" in err

    def test_missing_file(self, run):
        code, _, err = run("eval", "--graph", "nope.json", "--root", "1", "--kind", "neumann", "--z-range", "0:1:2")
        assert code == 2
        assert "nope.json" in err

    def test_interior_ports(self, run):
        code, _, err = run("two-port", "--graph", "cycle_interior_ports.json", "--z-range", "1:2:2")
        assert code == 2
        assert "PortNotPendant" in err

    def test_missing_ports(self, run):
        code, _, _ = run("two-port", "--graph", "interval_dirichlet.json", "--z-range", "1:2:2")
        assert code == 2

    def test_unknown_root(self, run):
        code, _, _ = run("eval", "--graph", "interval_dirichlet.json", "--root", "7", "--kind", "neumann", "--z-range", "1:2:2")
        assert code == 2

    def test_wrong_graph_count(self, run):
        code, _, _ = run("verify", "--identity", "series-3.x", "--graph", "edge_unit.json", "--z-range", "1:2:2")
        assert code == 2


def test_usage_error_exit_code_subprocess(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "qgchar", "eval", "--kind", "neumann"], capture_output=True, text=True, cwd=data_dir
    )
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "qgchar"], capture_output=True, text=True)
    assert proc.returncode == 1


def test_dump_normalized_round_trip(run, tmp_path):
    code, _, _ = run(
        "verify", "--identity", "series-3.x", "--graph", "star_robin.json", "--graph", "edge_q.json",
        "--z-range", "1:2:3", "--dump-normalized", str(tmp_path),
    )
    assert code == 0
    dumped = parse_graph_document((tmp_path / "star_robin.normalized.json").read_bytes())
    assert dumped.ports is not None
    again = parse_graph_document((tmp_path / "star_robin.normalized.json").read_text())
    assert again == dumped
    assert (tmp_path / "edge_q.normalized.json").exists()
    # the normalised star has v_in on edge 1, leaving v_in
    e1 = dumped.graph.edge(1)
    assert e1.tail == dumped.ports[0]
    assert np.isfinite(e1.length)
