import json
import subprocess
import sys

import pytest

from rqp.cli import main


@pytest.fixture
def run(capsys, data_dir, monkeypatch):
    monkeypatch.chdir(data_dir)

    def _run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def test_hpath_enumerate(run):
    code, out, _ = run("hpath", "--circuit", "tree_ch.qc", "--mode", "enumerate")
    rep = json.loads(out)
    assert code == 0
    assert rep["D"] == ["1/4", "0", "3/4"]
    assert rep["amplitude"] == {"exact": "1/2", "decimal": 0.5}


def test_hpath_sample(run):
    code, out, _ = run("hpath", "--circuit", "tree_ch.qc", "--mode", "sample", "--rounds", "20000", "--seed", "3")
    assert code == 0
    assert json.loads(out)["command"] == "hpath"


def test_gap(run):
    code, out, _ = run("gap", "--circuit", "h1.qc", "--k", "1", "--report", "point0.dist")
    assert code == 0 and json.loads(out)["gap"] == "1/8"
    code, out, _ = run("gap", "--circuit", "h1.qc", "--k", "1", "--strategy", "uniform")
    assert code == 0 and json.loads(out)["gap"] == "0"


def test_tpath(run):
    code, out, _ = run("tpath", "--circuit", "tree_ct.qc")
    rep = json.loads(out)
    assert code == 0
    assert rep["z_expectation"]["exact"] == "1/2"
    assert rep["p_acc"]["exact"] == "3/4"


def test_oracle(run):
    code, out, _ = run("oracle", "--circuit", "tree_ch.qc", "--k", "1")
    assert code == 0
    assert json.loads(out)["amplitude_at_zero"] == pytest.approx(0.5)


def test_p1_and_p2(run):
    code, out, _ = run("p1", "--circuit", "x1.qc", "--rounds", "2000", "--seed", "1", "--server", "flip")
    rep = json.loads(out)
    assert code == 0 and rep["exact_expected_reward"] == "3/8"
    code, out, _ = run("p2", "--circuit", "h1.qc", "--k", "1", "--report", "half.dist", "--rounds", "100", "--seed", "1")
    assert code == 0 and json.loads(out)["exact_expected_reward"] == "15/8"


def test_audit(run):
    code, out, _ = run("audit", "--circuit", "x1.qc", "--protocol", "1", "--bit", "1", "--rounds", "100000",
                       "--eps", "0.02", "--seed", "5")
    rep = json.loads(out)
    assert code == 0 and rep["within_eps"] and rep["hoeffding_bound"] < 1e-3
    code, out, _ = run("audit", "--circuit", "h1.qc", "--k", "1", "--report", "point0.dist", "--exhaustive",
                       "--rounds", "10", "--seed", "0")
    rep = json.loads(out)
    assert code == 0 and rep["eta"] == 1.75


def test_sharpp(run):
    code, out, _ = run("sharpp", "--phi", "phi_and.txt", "--report", "half.dist")
    rep = json.loads(out)
    assert code == 0 and rep["expected_reward"]["exact"] == "-1/2" and rep["count"] == 3
    code, out, _ = run("sharpp", "--exhaustive-n3")
    assert code == 0 and json.loads(out)["exhaustive_n3"]["failures"] == []


def test_verify_subset(run):
    code, out, err = run("verify", "--criteria", "1")
    assert code == 0 and json.loads(out)["passed"]
    assert "[PASS] 1." in err


def test_out_file(run, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run("tpath", "--circuit", "tree_ct.qc", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["p_acc"]["exact"] == "3/4"


@pytest.mark.parametrize(
    "argv, message",
    [
        (("hpath", "--circuit", "missing.qc"), "file not found"),
        (("p1", "--circuit", "x1.qc", "--rounds", "10"), "needs --seed"),
        (("gap", "--circuit", "h1.qc", "--k", "1", "--report", "tree_ch.qc"), "invalid distribution"),
        (("hpath", "--circuit", "h1.qc", "--mode", "fast"), "invalid input"),
        (("p2", "--circuit", "h1.qc", "--k", "1", "--rounds", "0", "--seed", "1", "--report", "half.dist"), "at least 1"),
        (("verify", "--criteria", "42"), "no acceptance criterion"),
    ],
)
def test_error_exit_codes(run, argv, message):
    code, out, err = run(*argv)
    assert code == 2 and out == ""
    assert message in err


def test_parse_error(run, tmp_path):
    bad = tmp_path / "bad.qc"
    bad.write_text("qubits 1\ngateset ch\nfoo 0\n")
    code, _, err = run("hpath", "--circuit", str(bad))
    assert code == 2 and "parse error" in err and "line 3" in err


def test_budget_exceeded(run, tmp_path, monkeypatch):
    import rqp.hpath

    monkeypatch.setattr(rqp.hpath, "FRONTIER_MAX", 1)
    code, _, err = run("hpath", "--circuit", "tree_ch.qc", "--mode", "enumerate")
    assert code == 3 and "budget exceeded" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["p2", "--circuit", "h1.qc", "--k", "1", "--strategy", "honest-sampling:eps=0.125,delta=0.01",
         "--rounds", "500", "--seed", "9"],
        ["verify", "--criteria", "1,8"],
    ],
)
def test_byte_identical_reruns(data_dir, argv):
    cmd = [sys.executable, "-m", "rqp", *argv]
    a = subprocess.run(cmd, cwd=data_dir, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, cwd=data_dir, capture_output=True, check=True).stdout
    assert a == b and a
