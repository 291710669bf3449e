"""Command-line interface contract."""

import json

import pytest

from auctionmatch.cli import main
from auctionmatch.graph import BipartiteInstance, loads_instance, save_instance


@pytest.fixture
def k22(tmp_path):
    path = tmp_path / "k22.gr"
    inst = BipartiteInstance.build(
        2, 2, [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
    save_instance(inst, path)
    return str(path)


@pytest.fixture
def single(tmp_path):
    path = tmp_path / "single.gr"
    save_instance(BipartiteInstance.build(1, 1, [(0, 0, 1)]), path)
    return str(path)


@pytest.fixture
def star(tmp_path):
    path = tmp_path / "star.gr"
    inst = BipartiteInstance.build(
        1, 4, [(0, j, 1) for j in range(4)], b_l=[2], b_r=[1] * 4)
    save_instance(inst, path)
    return str(path)


def _run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_run_mwm_verified_exact(capsys, k22):
    code, report = _run_json(capsys, [
        "run", k22, "--algo", "mwm", "--eps", "1/8", "--verify"])
    assert code == 0
    assert report["result_value"] == 2
    assert report["ratio"] == 1.0
    assert report["verify"] == {
        "passed": True, "property": "weight-approximation-(1-6eps)"}
    # unit weights: no buckets, budget 4 k^4
    assert report["rounds"]["budget"] == 4 * 8 ** 4
    assert report["passes"] is None
    assert report["peak_words"] is None


def test_run_mcm_single_edge(capsys, single):
    code, report = _run_json(capsys, [
        "run", single, "--algo", "mcm", "--eps", "1/2", "--verify",
        "--audit"])
    assert code == 0
    assert report["result_value"] == 1
    assert report["rounds"]["budget"] == 8
    assert report["audit"] == "ok"
    assert report["verify"]["property"] == "cardinality-approximation-(1-2eps)"


def test_run_mcbm_stream_star(capsys, star):
    code, report = _run_json(capsys, [
        "run", star, "--algo", "mcbm", "--eps", "1/4", "--mode", "stream",
        "--audit", "--verify"])
    assert code == 0
    assert report["result_value"] == 2
    assert report["passes"] == 3
    assert report["passes"] <= 1 + 2 * report["rounds"]["budget"] == 65
    assert report["peak_words"] > 0
    assert report["verify"]["property"] == "capacitated-approximation-(1-2eps)"


def test_run_mwm_rand_reports_blackboard(capsys, k22):
    code, report = _run_json(capsys, [
        "run", k22, "--algo", "mwm", "--eps", "1/4", "--kernel", "rand"])
    assert code == 0
    bb = report["blackboard"]
    assert bb is not None
    assert bb["rounds"] == bb["proposal_rounds"] + bb["coordination_rounds"]
    assert bb["total_bits"] > 0


def test_run_gp_schedule(capsys, tmp_path):
    path = tmp_path / "wide.gr"
    code = main(["gen", "--nl", "8", "--nr", "8", "--density", "0.5",
                 "--wmin", "1", "--wmax", "100000", "--seed", "3",
                 "-o", str(path)])
    assert code == 0
    capsys.readouterr()
    code, report = _run_json(capsys, [
        "run", str(path), "--algo", "mwm", "--eps", "1/4", "--mode", "gp",
        "--gp-schedule", "sequential", "--verify"])
    assert code == 0
    assert report["verify"] == {
        "passed": True,
        "property": "reduced-weight-approximation-1/(1+16eps)"}
    assert report["passes"] is not None
    assert report["peak_words"] is not None


def test_report_flag_writes_file(capsys, single, tmp_path):
    out = tmp_path / "report.json"
    code = main(["run", single, "--algo", "mcm", "--eps", "1/2",
                 "--report", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text())
    assert report["result_value"] == 1


def test_gen_is_seed_deterministic(capsys):
    argv = ["gen", "--nl", "6", "--nr", "7", "--density", "0.5",
            "--wmin", "2", "--wmax", "9", "--bl", "1:3", "--br", "1:2",
            "--seed", "5"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    inst = loads_instance(first)
    assert inst.n_l == 6 and inst.n_r == 7
    assert all(2 <= w <= 9 for _, _, w in inst.edges)
    assert all(1 <= b <= 3 for b in inst.b_l)
    assert all(1 <= b <= 2 for b in inst.b_r)


def test_gen_rejects_bad_capacity_range(capsys):
    assert main(["gen", "--bl", "0:2"]) == 2
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("argv_extra", [
    ["--algo", "mcm", "--eps", "1/2", "--mode", "stream"],
    ["--algo", "mcbm", "--eps", "1/2", "--kernel", "rand"],
    ["--algo", "mcbm", "--eps", "1/2", "--mode", "gp"],
    ["--algo", "mwm", "--eps", "1/2", "--mode", "stream", "--kernel", "rand"],
    ["--algo", "mwm", "--eps", "1/2", "--gp-schedule", "sequential"],
    ["--algo", "mwm", "--eps", "3/7"],
    ["--algo", "mwm", "--eps", "0.25"],
])
def test_usage_errors_exit_two(capsys, single, argv_extra):
    assert main(["run", single] + argv_extra) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_instance_file_exits_two(capsys, tmp_path):
    missing = str(tmp_path / "nope.gr")
    assert main(["run", missing, "--algo", "mcm", "--eps", "1/2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_suite_single_criterion(capsys, tmp_path):
    out = tmp_path / "agg.json"
    code = main(["suite", "--criteria", "2", "--report", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "criterion 02" in captured.err
    assert "PASS" in captured.err
    agg = json.loads(out.read_text())
    assert agg["criteria"][0]["passed"] is True


def test_suite_rejects_bad_criteria(capsys):
    assert main(["suite", "--criteria", "11"]) == 2
    assert main(["suite", "--criteria", "a,b"]) == 2
    capsys.readouterr()
