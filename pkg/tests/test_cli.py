import json

import pytest

from cli import render, run, run_command
from cli.commands import SOLVE_COLUMNS
from cli.render import format_value
from utils.error_utils import EXIT_SOLVER, EXIT_VALIDATION

REFERENCE_FLAGS = ["--lambda", "2", "--mu", "1", "--h", "1", "--c", "100", "--s0", "100", "--s1", "100"]


def run_json(capsys, *argv):
    code = run([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_solve(capsys):
    code, doc = run_json(capsys, "solve", *REFERENCE_FLAGS)
    assert code == 0
    assert doc["success"] is True
    assert doc["columns"] == SOLVE_COLUMNS
    row = doc["rows"][0]
    assert row["M"] == 4
    assert row["N"] in (38, 39)
    assert row["v"] == pytest.approx(43.172606, abs=1e-5)
    assert row["case"] == "mn"
    assert row["exact_rel_gap"] <= 1e-6
    assert row["N_exact"] in (38, 39)
    assert doc["params"]["c"] == 100.0


def test_best0n_with_lp(capsys):
    code, doc = run_json(capsys, "best0n", *REFERENCE_FLAGS, "--lp")
    assert code == 0
    row = doc["rows"][0]
    assert row["N_star"] == 47
    assert row["N_lp"] == 47
    assert row["n_tilde"] == 100
    assert row["v_lp"] == pytest.approx(row["v"], rel=1e-6)


@pytest.mark.parametrize("policy, low, high", [("mn:4,39", 43.17266, 43.17269), ("full", 102.0, 102.0),
                                                ("mn:0,47", 50.93, 51.13)])
def test_evaluate(capsys, policy, low, high):
    code, doc = run_json(capsys, "evaluate", *REFERENCE_FLAGS, "--policy", policy)
    assert code == 0
    assert low - 1e-9 <= doc["rows"][0]["v"] <= high + 1e-9


def test_simulate_is_reproducible(capsys):
    argv = ["simulate", *REFERENCE_FLAGS, "--policy", "mn:4,39", "--seed", "7", "--horizon", "200",
            "--format", "csv"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    header, row = first.splitlines()[:2]
    assert header.startswith("policy,mean,half_width")
    assert row.startswith("mn:4,39") or row.startswith('"mn:4,39"')


def test_simulate_echoes_seed(capsys):
    code, doc = run_json(capsys, "simulate", *REFERENCE_FLAGS, "--policy", "full", "--seed", "5",
                         "--horizon", "100", "--replications", "2")
    assert code == 0
    row = doc["rows"][0]
    assert row["seed"] == 5
    assert row["replications"] == 2
    assert row["mode"] == "time_average"


def test_missing_parameter(capsys):
    flags = REFERENCE_FLAGS[:-2]
    code, doc = run_json(capsys, "solve", *flags)
    assert code == EXIT_VALIDATION
    assert doc["success"] is False
    assert doc["field"] == "s1"


def test_invalid_parameter(capsys):
    code, doc = run_json(capsys, "solve", *REFERENCE_FLAGS[:-4], "--s0", "0", "--s1", "0")
    assert code == EXIT_VALIDATION
    assert doc["field"] == "s0"


def test_missing_policy(capsys):
    code, doc = run_json(capsys, "evaluate", *REFERENCE_FLAGS)
    assert code == EXIT_VALIDATION
    assert doc["field"] == "policy"


def test_environment_fills_parameters(capsys, monkeypatch):
    monkeypatch.setenv("CAPSWITCH_S1", "100")
    code, doc = run_json(capsys, "best0n", *REFERENCE_FLAGS[:-2])
    assert code == 0
    assert doc["rows"][0]["N_star"] == 47


def test_sweep_order_and_gap(capsys):
    code, doc = run_json(capsys, "sweep", "--mu", "1", "--h", "1", "--s0", "5", "--s1", "5",
                         "--grid", "lambda=1,2", "--grid", "c=2,3,4")
    assert code == 0
    rows = doc["rows"]
    assert [(r["lambda"], r["c"]) for r in rows] == [(1.0, 2.0), (1.0, 3.0), (1.0, 4.0),
                                                     (2.0, 2.0), (2.0, 3.0), (2.0, 4.0)]
    for r in rows:
        assert r["gap"] >= -1e-9 * r["v"]
    assert doc["columns"][:6] == ["lambda", "mu", "h", "c", "s0", "s1"]


def test_sweep_workers_keep_order(capsys):
    argv = ["sweep", "--mu", "1", "--h", "1", "--s0", "5", "--s1", "5", "--c", "3", "--grid", "lambda=0.5,1,2,4"]
    _, serial = run_json(capsys, *argv)
    code, parallel = run_json(capsys, *argv, "--workers", "2")
    assert code == 0
    assert parallel["rows"] == serial["rows"]


def test_sweep_reference_gap(capsys):
    code, doc = run_json(capsys, "sweep", *REFERENCE_FLAGS, "--grid", "s1=100")
    assert code == 0
    row = doc["rows"][0]
    assert row["N_best0N"] == 47
    assert row["gap"] >= 7.0
    assert row["gap"] == pytest.approx(51.033061 - 43.172606, abs=1e-4)


def test_sweep_errors(capsys):
    code, doc = run_json(capsys, "sweep", *REFERENCE_FLAGS)
    assert code == EXIT_VALIDATION
    assert doc["field"] == "grid"
    code, doc = run_json(capsys, "sweep", "--mu", "1", "--grid", "lambda=1,2")
    assert code == EXIT_VALIDATION
    assert doc["field"] == "h"
    code, doc = run_json(capsys, "sweep", *REFERENCE_FLAGS, "--grid", "c=5,-1")
    assert code == EXIT_VALIDATION
    assert doc["field"] == "c"


def test_discounted(capsys):
    code, doc = run_json(capsys, "discounted", *REFERENCE_FLAGS, "--alpha", "0.1")
    assert code == 0
    row = doc["rows"][0]
    assert row["M_star"] < row["N_star"] <= row["n_alpha"]
    assert row["method"] == "policy"
    code, doc = run_json(capsys, "discounted", *REFERENCE_FLAGS, "--alpha", "0.1", "--values")
    assert code == 0
    assert len(doc["rows"]) == row["L"]
    assert doc["rows"][0]["i"] == 0


def test_discounted_needs_alpha(capsys):
    code, doc = run_json(capsys, "discounted", *REFERENCE_FLAGS)
    assert code == EXIT_VALIDATION
    assert doc["field"] == "alpha"


def test_reproduce_example(capsys):
    code, doc = run_json(capsys, "reproduce-example")
    assert code == 0
    statuses = {r["check"]: r["status"] for r in doc["rows"]}
    assert statuses["lp M"] == "pass"
    assert statuses["best (0,N) N"] == "pass"
    assert statuses["gap to best (0,N)"] == "pass"
    assert statuses["lp v"] == "pass"
    assert set(statuses.values()) <= {"pass", "report"}
    quoted = next(r for r in doc["rows"] if r["check"].startswith("lp v minus quoted"))
    assert quoted["status"] == "report"
    assert quoted["observed"] == pytest.approx(43.172606 - 43.39, abs=1e-4)
    assert any("quoted" in w for w in doc["warnings"])


def test_config_file_with_flag_override(capsys, tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"lambda": 2, "mu": 1, "h": 1, "c": 100, "s0": 100, "s1": 100,
                                "policy": "mn:4,39", "format": "csv"}), encoding="utf-8")
    code = run(["evaluate", "--config", str(path), "--c", "50"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0] == "policy,v"
    code, doc = run_json(capsys, "evaluate", "--config", str(path), "--c", "50")
    assert doc["params"]["c"] == 50.0


def test_malformed_config(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{lambda: 2", encoding="utf-8")
    code = run(["solve", "--config", str(path)])
    assert code == EXIT_VALIDATION
    assert capsys.readouterr().out.startswith("error:")


def test_output_file(capsys, tmp_path):
    target = tmp_path / "best.csv"
    code = run(["best0n", *REFERENCE_FLAGS, "--format", "csv", "--output", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "N_star,v,n_tilde"
    assert lines[1].startswith("47,")


def test_numeric_setting_override(capsys):
    code, _ = run_json(capsys, "best0n", *REFERENCE_FLAGS, "--set", "support_threshold=1e-10")
    assert code == 0
    with pytest.raises(SystemExit):
        run(["best0n", *REFERENCE_FLAGS, "--set", "support_threshold"])
    code, doc = run_json(capsys, "best0n", *REFERENCE_FLAGS, "--set", "truncation_margin=0")
    assert code == EXIT_VALIDATION
    assert doc["field"] == "truncation_margin"


def test_table_and_csv_carry_the_same_numbers(capsys):
    assert run(["evaluate", *REFERENCE_FLAGS, "--policy", "mn:4,39", "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert run(["evaluate", *REFERENCE_FLAGS, "--policy", "mn:4,39"]) == 0
    table = capsys.readouterr().out
    value = csv_text.splitlines()[1].rsplit(",", 1)[1]
    assert value in table
    assert table.splitlines()[1].startswith("---")


def test_run_command_directly():
    flags = dict(zip(["lambda", "mu", "h", "c", "s0", "s1"], [2.0, 1.0, 1.0, 100.0, 100.0, 100.0]))
    result = run_command("evaluate", {**flags, "policy": "full:3"})
    assert result["rows"][0]["v"] == pytest.approx(102.0)
    assert run_command("nonsense", flags)["exit_code"] == EXIT_VALIDATION


def test_render_helpers():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.1"
    error = {"success": False, "error": "boom", "exit_code": EXIT_SOLVER}
    assert render(error, "table") == "error: boom\n"
    assert json.loads(render(error, "json"))["exit_code"] == EXIT_SOLVER


@pytest.mark.parametrize("argv", [
    ["solve", *REFERENCE_FLAGS],
    ["sweep", "--mu", "1", "--h", "1", "--s0", "5", "--s1", "5", "--c", "3", "--grid", "lambda=0.5,1,2",
     "--workers", "2"],
    ["simulate", *REFERENCE_FLAGS, "--policy", "full", "--seed", "3", "--horizon", "50", "--replications", "2"],
], ids=["solve", "sweep", "simulate"])
def test_repeated_runs_write_identical_csv(capsys, argv):
    outputs = []
    for _ in range(2):
        assert run([*argv, "--format", "csv"]) == 0
        outputs.append(capsys.readouterr().out.encode("utf-8"))
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) >= 2
