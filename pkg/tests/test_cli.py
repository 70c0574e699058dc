import json
import subprocess
import sys
from fractions import Fraction

import pytest

from bcdof.cli import main

F = Fraction


@pytest.fixture
def cfg3(tmp_path):
    path = tmp_path / "cfg3.json"
    path.write_text(json.dumps({"M": 2, "N": [1, 1, 1]}))
    return str(path)


@pytest.fixture
def cfg2(tmp_path):
    path = tmp_path / "cfg2.json"
    path.write_text(json.dumps({"M": 3, "N": [1, 2]}))
    return str(path)


def run_cli(*argv):
    return main(list(argv))


# ---------------------------------------------------------------------------
# region
# ---------------------------------------------------------------------------


def test_region_outputs(tmp_path, cfg2, capsys):
    out = tmp_path / "out"
    assert run_cli("region", "--config", cfg2, "--mode", "both", "--out", str(out)) == 0
    printed = capsys.readouterr().out
    assert "max sum-DoF 15/7" in printed
    data = json.loads((out / "region_delayed.json").read_text())
    assert data["K"] == 2
    assert sorted(data["halfspaces"]) == sorted(
        [[[1, 3], [1, 1]], [[1, 2], [1, 3]]]
    )
    csv_text = (out / "vertices_delayed.csv").read_text()
    assert csv_text.splitlines() == [
        "d_minus_1,d_minus_2",
        "0,0",
        "0,1",
        "12/7,3/7",
        "2,0",
    ]
    assert (out / "region.png").stat().st_size > 0  # two-user region figure


def test_region_raw_mode_reduces(tmp_path, cfg3):
    out = tmp_path / "raw"
    assert run_cli("region", "--config", cfg3, "--mode", "raw", "--out", str(out)) == 0
    raw = json.loads((out / "region_raw.json").read_text())
    assert len(raw["halfspaces"]) == 3  # redundant permutations eliminated


def test_region_decimal_rendering(tmp_path, cfg2):
    out = tmp_path / "dec"
    assert run_cli("region", "--config", cfg2, "--mode", "delayed", "--out", str(out),
                   "--decimal") == 0
    text = (out / "vertices_delayed.csv").read_text()
    assert "12/7" not in text
    assert "1.71428571429" in text


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------


def test_compare_strict_with_witness(tmp_path, cfg3, capsys):
    out = tmp_path / "cmp"
    assert run_cli("compare", "--config", cfg3, "--out", str(out)) == 0
    assert "strict inclusion" in capsys.readouterr().out
    verdict = json.loads((out / "compare.json").read_text())
    assert verdict["relation"] == "strict_inclusion"
    assert verdict["witness"] == ["2/5", "2/5", "2/5"]


def test_compare_equal_regime(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"M": 1, "N": [1, 1]}))
    assert run_cli("compare", "--config", str(cfg)) == 0
    assert "equal" in capsys.readouterr().out


def test_compare_verdict_matches_threshold(tmp_path, capsys):
    import itertools

    for m, ns in itertools.product([1, 2, 3], [[1, 1], [1, 2], [2, 2], [1, 2, 3]]):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"M": m, "N": ns}))
        assert run_cli("compare", "--config", str(cfg)) == 0
        printed = capsys.readouterr().out
        expect_strict = sorted(ns)[1] < m
        assert ("strict inclusion" in printed) == expect_strict, (m, ns)


# ---------------------------------------------------------------------------
# curve
# ---------------------------------------------------------------------------


def test_curve_values_and_columns(tmp_path):
    out = tmp_path / "curve"
    assert run_cli("curve", "--out", str(out), "--kusers", "2,3",
                   "--ratios", "1/2,1,2,3") == 0
    lines = (out / "curve.csv").read_text().splitlines()
    assert lines[0] == "K,M_over_N,mode,sum_dof_over_N"
    rows = {tuple(line.split(",")[:3]): line.split(",")[3] for line in lines[1:]}
    assert rows[("2", "2", "delayed")] == "4/3"
    assert rows[("3", "2", "delayed")] == "6/5"
    assert rows[("2", "2", "nocsit")] == "1"
    assert rows[("2", "1/2", "delayed")] == "1/2"  # equals M/N below N
    assert rows[("3", "3", "delayed")] == "6/5"  # constant beyond M >= 2N
    assert (out / "curve.png").stat().st_size > 0


def test_curve_rejects_bad_ratio(tmp_path):
    assert run_cli("curve", "--out", str(tmp_path), "--ratios", "0,1") == 2


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------


def test_plan_writes_slacks(tmp_path, cfg3, capsys):
    out = tmp_path / "plan"
    assert run_cli("plan", "--config", cfg3, "--target", "2/5,2/5,2/5",
                   "--out", str(out)) == 0
    printed = capsys.readouterr().out
    assert "T2 = 2" in printed and "slack 0" in printed
    data = json.loads((out / "plan.json").read_text())
    assert data["Q"] == [2, 2, 2] and data["beta"] == 5
    assert data["achieved_dof"] == ["2/5", "2/5", "2/5"]
    assert data["decoding_condition"][0] == {
        "receiver": 1, "lhs": 2, "rhs": 2, "slack": 0,
    }
    assert data["phase2_budget"] == {"used": 2, "capacity": 2}


def test_plan_out_of_region_exit_code(cfg3):
    assert run_cli("plan", "--config", cfg3, "--target", "1,1,1") == 3


def test_plan_regime_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"M": 1, "N": [1, 1]}))
    assert run_cli("plan", "--config", str(cfg), "--target", "0,0") == 3


def test_plan_malformed_target(cfg3):
    assert run_cli("plan", "--config", cfg3, "--target", "1,2") == 2


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_target_success(tmp_path, cfg3, capsys):
    out = tmp_path / "sim"
    assert run_cli("simulate", "--config", cfg3, "--target", "2/5,2/5,2/5",
                   "--trials", "10", "--seed", "3", "--out", str(out)) == 0
    assert "success 10/10" in capsys.readouterr().out
    summary = json.loads((out / "summary.json").read_text())
    assert summary["successes"] == 10
    assert summary["achieved_dof"] == ["2/5", "2/5", "2/5"]
    lines = (out / "trials.csv").read_text().splitlines()
    assert lines[0] == ("trial,seed,success,residual_rx1,residual_rx2,"
                        "residual_rx3,success_rx1,success_rx2,success_rx3")
    assert len(lines) == 11
    assert (out / "residuals.png").stat().st_size > 0


def test_simulate_explicit_plan(tmp_path, cfg3):
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps(
        {"Q": [2, 2, 2], "T": [1, 1, 1], "T2": 2, "B": 1, "trunc": [1, 1, 1]}
    ))
    out = tmp_path / "sim"
    assert run_cli("simulate", "--config", cfg3, "--plan", str(plan_path),
                   "--trials", "5", "--out", str(out)) == 0


def test_simulate_infeasible_plan_exit_code(tmp_path, cfg3, capsys):
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(json.dumps(
        {"Q": [2, 2, 2], "T": [1, 1, 1], "T2": 1, "B": 1, "trunc": [1, 1, 1]}
    ))
    assert run_cli("simulate", "--config", cfg3, "--plan", str(plan_path),
                   "--trials", "5", "--out", str(tmp_path / "x")) == 3
    assert "receiver 1" in capsys.readouterr().err


def test_simulate_needs_exactly_one_source(cfg3, tmp_path):
    assert run_cli("simulate", "--config", cfg3, "--out", str(tmp_path)) == 2


def test_simulate_noise_failure_exit_code(tmp_path, cfg3):
    out = tmp_path / "noisy"
    code = run_cli("simulate", "--config", cfg3, "--target", "2/5,2/5,2/5",
                   "--trials", "5", "--noise-std", "0.5", "--out", str(out))
    assert code == 4


# ---------------------------------------------------------------------------
# determinism and plumbing
# ---------------------------------------------------------------------------


def test_outputs_byte_identical_across_runs(tmp_path, cfg3):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert run_cli("simulate", "--config", cfg3, "--target", "2/5,2/5,2/5",
                       "--trials", "8", "--seed", "21", "--out", str(out)) == 0
        assert run_cli("curve", "--out", str(out)) == 0
        assert run_cli("region", "--config", cfg3, "--out", str(out)) == 0
    for name in ("summary.json", "trials.csv", "curve.csv",
                 "region_delayed.json", "vertices_delayed.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_missing_config_file_exit_code(tmp_path):
    assert run_cli("region", "--config", str(tmp_path / "nope.json")) == 2


def test_invalid_config_content(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"M": 0, "N": [1, 1]}))
    assert run_cli("region", "--config", str(cfg)) == 2


def test_config_flag_required(cfg3):
    with pytest.raises(SystemExit) as err:
        run_cli("region")
    assert err.value.code == 2


def test_console_entry_point(cfg3, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bcdof", "plan", "--config", cfg3,
         "--target", "2/5,2/5,2/5", "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "beta = 5" in proc.stdout
