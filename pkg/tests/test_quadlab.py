"""Tests for the quadlab command line."""

import json

import pytest

from quadlab import ExperimentConfig, main, run_command
from report import CSV_META_PREFIX, read_csv


@pytest.fixture(autouse=True)
def no_output_dir(monkeypatch):
    monkeypatch.delenv("QUADLAB_OUTPUT_DIR", raising=False)


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_count(capsys):
    out = run_json(capsys, ["count", "--genus", "1", "--edges", "3"])
    assert out["gtrees"] == "30"
    assert out["quadrangulations"] == "20"
    assert out["metadata"]["mode"] == "exact"
    assert out["metadata"]["config"]["n_edges"] == 3


def test_count_float(capsys):
    out = run_json(capsys, ["count", "--edges", "50", "--mode", "float"])
    assert "quadrangulations" not in out
    assert float(out["gtrees"]) > 0


def test_tg(capsys):
    out = run_json(capsys, ["tg", "--genus", "1"])
    assert out["rational_part"] == "2/3"
    assert out["t_g"].startswith("0.041666666")


def test_tg_with_monte_carlo_and_ratio(capsys):
    out = run_json(capsys, ["tg", "--mc-samples", "1000", "--ratio-edges", "4,8", "--seed", "3"])
    assert out["upsilon"]["t_g_estimate"] == pytest.approx(12 * out["upsilon"]["estimate"])
    assert [r["n"] for r in out["ratio"]["rows"]] == [4, 8]


def test_enumerate_to_file(tmp_path, capsys):
    path = tmp_path / "trees.json"
    assert main(["enumerate", "--edges", "3", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["count"] == 30
    assert len(data["trees"]) == 30
    assert ">>> TREES JSON" in capsys.readouterr().err


def test_sample_and_quadrangulate(capsys):
    out = run_json(capsys, ["sample", "--edges", "20", "--count", "3", "--seed", "5"])
    assert [s["index"] for s in out["samples"]] == [0, 1, 2]
    assert all(s["n_edges"] == 20 for s in out["samples"])
    out = run_json(capsys, ["quadrangulate", "--edges", "20", "--seed", "5"])
    assert out["quadrangulation"]["map"]["n_edges"] == 40


def test_stats_csv_is_deterministic(tmp_path, capsys):
    argv = ["stats", "--edges", "30", "--count", "4", "--seed", "1", "--format", "csv"]
    first, second = tmp_path / "a" / "d.csv", tmp_path / "b" / "d.csv"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().startswith(CSV_META_PREFIX)
    rows = read_csv(first)
    assert len(rows) == 4 and set(rows[0]) == {"n", "seed", "value"}
    profile = read_csv(first.with_name("d_profile.csv"))
    assert int(profile[0]["count"]) == 4


def test_stats_json_summary(capsys):
    out = run_json(capsys, ["stats", "--edges", "20", "--count", "4", "--seed", "2"])
    assert out["summary"]["n"] == 4
    assert out["split_halves"]["n_a"] == 2


def test_dimension_control(capsys):
    out = run_json(capsys, ["dimension", "--control-side", "80", "--radii", "8,11,16,22,30",
                            "--centers", "2"])
    assert out["radii"] == [8, 11, 16, 22, 30]
    assert 1.8 <= out["slope"] <= 2.2


def test_check_passes(capsys):
    out = run_json(capsys, ["check", "--edges", "3"])
    assert out["schema"] == "checks"
    assert all(r["ok"] for r in out["rows"])


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QUADLAB_OUTPUT_DIR", str(tmp_path))
    assert main(["count", "--edges", "3", "--seed", "9"]) == 0
    assert json.loads((tmp_path / "count_g1_n3_s9.json").read_text())["gtrees"] == "30"


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--genus", "0", "--edges", "3"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--edges", "3", "--count", "-1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["count", "--edges", "3", "--format", "csv"])
    assert exc.value.code == 2
    assert main(["dimension", "--control-side", "2"]) == 2
    assert "Error:" in capsys.readouterr().out


def test_domain_errors_exit_1(capsys):
    assert main(["enumerate", "--edges", "9"]) == 1
    assert "Error:" in capsys.readouterr().out


def test_no_command_prints_help(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().out


def test_config_echo_leaves_out_run_details():
    cfg = ExperimentConfig(command="count", n_edges=3, workers=8)
    d = cfg.to_dict()
    assert "workers" not in d and "out" not in d
    assert run_command(cfg) == 0
