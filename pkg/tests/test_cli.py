import json

import pytest

from adiabatic_pathways import cli


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    code = cli.main(["run", "--method", "de", "--R", "2", "--de-G-max", "3", "--out", str(out)])
    assert code == 0
    assert (out / "runs.csv").exists() and (out / "run1_history.csv").exists()
    summary = json.loads(capsys.readouterr().out)
    assert summary["aggregate"]["runs"] == 2


def test_config_file_with_flag_override(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"problem": "grover", "n": 2, "method": "linear", "T": 9.0}))
    assert cli.main(["run", "--config", str(path), "--T", "2.0", "--out", str(tmp_path / "o")]) == 0
    cfg = json.loads((tmp_path / "o" / "config.json").read_text())
    assert cfg["T"] == 2.0 and cfg["n"] == 2 and cfg["method"] == "linear"


@pytest.mark.parametrize("argv", [
    ["run", "--method", "rc"],
    ["run", "--T", "-1"],
    ["run", "--config", "/nonexistent/c.json"],
    ["run", "--de-P", "2"],
])
def test_config_errors_exit_1(argv, capsys):
    assert cli.main(argv) == 1
    assert "config error" in capsys.readouterr().err


def test_bad_json_exit_1(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    assert cli.main(["run", "--config", str(path)]) == 1


def test_scan_cap_exit_2(capsys):
    assert cli.main(["min-time-scan", "--method", "linear", "--max-steps", "1"]) == 2
    assert "scan" in capsys.readouterr().err


def test_grid_scan_prints_rows(capsys):
    argv = ["grid-scan", "--method", "linear", "--T-values", "1,2", "--alpha-values", "0.1"]
    assert cli.main(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("T,alpha,F_mean") and len(lines) == 3


def test_qubit_scaling_subcommand(tmp_path, capsys):
    argv = ["qubit-scaling", "--methods", "linear,rc", "--n-range", "1-2", "--reduced", "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    assert (tmp_path / "scaling_linear.csv").exists() and (tmp_path / "scaling_rc.csv").exists()


def test_timing_subcommand(tmp_path, capsys):
    argv = ["timing", "--methods", "dmorph", "--n-range", "1", "--repeats", "1", "--dm-G-max", "3",
            "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    head = (tmp_path / "timing.csv").read_text().splitlines()[0]
    assert head == "n,method,time_per_iteration,total_time,iterations"


def test_every_config_field_has_a_flag():
    from dataclasses import fields

    from adiabatic_pathways.bench import ScenarioConfig
    parser = cli.make_parser()
    run = parser._subparsers._group_actions[0].choices["run"]
    dests = {a.dest for a in run._actions}
    for f in fields(ScenarioConfig):
        if f.name in ("de", "dmorph"):
            assert any(d.startswith("de_" if f.name == "de" else "dm_") for d in dests)
        else:
            assert f.name in dests
