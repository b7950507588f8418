"""Command line front end: subcommands, outputs, exit codes."""

import json

import pytest

from blimpsim import read_trace
from blimpsim.cli import main


@pytest.fixture
def scenario_file(tmp_path):
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps({
        "duration": 1.0,
        "seed": 0,
        "pilot": {"type": "chaotic"},
    }))
    return str(p)


def test_run_writes_trace_and_prints_metrics(scenario_file, tmp_path, capsys):
    out = str(tmp_path / "trace.csv")
    assert main(["run", "--scenario", scenario_file, "--out", out]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) >= {"rms_omega_z", "rms_tilt_rate", "peak_omega_z"}
    tr = read_trace(out)
    assert len(tr) == 100
    meta = json.load(open(str(tmp_path / "trace.meta.json")))
    assert meta["seed"] == 0 and meta["assist"] == "on"


def test_run_overrides(scenario_file, tmp_path):
    out = str(tmp_path / "off.csv")
    assert main(["run", "--scenario", scenario_file, "--out", out,
                 "--assist", "off", "--seed", "5"]) == 0
    tr = read_trace(out)
    assert {r.mode for r in tr.records} == {"off"}
    meta = json.load(open(str(tmp_path / "off.meta.json")))
    assert meta["seed"] == 5 and meta["assist"] == "off"


def test_run_determinism_across_invocations(scenario_file, tmp_path):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["run", "--scenario", scenario_file, "--out", a]) == 0
    assert main(["run", "--scenario", scenario_file, "--out", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_compare_writes_report(scenario_file, tmp_path, capsys):
    out = str(tmp_path / "report.json")
    assert main(["compare", "--scenario", scenario_file, "--out", out]) == 0
    report = json.load(open(out))
    assert set(report) == {"assist_on", "assist_off", "rms_omega_ratio",
                           "rms_tilt_rate_ratio"}
    assert report["assist_on"]["rms_omega_z"] >= 0.0
    # the same report also lands on stdout
    assert json.loads(capsys.readouterr().out) == report


def test_metrics_of_existing_trace(scenario_file, tmp_path, capsys):
    out = str(tmp_path / "trace.csv")
    main(["run", "--scenario", scenario_file, "--out", out])
    capsys.readouterr()
    assert main(["metrics", "--trace", out]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["peak_omega_z"] > 0.0


def test_validation_error_exits_1(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dt": 0.5}))
    rc = main(["run", "--scenario", str(p), "--out", str(tmp_path / "t.csv")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    rc = main(["run", "--scenario", str(tmp_path / "nope.json"),
               "--out", str(tmp_path / "t.csv")])
    assert rc == 2
    assert "IO error" in capsys.readouterr().err


def test_bad_trace_exits_1(tmp_path, capsys):
    p = tmp_path / "garbage.csv"
    p.write_text("this,is,not,a,trace\n")
    assert main(["metrics", "--trace", str(p)]) == 1
    assert "error:" in capsys.readouterr().err
