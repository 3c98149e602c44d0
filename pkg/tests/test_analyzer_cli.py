import json
import subprocess
import sys

import pytest

from wifn import DATA
from wifn.analyzer import analyze, render_json, render_text, report_from_json
from wifn.cli import main
from wifn.lattice import SecurityLevel

L = SecurityLevel.of


@pytest.fixture(scope="module")
def nsl_report():
    return analyze(DATA / "nsl.ctx", DATA / "nsl.proto")


def test_explicit_roles_give_same_report(nsl_report):
    assert analyze(DATA / "nsl.ctx", DATA / "nsl.proto", DATA / "nsl.roles") == nsl_report


def test_json_round_trip(nsl_report):
    text = render_json(nsl_report)
    assert report_from_json(text) == nsl_report
    data = json.loads(text)
    assert data["overall"] == "NotIncreasing"
    assert {r["atom"]: r["verdict"] for r in data["rows"]} == {
        "Na@s": "pass", "?X": "fail", "?Y": "fail", "Nb@s": "pass"}


def test_text_report_never_claims_an_attack(nsl_report):
    text = render_text(nsl_report)
    assert "does not by itself establish an attack" in text
    assert "\x1b[" not in text
    assert "\x1b[31m" in render_text(nsl_report, color=True)


def test_flawed_cases_are_reported():
    report = analyze(DATA / "woolam.ctx", DATA / "woolam_flawed.proto")
    u = report.row("?U")
    assert [(c.key, c.passed) for c in u.cases] == [("kbs", True), ("kas", False)]
    assert "case key kas" in render_text(report)


def test_theory_override():
    report = analyze(DATA / "nsl.ctx", DATA / "nsl.proto", theory="empty")
    assert report.theory.value == "empty"


@pytest.mark.parametrize("proto,code", [
    ("nsl.proto", 1), ("nsl_hash.proto", 0), ("woolam_amended.proto", 0), ("woolam_flawed.proto", 1),
])
def test_cli_exit_codes(proto, code, capsys):
    assert main(["analyze", "--protocol", str(DATA / proto)]) == code
    assert "Overall:" in capsys.readouterr().out


def test_cli_json_to_file(tmp_path):
    out = tmp_path / "r.json"
    code = main(["analyze", "--context", str(DATA / "nsl.ctx"), "--protocol", str(DATA / "nsl.proto"),
                 "--format", "json", "--out", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["protocol"] == "NSL"


def test_cli_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.proto"
    bad.write_text("protocol P\nprincipals A, B\nstep 1: A -> B : {x\n")
    assert main(["analyze", "--context", str(DATA / "nsl.ctx"), "--protocol", str(bad)]) == 2
    assert "3:" in capsys.readouterr().err
    assert main(["analyze", "--protocol", str(tmp_path / "missing.proto")]) == 2
    bad.write_text("protocol P\nprincipals A, B\nstep 1: A -> B : x\n")
    assert main(["analyze", "--protocol", str(bad)]) == 2
    assert main(["frobnicate"]) == 2


def test_color_follows_environment():
    cmd = [sys.executable, "-m", "wifn.cli", "analyze", "--protocol", str(DATA / "nsl.proto")]
    proc = subprocess.run(cmd, capture_output=True, text=True, env={"WIFN_COLOR": "1", "PATH": ""})
    assert proc.returncode == 1
    assert "\x1b[" not in proc.stdout  # not a tty
