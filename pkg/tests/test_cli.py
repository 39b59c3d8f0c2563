import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from comptest.cli import main

DATA = Path(__file__).resolve().parent.parent / "data" / "interior_light"
SRC = Path(__file__).resolve().parent.parent / "src"

SHEETS = ["--signals", str(DATA / "signals.csv"),
          "--statuses", str(DATA / "statuses.csv"),
          "--test", str(DATA / "test_interior_light.csv")]
STAND = ["--resources", str(DATA / "resources.csv"),
         "--connections", str(DATA / "connections.csv"),
         "--env", str(DATA / "stand.env")]

REPORT_SCHEMA = {
    "type": "object",
    "required": ["test", "dut", "overall", "aborted", "abort", "init",
                 "steps", "totals"],
    "properties": {
        "test": {"type": "string"},
        "dut": {"type": "string"},
        "overall": {"enum": ["pass", "fail"]},
        "aborted": {"type": "boolean"},
        "abort": {"type": ["object", "null"]},
        "init": {"type": ["object", "null"]},
        "steps": {"type": "array", "items": {
            "type": "object",
            "required": ["n", "dt", "t_end", "passed", "stimuli", "checks"],
            "properties": {
                "n": {"type": "integer"},
                "dt": {"type": "string"},
                "t_end": {"type": "string"},
                "passed": {"type": "boolean"},
                "stimuli": {"type": "array"},
                "checks": {"type": "array", "items": {
                    "type": "object",
                    "required": ["signal", "pin", "method", "min", "max",
                                 "measured", "passed"],
                }},
            },
        }},
        "totals": {"type": "object",
                   "required": ["steps_total", "steps_run", "steps_passed",
                                "checks_total", "checks_failed", "step_time",
                                "total_time"]},
    },
}


def test_check_demo_sheets(capsys):
    assert main(["check", *SHEETS]) == 0
    assert "0 violations" in capsys.readouterr().err


def test_check_reports_violations(tmp_path, capsys):
    bad = (DATA / "test_interior_light.csv").read_text(encoding="utf-8") \
        .replace(";Ho;", ";Hi;", 1)
    bad_path = tmp_path / "test.csv"
    bad_path.write_text(bad, encoding="utf-8")
    code = main(["check", *SHEETS[:4], "--test", str(bad_path)])
    err = capsys.readouterr().err
    assert code == 1
    assert "unknown status 'Hi'" in err
    assert "1 violation" in err


def test_check_missing_file_is_io_error(tmp_path, capsys):
    code = main(["check", *SHEETS[:4], "--test", str(tmp_path / "nope.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_compile_writes_golden_bytes(tmp_path, capsys):
    out = tmp_path / "script.xml"
    code = main(["compile", *SHEETS, "--name", "interior_light",
                 "--dut", "interior_light_ecu", "-o", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert out.read_bytes() == (DATA / "expected_script.xml").read_bytes()


def test_compile_to_stdout(capsys):
    code = main(["compile", *SHEETS, "--name", "interior_light",
                 "--dut", "interior_light_ecu"])
    assert code == 0
    assert capsys.readouterr().out == \
        (DATA / "expected_script.xml").read_text(encoding="utf-8")


def test_compile_invalid_sheets_writes_nothing(tmp_path, capsys):
    bad = (DATA / "test_interior_light.csv").read_text(encoding="utf-8") \
        .replace(";Ho;", ";Hi;", 1)
    bad_path = tmp_path / "test.csv"
    bad_path.write_text(bad, encoding="utf-8")
    out = tmp_path / "script.xml"
    code = main(["compile", *SHEETS[:4], "--test", str(bad_path),
                 "-o", str(out)])
    assert code == 1
    assert not out.exists()
    assert "unknown status" in capsys.readouterr().err


def test_compile_dot_dialect_gives_identical_bytes(tmp_path, capsys):
    from comptest import (CsvDialect, parse_signal_sheet, parse_status_sheet,
                          parse_test_sheet, serialize_signal_sheet,
                          serialize_status_sheet, serialize_test_sheet)
    dot = CsvDialect(decimal_separator=".")
    signals = parse_signal_sheet((DATA / "signals.csv").read_text("utf-8"))
    statuses = parse_status_sheet((DATA / "statuses.csv").read_text("utf-8"))
    test = parse_test_sheet(
        (DATA / "test_interior_light.csv").read_text("utf-8"))
    (tmp_path / "signals.csv").write_text(
        serialize_signal_sheet(signals, dot), encoding="utf-8")
    (tmp_path / "statuses.csv").write_text(
        serialize_status_sheet(statuses, dot), encoding="utf-8")
    (tmp_path / "test.csv").write_text(
        serialize_test_sheet(test, dot), encoding="utf-8")
    code = main(["compile",
                 "--signals", str(tmp_path / "signals.csv"),
                 "--statuses", str(tmp_path / "statuses.csv"),
                 "--test", str(tmp_path / "test.csv"),
                 "--dialect", "decimal=dot",
                 "--name", "interior_light", "--dut", "interior_light_ecu"])
    assert code == 0
    assert capsys.readouterr().out == \
        (DATA / "expected_script.xml").read_text(encoding="utf-8")


@pytest.fixture()
def script_path(tmp_path):
    out = tmp_path / "script.xml"
    assert main(["compile", *SHEETS, "--name", "interior_light",
                 "--dut", "interior_light_ecu", "-o", str(out)]) == 0
    return out


def test_run_passes(script_path, capsys):
    code = main(["run", "--script", str(script_path), *STAND])
    out = capsys.readouterr().out
    assert code == 0
    assert "RESULT: PASS" in out


def test_run_json_report_validates(script_path, capsys):
    code = main(["run", "--script", str(script_path), *STAND,
                 "--report", "json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["overall"] == "pass"


def test_run_without_dvm_exits_2(script_path, tmp_path, capsys):
    for name in ("resources.csv", "connections.csv"):
        reduced = "\n".join(
            line for line in
            (DATA / name).read_text(encoding="utf-8").splitlines()
            if not line.startswith("Ress1")) + "\n"
        (tmp_path / name).write_text(reduced, encoding="utf-8")
    code = main(["run", "--script", str(script_path),
                 "--resources", str(tmp_path / "resources.csv"),
                 "--connections", str(tmp_path / "connections.csv"),
                 "--env", str(DATA / "stand.env")])
    captured = capsys.readouterr()
    assert code == 2
    assert "get_u" in captured.err
    assert "aborted" in captured.out  # the report itself is still an artifact


def test_run_check_failure_exits_1(tmp_path, capsys):
    # A test expecting the lamp on during the day fails its check.
    day_fail = (
        "test step;Δt;DS_FL;NIGHT;INT_ILL;remarks\n"
        "0;0,5;Open;0;Ho;lamp cannot be on during the day\n")
    test_path = tmp_path / "test.csv"
    test_path.write_text(day_fail, encoding="utf-8")
    script = tmp_path / "script.xml"
    assert main(["compile", *SHEETS[:4], "--test", str(test_path),
                 "-o", str(script)]) == 0
    code = main(["run", "--script", str(script), *STAND])
    captured = capsys.readouterr()
    assert code == 1
    assert "RESULT: FAIL" in captured.out
    assert "check(s) failed" in captured.err


def test_run_report_to_file_keeps_stdout_clean(script_path, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["run", "--script", str(script_path), *STAND,
                 "--report", "json", "-o", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    jsonschema.validate(json.loads(out.read_text(encoding="utf-8")),
                        REPORT_SCHEMA)


def test_bad_dialect_flag(capsys):
    assert main(["check", *SHEETS, "--dialect", "bogus"]) == 2


def test_unknown_dut_exits_2(script_path, capsys):
    code = main(["run", "--script", str(script_path), *STAND,
                 "--dut", "flux_capacitor"])
    assert code == 2
    assert "unknown dut" in capsys.readouterr().err


def test_module_entry_point_smoke():
    env = dict(os.environ)
    env["PYTHONPATH"] = str(SRC) + os.pathsep + env.get("PYTHONPATH", "")
    proc = subprocess.run(
        [sys.executable, "-m", "comptest", "check", *SHEETS],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert "0 violations" in proc.stderr