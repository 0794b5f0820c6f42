import csv
import io
import json
import subprocess
import sys

import pytest

from frobkern.cli import (
    SuiteConfig,
    VerificationReport,
    bn_expected,
    emit_report,
    exit_code,
    main,
    report_from_json,
    run_suite,
)


def run_cli(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--output", str(out)])
    return code, out.read_bytes()


def test_empty_report():
    rep = VerificationReport({"suite": "thm21"}, [])
    body = json.loads(emit_report(rep))
    assert body["overall"] is True and body["items"] == []
    assert exit_code(rep) == 0


def test_one_failing_item():
    item = {"suite": "thm21", "context": {"kind": "gl", "n": 2, "p": 2, "r": 1, "module": "m", "degree": 0},
            "dims": None, "expected": None, "pass": False, "status": "fail", "detail": {}}
    rep = VerificationReport({"suite": "thm21"}, [item])
    assert json.loads(emit_report(rep))["overall"] is False
    assert exit_code(rep) == 1
    assert exit_code(VerificationReport({"suite": "explore"}, [item])) == 0


def test_schema():
    rep, code = run_suite(SuiteConfig("thm21", kind="gl", n=2, primes=(3,), dmax=2))
    body = json.loads(emit_report(rep))
    assert code == 0
    assert set(body) == {"version", "config", "items", "overall"}
    it = body["items"][0]
    assert set(it["context"]) == {"kind", "n", "p", "r", "module", "degree"}
    assert set(it["dims"]) == {"der", "rder", "inner", "inv", "h1"}
    assert {"suite", "expected", "pass"} <= set(it)
    assert body["config"]["seed"] == 0


def test_thm21_example(tmp_path):
    code, data = run_cli(tmp_path, "verify", "thm21", "--kind", "gl", "--n", "2", "--p", "2,3,5", "--dmax", "8")
    body = json.loads(data)
    assert code == 0 and body["overall"]
    assert len(body["items"]) == 27
    assert all(it["dims"]["h1"] == 0 for it in body["items"])


def test_bn_example(tmp_path):
    code, data = run_cli(tmp_path, "verify", "bn-criteria", "--kind", "sl", "--n", "2", "--p", "3",
                         "--r", "1", "--imax", "12")
    assert code == 0
    items = json.loads(data)["items"]
    nat = [it for it in items if it["context"]["module"] == f"S^{it['context']['degree']}V"]
    assert [it["context"]["degree"] for it in nat if it["dims"]["h1"]] == [1, 4, 7, 10]


def test_hypothesis_failure_is_skipped(tmp_path):
    code, data = run_cli(tmp_path, "verify", "thm21", "--kind", "sl", "--n", "3", "--p", "3", "--dmax", "4")
    body = json.loads(data)
    assert code == 0
    assert [it["status"] for it in body["items"]] == ["skipped"]
    assert "(H3)" in body["items"][0]["detail"]["reason"]


def test_sp_char2_skipped(tmp_path):
    code, data = run_cli(tmp_path, "verify", "bn-criteria", "--kind", "sp", "--n", "2", "--p", "2",
                         "--imax", "5")
    body = json.loads(data)
    assert code == 0
    assert body["items"] and all(it["status"] == "skipped" for it in body["items"])


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
    assert main(["verify", "thm21", "--kind", "nonsense", "--dmax", "1", "--output", "/dev/null"]) == 2
    assert main(["verify", "thm21", "--dmax", "-1", "--output", "/dev/null"]) == 2


def test_bn_expected_table():
    assert [i for i in range(13) if bn_expected("sl", 2, 3, 1, i)] == [1, 4, 7, 10]
    assert [i for i in range(7) if bn_expected("sl", 2, 2, 2, i)] == [0, 2, 4, 6]
    assert [i for i in range(9) if bn_expected("sl", 3, 2, 1, i)] == [1, 3, 5, 7]
    assert not any(bn_expected("gl", 3, 2, 1, i) for i in range(9))


@pytest.mark.parametrize("fmt", ["json", "csv", "text"])
def test_deterministic_in_process(fmt):
    cfg = SuiteConfig("lemma11", kind="gl", n=2, primes=(2, 3), dmax=4, fmt=fmt)
    a = emit_report(run_suite(cfg)[0], fmt)
    b = emit_report(run_suite(cfg)[0], fmt)
    assert a == b


def test_deterministic_across_processes():
    cmd = [sys.executable, "-m", "frobkern.cli", "verify", "thm22", "--kind", "gl", "--n", "2",
           "--p", "2,3", "--dmax", "4"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["overall"]


def test_timings_are_a_side_field(tmp_path):
    _, data = run_cli(tmp_path, "verify", "thm21", "--p", "2", "--dmax", "1", "--timings")
    body = json.loads(data)
    assert "timings" in body
    body.pop("timings")
    _, plain = run_cli(tmp_path, "verify", "thm21", "--p", "2", "--dmax", "1")
    assert body == json.loads(plain)


def test_csv_and_report_roundtrip(tmp_path):
    _, data = run_cli(tmp_path, "verify", "thm21", "--p", "3", "--dmax", "2")
    rep = report_from_json(json.loads(data))
    assert emit_report(rep) == data
    rows = list(csv.DictReader(io.StringIO(emit_report(rep, "csv").decode())))
    assert len(rows) == 3 and all(r["h1"] == "0" and r["pass"] == "True" for r in rows)
    path = tmp_path / "r.json"
    path.write_bytes(data)
    assert main(["report", str(path), "--format", "text"]) == 0
    assert main(["report", str(tmp_path / "missing.json")]) == 2


def test_h1_and_scan(tmp_path):
    code, data = run_cli(tmp_path, "h1", "--kind", "sl", "--n", "2", "--p", "2", "--module", "trivial")
    assert code == 0 and json.loads(data)["items"][0]["dims"]["h1"] == 2
    code, data = run_cli(tmp_path, "scan", "--kind", "sl,gl", "--n", "2", "--p", "2,3", "--dmax", "6")
    nonzero = json.loads(data)["config"]["nonzero"]
    assert code == 0 and nonzero
    assert ["sl", 3, 2] in nonzero


def test_colimit_suites(tmp_path):
    for suite in ("thm31", "thm32"):
        code, data = run_cli(tmp_path, "verify", suite, "--dmax", "2", "--budget", "4")
        assert code == 0 and json.loads(data)["overall"]


def test_explore_always_exits_zero(tmp_path):
    code, data = run_cli(tmp_path, "verify", "explore", "--kind", "sl", "--n", "2", "--p", "2", "--dmax", "3")
    assert code == 0
    assert all(it["status"] == "info" for it in json.loads(data)["items"])
