"""Command-line behavior: output shape, exit codes, determinism."""

import json

import pytest

from toricres.cli import main

from conftest import FIXTURE_NAMES, problem_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_problem(tmp_path, data, name="case.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


PLAIN_SEGMENT = {
    "dimension": 1,
    "vertices": [[-1], [1]],
    "simplices": [[0, 1], [1, 2]],
    "bound": 2,
    "polynomial": [[1, [1, 0, 1]]],
}


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_validate_passes_on_fixtures(capsys, name):
    code, out, err = run(capsys, "validate", str(problem_path(name)))
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert lines[0].endswith(": validate")
    assert all(line.startswith("ok ") for line in lines[1:])


def test_validate_reports_failure_and_skips_later_stages(capsys, tmp_path):
    bad = dict(PLAIN_SEGMENT, simplices=[[0, 2], [1, 2]])
    code, out, err = run(capsys, "validate", write_problem(tmp_path, bad))
    assert code == 1
    lines = out.splitlines()[1:]
    statuses = [line.split()[0] for line in lines]
    assert statuses == ["ok", "FAIL", "-", "-", "-"]
    assert "overlap improperly" in lines[1]
    assert all(line.endswith("skipped") for line in lines[2:])


def test_validate_catches_empty_nef_part(capsys, tmp_path):
    bad = dict(PLAIN_SEGMENT, lifting=[1, 0, 1], nef_partition=[[0, 2], []])
    code, out, err = run(capsys, "validate", write_problem(tmp_path, bad))
    assert code == 1
    fail_line = next(l for l in out.splitlines() if l.startswith("FAIL"))
    assert "nef-partition" in fail_line and "empty part" in fail_line


def test_validate_report_format_is_canonical_json(capsys):
    code, out, err = run(capsys, "validate", str(problem_path("p1")),
                         "--format", "report")
    assert code == 0
    payload = json.loads(out)
    assert payload["command"] == "validate" and payload["ok"] is True
    assert [c["status"] for c in payload["checks"]] == ["ok"] * len(payload["checks"])
    assert out == json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------

def test_series_report_p1(capsys):
    code, out, err = run(capsys, "series", str(problem_path("p1")),
                         "--format", "report")
    assert code == 0
    payload = json.loads(out)
    assert payload["ample"] == [1, 1] and payload["v0"] is None
    assert [e["value"] for e in payload["entries"]] == ["1", "4", "16", "64"]
    assert [e["class"] for e in payload["entries"]] == [[k, k] for k in range(4)]
    assert [e["degree"] for e in payload["entries"]] == [0, 2, 4, 6]


def test_series_report_keeps_file_v0(capsys):
    code, out, err = run(capsys, "series", str(problem_path("nonreflexive")),
                         "--format", "report")
    payload = json.loads(out)
    assert payload["v0"] == [-1, -1, -2]
    assert [e["value"] for e in payload["entries"]] == [str(4 ** k) for k in range(7)]


def test_series_bound_flag_truncates(capsys):
    code, out, err = run(capsys, "series", str(problem_path("p1")),
                         "--bound", "0", "--format", "report")
    assert code == 0
    assert [e["value"] for e in json.loads(out)["entries"]] == ["1"]


def test_series_output_is_deterministic(capsys):
    first = run(capsys, "series", str(problem_path("p2")))
    second = run(capsys, "series", str(problem_path("p2")))
    assert first == second and first[0] == 0


def test_series_rejects_malformed_v0_flag(capsys):
    code, out, err = run(capsys, "series", str(problem_path("p1")),
                         "--v0", "a,b")
    assert code == 1
    assert "comma-separated integers" in err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_verify_passes_on_fixtures(capsys, name):
    code, out, err = run(capsys, "verify", str(problem_path(name)))
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert all(line.startswith("ok ") for line in lines[1:])
    names = {line.split()[1] for line in lines[1:]}
    assert {"hessian-normalization", "ideal-vanishing",
            "series-pushout-agreement", "completion-independence"} <= names


def test_verify_nef_fixtures_run_the_cayley_battery(capsys):
    code, out, err = run(capsys, "verify", str(problem_path("square_r2")))
    assert code == 0
    names = {line.split()[1] for line in out.splitlines()[1:]}
    assert {"pushforward-substitution", "evaluation-compatibility",
            "mixed-volume-theorem"} <= names


def test_verify_is_stable_under_jobs_and_seed(capsys):
    base = run(capsys, "verify", str(problem_path("p2")))
    jobs = run(capsys, "verify", str(problem_path("p2")), "--jobs", "4")
    seeded = run(capsys, "verify", str(problem_path("p2")), "--seed", "17")
    assert base == jobs == seeded


# ---------------------------------------------------------------------------
# mixed-volume
# ---------------------------------------------------------------------------

def test_mixed_volume_table_output(capsys):
    code, out, err = run(capsys, "mixed-volume", str(problem_path("square_r2")))
    assert code == 0
    rows = out.splitlines()[2:]
    assert [r.split() for r in rows] == [
        ["(0,", "2)", "0"], ["(1,", "1)", "4"], ["(2,", "0)", "0"],
    ]


def test_mixed_volume_needs_a_partition(capsys, tmp_path):
    path = write_problem(tmp_path, PLAIN_SEGMENT)
    code, out, err = run(capsys, "mixed-volume", path)
    assert code == 2
    assert "needs a problem file with a nef_partition" in err


# ---------------------------------------------------------------------------
# usage errors
# ---------------------------------------------------------------------------

def test_unreadable_file_is_a_usage_error(capsys, tmp_path):
    code, out, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2 and err.startswith("error:")


def test_broken_json_is_a_usage_error(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{oops")
    code, out, err = run(capsys, "validate", str(path))
    assert code == 2 and "error:" in err


def test_schema_violation_is_a_check_failure(capsys, tmp_path):
    bad = dict(PLAIN_SEGMENT)
    del bad["bound"]
    code, out, err = run(capsys, "validate", write_problem(tmp_path, bad))
    assert code == 1
    assert "missing the 'bound' field" in err
