import json
import subprocess
import sys
from pathlib import Path

import pytest

from lgd.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, dispatch, main, render

GOLDEN = Path(__file__).parent / "golden" / "table_p23.json"


def run(*argv):
    out, code = dispatch(list(argv))
    return out, code


def run_json(*argv):
    out, code = run(*argv, "--no-meta")
    return json.loads(out), code


def test_table_matches_golden_bytes():
    out, code = run("table", "--p-max", "23", "--no-meta")
    assert code == EXIT_OK
    assert out == GOLDEN.read_text()


def test_table_rows():
    body, code = run_json("table", "--p-max", "23")
    assert code == EXIT_OK
    assert body["schema"] == "lgd/1"
    assert [r["d"] for r in body["rows"]] == [1, 4, 3, 5, 12, 32, 9, 33]
    assert [r["p"] for r in body["rows"]] == [3, 5, 7, 11, 13, 17, 19, 23]


def test_table_text_header():
    out, code = run("table", "--p-max", "7", "--format", "text", "--no-meta")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split() == ["p", "d", "disc", "f", "case", "h", "u"]
    assert lines[1].split()[:2] == ["3", "1"]
    assert lines[-1].startswith("# ")


def test_min_degree_p7():
    body, code = run_json("min-degree", "--p", "7")
    assert code == EXIT_OK
    assert {k: body[k] for k in ("p", "d", "disc", "f", "case")} == {
        "p": 7,
        "d": 3,
        "disc": -7,
        "f": 1,
        "case": "ramified",
    }


def test_verify_inert_p3():
    body, code = run_json("verify", "inert", "--p", "3")
    assert code == EXIT_OK
    assert body["failures"] == []
    assert body["pass"] is True


def test_verify_failure_exit_code():
    body, code = run_json("verify", "closed-forms", "--p", "3", "--case", "ramified")
    assert code == EXIT_FAIL
    assert len(body["failures"]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "split", "--p", "3", "--n", "2", "--budget", "3"],
        ["verify", "ramified", "--p", "5", "--budget", "0"],
        ["verify", "reduce-to-c", "--p", "3", "--n", "1", "--delta", "2"],
        ["verify", "closed-forms", "--p", "5"],
        ["h1star", "--p", "3", "--n", "2", "--delta", "2"],
        ["class-number", "--disc", "-20"],
        ["gonality", "--p", "17"],
    ],
)
def test_success_exit_codes(argv):
    _, code = run(*argv, "--no-meta")
    assert code == EXIT_OK


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["table"],
        ["table", "--p-max", "2"],
        ["min-degree"],
        ["min-degree", "--p", "9"],
        ["min-degree", "--p", "2"],
        ["verify", "inert"],
        ["verify", "reduce-to-c", "--p", "3"],
        ["verify", "closed-forms", "--p", "3", "--delta", "1"],
        ["h1star", "--p", "3", "--gens", "1;0;0"],
        ["h1star", "--p", "3", "--gens", "3;0;0;1"],
        ["h1star", "--p", "3", "--gens", "a;0;0;1"],
        ["h1star", "--p", "3", "--n", "0"],
        ["class-number", "--disc", "-5"],
        ["class-number", "--disc", "12"],
        ["gonality"],
        ["table", "--p-max", "7", "--unknown"],
        ["table", "--p-max", "7", "--format", "xml"],
    ],
)
def test_usage_errors(argv):
    out, code = run(*argv)
    assert code == EXIT_USAGE
    assert out.startswith("lgd: error:")


def test_h1star_normalizer_and_gens():
    body, _ = run_json("h1star", "--p", "3", "--n", "2", "--delta", "2")
    assert body["order"] == 144
    assert body["group"] == "normalizer"
    body, _ = run_json("h1star", "--p", "3", "--n", "2", "--gens", "8;0;0;1,4;0;0;4,1;3;6;1")
    assert body["order"] == 18
    assert body["h1_star"] == [3]
    assert body["h1_star_trivial"] is False


def test_class_number_output():
    body, _ = run_json("class-number", "--disc", "-20")
    assert body["h"] == 2
    assert body["forms"] == [[1, 0, 5], [2, 2, 3]]


def test_gonality_output():
    body, _ = run_json("gonality", "--p", "17")
    assert body["value"] == "1071/50" and body["passes"] is True
    body, _ = run_json("gonality", "--p", "13")
    assert body["passes"] is False


def test_no_meta_is_deterministic_and_meta_is_separate():
    a, _ = run("verify", "split", "--p", "3", "--no-meta")
    b, _ = run("verify", "split", "--p", "3", "--no-meta")
    assert a == b
    with_meta, _ = run("verify", "split", "--p", "3")
    body = json.loads(with_meta)
    meta = body.pop("meta")
    assert set(meta) == {"generated", "elapsed_s", "version"}
    assert body == json.loads(a)


def test_json_keys_sorted():
    out, _ = run("min-degree", "--p", "5", "--no-meta")
    assert out == json.dumps(json.loads(out), sort_keys=True, indent=2) + "\n"


def test_render_empty_failures():
    assert '"failures": []' in render({"failures": []})


def test_main_streams(capsys):
    assert main(["gonality", "--p", "3", "--no-meta"]) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passes"] is False and captured.err == ""
    assert main(["gonality"]) == EXIT_USAGE
    captured = capsys.readouterr()
    assert captured.out == "" and "error" in captured.err


def test_console_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lgd", "min-degree", "--p", "19", "--no-meta"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["d"] == 9


def test_all_ramified_flag():
    body, code = run_json("min-degree", "--p", "17", "--all-ramified")
    assert code == EXIT_OK
    assert (body["d"], body["disc"]) == (16, -51)
    assert body["caveat"] != run_json("min-degree", "--p", "17")[0]["caveat"]
