import json
import subprocess
import sys

import pytest

from chernint.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# verify -------------------------------------------------------------------


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == EXIT_OK
    for cid in ("chpsi", "graded", "mainvp", "toddp", "inv-series", "prop-st", "cartan", "degf", "pipelines-agree"):
        assert cid in out


def test_verify_inv_series(capsys):
    code, out, _ = run(capsys, "verify", "inv-series", "--p", "2", "--N", "16")
    assert code == EXIT_OK
    assert out.startswith("inv-series: ok")


def test_verify_mainvp_single_variety(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "mainvp", "--p", "2", "--variety", "P2xP2")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["status"] == "ok" and data["failures"] == [] and data["seed"] == 0
    assert data["cases"] > 0
    assert set(data) >= {"check", "params", "cases", "failures", "status", "seed"}


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "nonsense"],
        ["verify"],
        ["verify", "inv-series", "--p", "4"],
        ["verify", "inv-series", "--p", "x"],
        ["verify", "chpsi", "--records", "x.json"],
        ["verify", "inv-series", "--bogus"],
    ],
)
def test_verify_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err


def test_verify_timing_and_seed_flags(capsys):
    code, out, _ = run(capsys, "verify", "chpsi", "--variety", "P1", "--timing", "--seed", "7")
    assert code == EXIT_OK and " ms" in out
    code, out, _ = run(capsys, "verify", "chpsi", "--variety", "P1", "--format", "json", "--timing")
    assert "elapsed_ms" in json.loads(out)


def test_verify_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "verify", "graded", "--variety", "P2")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "check,status,cases,seed,case,lhs,rhs"


def test_verify_quiet(capsys):
    code, out, _ = run(capsys, "--quiet", "verify", "graded", "--variety", "P1")
    assert code == EXIT_OK and out == ""


def test_verify_degf_with_violating_records(capsys, tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"varieties": [{"name": "bad", "dim": 1, "chi": 1, "index": 4}]}))
    code, _, _ = run(capsys, "verify", "degf", "--p", "2", "--max-dim", "2", "--records", str(path))
    assert code == EXIT_FAIL


def _subprocess(*argv):
    return subprocess.run(
        [sys.executable, "-m", "chernint.cli", *argv], capture_output=True, check=False
    )


def test_verify_output_is_byte_identical_across_runs():
    argv = ("--format", "json", "--seed", "3", "verify", "toddp", "--p", "2", "--variety", "P2xP1", "--samples", "5")
    a, b = _subprocess(*argv), _subprocess(*argv)
    assert a.returncode == b.returncode == EXIT_OK
    assert a.stdout == b.stdout and a.stdout


def test_seed_is_recorded(capsys):
    outs = []
    for seed in ("0", "1"):
        argv = ["--format", "json", "--seed", seed, "verify", "toddp", "--p", "3", "--variety", "P3", "--samples", "3"]
        code, out, _ = run(capsys, *argv)
        assert code == EXIT_OK
        outs.append(json.loads(out))
    assert outs[0]["seed"] == 0 and outs[1]["seed"] == 1


# compute ------------------------------------------------------------------


def test_compute_examples(capsys):
    code, out, _ = run(capsys, "compute", "--variety", "P2", "--expr", "chh(OL(2))")
    assert code == EXIT_OK
    assert out.splitlines() == ["ch_2 = 1", "ch_1 = 3/2*h1", "ch_0 = h1^2"]
    code, out, _ = run(capsys, "compute", "--variety", "P4", "--expr", "Tp(h1)", "--mod", "2")
    assert code == EXIT_OK and out.strip() == "h1 + h1^2 + h1^4"
    code, out, _ = run(capsys, "compute", "--variety", "P0", "--expr", "1")
    assert code == EXIT_OK and out.strip() == "1"


def test_compute_json(capsys):
    code, out, _ = run(capsys, "compute", "--variety", "P2", "--expr", "3*h1^2", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["variety"] == "P2"
    assert data["terms"] == [{"exp": [2], "coef": "3"}]


def test_compute_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "compute", "--variety", "P2", "--expr", "h1 + 2*h1^2")
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["compute", "--variety", "P2", "--expr", "O(1"],
        ["compute", "--variety", "P2", "--expr", "h3"],
        ["compute", "--variety", "Q2", "--expr", "1"],
        ["compute", "--variety", "P2", "--expr", "h1", "--mod", "6"],
        ["compute", "--variety", "P2"],
    ],
)
def test_compute_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err


def test_compute_syntax_error_caret(capsys):
    code, _, err = run(capsys, "compute", "--variety", "P2", "--expr", "O(1")
    assert code == EXIT_USAGE
    assert "offset 3" in err and "O(1\n   ^" in err


# table --------------------------------------------------------------------


def _column(out, k=1):
    return [line.split()[k] for line in out.strip().splitlines()[1:]]


def test_table_examples(capsys):
    code, out, _ = run(capsys, "table", "todd-numbers", "--max", "4")
    assert code == EXIT_OK and _column(out) == ["1", "2", "12", "24", "720"]
    code, out, _ = run(capsys, "table", "r-series", "--p", "3", "--max-deg", "8")
    assert code == EXIT_OK
    assert _column(out, 0) == ["0", "2", "8"] and _column(out) == ["1", "-1", "1"]
    code, out, _ = run(capsys, "table", "todd-series", "--max-deg", "4")
    assert code == EXIT_OK and _column(out) == ["1", "1/2", "1/12", "0", "-1/720"]


def test_table_json_and_csv(capsys):
    code, out, _ = run(capsys, "--format", "json", "table", "todd-series", "--max-deg", "2")
    assert json.loads(out) == [
        {"degree": 0, "coefficient": "1"},
        {"degree": 1, "coefficient": "1/2"},
        {"degree": 2, "coefficient": "1/12"},
    ]
    code, out, _ = run(capsys, "--format", "csv", "table", "todd-numbers", "--max", "2")
    assert out == "d,tau\n0,1\n1,2\n2,12\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["table", "r-series", "--max-deg", "4"],
        ["table", "r-series", "--p", "4"],
        ["table", "todd-numbers", "--max", "-1"],
        ["table", "bernoulli"],
    ],
)
def test_table_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


# degree -------------------------------------------------------------------


def test_degree_sample(capsys):
    code, out, _ = run(capsys, "degree", "--sample", "--p", "3")
    assert code == EXIT_FAIL
    lines = [line for line in out.splitlines() if not line.startswith("  ")]
    assert [line.split(": ", 1)[1].split("  ")[0] for line in lines] == [
        "strongly p-incompressible",
        "consistent",
        "VIOLATES",
    ]


def test_degree_violation_exit(capsys, tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"varieties": [{"name": "bad", "dim": 1, "chi": 1, "index": 4}]}))
    code, out, _ = run(capsys, "degree", str(path), "--p", "2")
    assert code == EXIT_FAIL and "VIOLATES" in out


def test_degree_consistent_exit(capsys, tmp_path):
    path = tmp_path / "r.json"
    recs = {
        "varieties": [{"name": "sb", "dim": 2, "chi": 1, "index": 3}, {"name": "Y", "dim": 2, "chi": 1, "index": 3}],
        "morphisms": [{"source": "Y", "target": "sb", "deg": 4}],
    }
    path.write_text(json.dumps(recs))
    code, out, _ = run(capsys, "--format", "json", "degree", str(path), "--p", "3")
    assert code == EXIT_OK
    verdicts = json.loads(out)
    assert [v["verdict"] for v in verdicts] == ["strongly p-incompressible"] * 2 + ["consistent"]
    assert all("paper_ref" in v for v in verdicts if v["check"] != "record")


def test_degree_empty_file(capsys, tmp_path):
    path = tmp_path / "e.json"
    path.write_text("")
    code, out, _ = run(capsys, "--format", "json", "degree", str(path), "--p", "2")
    assert code == EXIT_OK and json.loads(out) == []


@pytest.mark.parametrize(
    "content, fragment",
    [
        ("{ nope", "e.json:1"),
        ('{"varieties": [{"name": "a", "dim": 1, "chi": 1}]}', "$.varieties[0].index"),
        ('{"varieties": [{"name": "a", "dim": "one", "chi": 1, "index": 1}]}', "$.varieties[0].dim"),
    ],
)
def test_degree_malformed(capsys, tmp_path, content, fragment):
    path = tmp_path / "e.json"
    path.write_text(content)
    code, _, err = run(capsys, "degree", str(path), "--p", "2")
    assert code == EXIT_USAGE and fragment in err
    assert err.count(str(path)) <= 1


def test_degree_usage_errors(capsys, tmp_path):
    assert run(capsys, "degree", "--sample")[0] == EXIT_USAGE
    assert run(capsys, "degree", "--p", "2")[0] == EXIT_USAGE
    assert run(capsys, "degree", "--sample", "--p", "9")[0] == EXIT_USAGE
    assert run(capsys, "degree", str(tmp_path / "missing.json"), "--p", "2")[0] == EXIT_USAGE


def test_degree_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "degree", "--sample", "--p", "3")
    assert out.splitlines()[0] == "check,subject,p,verdict"
    assert out.splitlines()[1] == "record,severi-brauer-deg3,3,strongly p-incompressible"


# top level ----------------------------------------------------------------


def test_no_command(capsys):
    assert run(capsys)[0] == EXIT_USAGE


def test_unknown_command(capsys):
    assert run(capsys, "plot")[0] == EXIT_USAGE


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "chernint" in capsys.readouterr().out
