"""
The command-line surface: every subcommand on small configurations.
"""

import csv
import io
import json

import pytest

from pydyadic.cli import build_parser, main

VERIFY = ["verify", "--depth", "3", "--ensemble", "3", "--band", "2"]
HANKEL = ["hankel", "--band", "2", "--budget", "4", "--pairs", "50", "--ensemble", "2"]


def run(argv, capsys):
    status = main(argv)
    return status, capsys.readouterr().out


def test_parser_lists_every_command():
    """
    One subcommand per registered handler, with the CSV columns documented.
    """
    parser = build_parser()
    assert "series,x,averaged,exact" in parser.format_help()
    for command in ("verify", "norms", "shift-average", "hankel", "calibrate"):
        assert parser.parse_args([command]).command == command


def test_verify(capsys):
    """
    Every identity suite passes and the report echoes the configuration.
    """
    status, out = run(VERIFY, capsys)
    report = json.loads(out)
    assert status == 0
    assert report["schema"] == 1
    assert report["operation"] == "verify"
    assert report["passed"]
    assert report["config"]["depth"] == 3
    names = {suite["name"] for suite in report["suites"]}
    assert {"haar_orthonormality", "product_identity", "commutator_decomposition"} <= names
    assert {"hankel_commutator", "hankel_blocks", "calibration"} <= names


def test_reports_are_reproducible(capsys):
    """
    The same configuration gives the same bytes.
    """
    _, first = run(VERIFY, capsys)
    _, second = run(VERIFY, capsys)
    assert first == second


def test_calibrate(capsys):
    status, out = run(["calibrate"], capsys)
    report = json.loads(out)
    assert status == 0
    assert report["passed"]
    assert report["operation"] == "calibrate"


def test_norms(capsys):
    """
    Named symbols and ensembles, certified on a small window.
    """
    argv = ["norms", "--depth", "2", "--ensemble", "3", "--power-iters", "300"]
    status, out = run(argv + ["--symbols", "haar,half"], capsys)
    report = json.loads(out)
    assert status == 0
    assert report["certified"]
    assert set(report["symbols"]) == {"haar", "half"}
    assert report["symbols"]["haar"]["embedding"]["bmo"] == pytest.approx(1.0)
    assert report["holder"]["q"] == 2.0
    assert report["maximal"]["maximal_ratio"]["max"] <= 2.0
    assert set(report["doubling"]) == {"op_norm_over_bmo", "carleson_constant", "stable"}
    assert report["doubling"]["op_norm_over_bmo"]["high"] >= 0.0
    assert isinstance(report["doubling"]["stable"], bool)


def test_hankel(capsys):
    """
    Nehari sandwiches and identity residuals, the same with two workers.
    """
    status, out = run(HANKEL, capsys)
    report = json.loads(out)
    assert status == 0
    assert report["sandwich_holds"]
    assert set(report["symbols"]) == {"e1", "anti", "random-0", "random-1"}
    assert report["symbols"]["e1"]["sigma0"] == pytest.approx(1.0)
    assert "workers" not in report["config"]
    _, parallel = run(HANKEL + ["--workers", "2"], capsys)
    assert parallel == out


def test_shift_average_csv(tmp_path, capsys):
    """
    The CSV carries one series per test function plus the gamma0 samples.
    """
    target = tmp_path / "average.csv"
    argv = [
        "shift-average",
        "--samples-y",
        "4",
        "--samples-lambda",
        "4",
        "--functions",
        "box,bump",
        "--format",
        "csv",
        "--out",
        str(target),
    ]
    status, out = run(argv, capsys)
    assert status == 0
    assert out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert list(rows[0]) == ["series", "x", "averaged", "exact"]
    series = {row["series"] for row in rows}
    assert series == {"box", "bump", "gamma0"}
    kernel = [row for row in rows if row["series"] == "gamma0"]
    assert len(kernel) == 2001
    quarter = next(row for row in kernel if float(row["x"]) == 0.25)
    assert float(quarter["averaged"]) == pytest.approx(-0.75)


def test_shift_average_json(capsys):
    """
    The JSON summary reports the fitted constants and no rows.
    """
    argv = ["shift-average", "--samples-y", "4", "--samples-lambda", "4", "--functions", "box,ramp"]
    status, out = run(argv, capsys)
    report = json.loads(out)
    assert status == 0
    assert report["functions"] == ["box", "ramp"]
    assert len(report["c_hat"]) == 2
    assert "rows" not in report
    assert report["limit_constant"] < 0
    assert isinstance(report["meets_targets"], bool)


def test_shift_average_is_documented_as_uncertified():
    """
    The help of shift-average says it does not set the exit status.
    """
    parser = build_parser()
    commands = next(a for a in parser._actions if a.dest == "command")
    assert "Uncertified" in commands.choices["shift-average"].description


def test_config_file(tmp_path, capsys):
    """
    Values come from the file unless a flag overrides them.
    """
    path = tmp_path / "run.toml"
    path.write_text("depth = 2\nensemble = 2\nband = 1\n")
    status, out = run(["verify", "--config", str(path), "--ensemble", "1"], capsys)
    config = json.loads(out)["config"]
    assert status == 0
    assert config["depth"] == 2
    assert config["ensemble"] == 1
    assert config["band"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--format", "csv"],
        ["verify", "--depth", "-2"],
        ["shift-average", "--functions", "box"],
        ["norms", "--symbols", "nonsense", "--depth", "1", "--ensemble", "1"],
        ["verify", "--scales", "3"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_with_status_2(argv, capsys):
    """
    Invalid configurations stop with a usage message on stderr.
    """
    with pytest.raises(SystemExit) as error:
        main(argv)
    assert error.value.code == 2
    assert "error" in capsys.readouterr().err
