"""The command-line front end: configuration, report serialization,
determinism and exit codes."""

import json
from fractions import Fraction

import pytest

from siegelweil import cli, eisenstein
from siegelweil.cli import (
    ConfigError,
    Report,
    build_config,
    emit,
    main,
    parse_config_file,
    parse_report,
    parse_targets,
)


def _args(argv):
    return cli._build_parser().parse_args(argv)


def test_parse_targets():
    assert parse_targets("1..4") == (1, 2, 3, 4)
    assert parse_targets("-2..2") == (-2, -1, 1, 2)  # zero dropped
    assert parse_targets("3,5/2,-1") == (3, Fraction(5, 2), -1)
    with pytest.raises(ConfigError):
        parse_targets("5..1")
    with pytest.raises(ConfigError):
        parse_targets("1,0,2")
    with pytest.raises(ConfigError):
        parse_targets("pi")


def test_parse_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# a comment\n"
        "disc = -7\n"
        "alpha = 1..5   # trailing comment\n"
        "format = csv\n"
    )
    assert parse_config_file(cfg) == {"disc": "-7", "alpha": "1..5", "format": "csv"}

    cfg.write_text("discc = -7\n")
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config_file(cfg)

    cfg.write_text("disc = -7\ndisc = -4\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_file(cfg)

    cfg.write_text("disc\n")
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_file(cfg)


def test_flags_override_the_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("disc = -7\nalpha = 1..5\ntau = 2\n")
    config = build_config(_args(["verify", str(cfg), "--alpha", "1..2", "--disc", "-4"]))
    assert config.disc == -4
    assert config.alphas == (1, 2)
    assert config.tau == 2  # untouched file value survives


def test_config_validation():
    with pytest.raises(ConfigError, match="fundamental"):
        build_config(_args(["verify", "--disc", "-12"]))
    with pytest.raises(ConfigError, match="required"):
        build_config(_args(["verify"]))
    with pytest.raises(ConfigError, match="coherent"):
        build_config(_args(["verify", "--disc", "-4", "--xi", "1"]))
    with pytest.raises(ConfigError, match="positive"):
        build_config(_args(["siegel-weil", "--disc", "-4", "--alpha", "-3..3"]))
    with pytest.raises(ConfigError, match="tolerance"):
        build_config(_args(["verify", "--disc", "-4", "--tol", "-1"]))


# ---------------------------------------------------------------------------
# serialization

def _tiny_report():
    config = build_config(_args(["verify", "--disc", "-4", "--alpha", "1..3"]))
    return cli.run_verify(config)


def test_json_round_trip():
    report = _tiny_report()
    data = emit(report, "json")
    assert parse_report(data) == report
    assert emit(parse_report(data), "json") == data


def test_json_row_schema():
    report = _tiny_report()
    rows = json.loads(emit(report, "json"))["rows"]
    assert len(rows) == 3
    assert list(rows[0]) == list(cli.REPORT_COLUMNS)
    assert rows[0]["alpha"] == "1"
    assert rows[0]["diff"] == ["2"]
    assert rows[0]["lhs_logs"] == {"2": "2"}
    assert rows[0]["pass"] is True


def test_csv_shape():
    report = _tiny_report()
    lines = emit(report, "csv").decode().splitlines()
    assert lines[0] == ",".join(cli.REPORT_COLUMNS)
    assert len(lines) == 1 + len(report.rows)


def test_empty_report_keeps_the_header():
    empty = Report("verify", {}, cli.REPORT_COLUMNS, [],
                   {"total": 0, "passed": 0, "failed": 0})
    lines = emit(empty, "csv").decode().splitlines()
    assert lines == [",".join(cli.REPORT_COLUMNS)]
    assert parse_report(emit(empty, "json")) == empty


def test_unknown_format():
    with pytest.raises(ValueError):
        emit(_tiny_report(), "yaml")


def test_emit_is_deterministic():
    a = emit(_tiny_report(), "json")
    b = emit(_tiny_report(), "json")
    assert a == b
    assert emit(_tiny_report(), "text") == emit(_tiny_report(), "text")


# ---------------------------------------------------------------------------
# the executable surface

def test_main_verify_passes(capsys):
    code = main(["verify", "--disc", "-4", "--alpha", "-3..6", "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 9  # every requested target reported exactly once
    assert all(r.endswith("true") for r in rows)


def test_main_config_error(capsys):
    assert main(["verify", "--disc", "-9"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_main_bad_flag_is_a_usage_error(capsys):
    assert main(["verify", "--disc", "-4", "--format", "yaml"]) == 2
    capsys.readouterr()


def test_main_calibration_failure_is_instructive(capsys):
    code = main(["siegel-weil", "--disc", "-3", "--alpha", "1..4",
                 "--calibration-alpha", "2"])
    captured = capsys.readouterr()
    assert code == 3
    assert "candidate calibration targets" in captured.err
    assert "1" in captured.err


def test_main_negative_control_wrong_weight(capsys, monkeypatch):
    """With the constant calibrated against the true weights, a wrong stacky
    weight shows up as row failures and exit code 1."""
    eisenstein.kappa_sw(-4, Fraction(-1))  # pin the honest constant first
    monkeypatch.setattr(eisenstein, "_weight_denominator", lambda D: 5)
    code = main(["siegel-weil", "--disc", "-4", "--alpha", "1..6", "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 1
    assert any(line.endswith("false") for line in out.splitlines()[1:])


def test_main_densities_and_calibrate(capsys):
    assert main(["densities", "--disc", "-4", "--alpha", "1,2", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == ",".join(cli.DENSITY_COLUMNS)
    assert any(line.startswith("1,inf,arch,1") for line in lines)

    assert main(["calibrate", "--disc", "-23", "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    rows = {r["key"]: r["value"] for r in data["rows"]}
    assert rows["kappa_sw"] == "2"
    assert rows["stack_mass"] == "3"
    assert rows["flip_prime"] == "23"
