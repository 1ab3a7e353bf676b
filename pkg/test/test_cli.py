import argparse
import json

import pytest

from modules.cli.commands import COMMANDS, EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, dispatch, parse_trunc

SMALL = ["--ring", "4", "--trunc", "4"]


@pytest.fixture
def walk(walks_dir):
    return lambda name: str(walks_dir / f"{name}.qr")


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


# ----------------------------------------------------------------- opções
def test_parse_trunc():
    assert parse_trunc("5") == 5
    assert parse_trunc("d=5, e=3") == {"d": 5, "e": 3}

    with pytest.raises(argparse.ArgumentTypeError):
        parse_trunc("d=")


@pytest.mark.parametrize("argv", [
    [],
    ["fixpoint"],
    ["run", "walks/rhw.qr"],
    ["oracle", "walks/rhw.qr", "--family", "spiral"],
    ["fixpoint", "walks/rhw.qr", "--trunc", "x"],
])
def test_bad_arguments(argv):
    assert dispatch(argv) == EXIT_INVALID


def test_help_exits_cleanly():
    assert dispatch(["--help"]) == EXIT_OK


# ----------------------------------------------------------------- check
def test_check_valid_walk(walk, capsys):
    assert dispatch(["check", walk("ddrhw")]) == EXIT_OK

    payload = _json_out(capsys)
    assert payload["ok"] is True
    assert payload["procedures"] == ["X", "Y"]
    assert payload["violations"] == []


def test_check_reports_violations(fixtures_dir, capsys):
    assert dispatch(["check", str(fixtures_dir / "unknown_gate.qr")]) == EXIT_INVALID

    payload = _json_out(capsys)
    assert payload["ok"] is False
    assert len(payload["violations"]) == 1


def test_check_reports_name_clash(fixtures_dir, capsys):
    assert dispatch(["check", str(fixtures_dir / "name_clash.qr")]) == EXIT_INVALID

    payload = _json_out(capsys)
    assert [v["kind"] for v in payload["violations"]] == ["name-clash"]
    assert payload["violations"][0]["where"] == "d"


def test_check_syntax_error(fixtures_dir):
    assert dispatch(["check", str(fixtures_dir / "missing_semicolon.qr")]) == EXIT_INVALID


def test_missing_file(tmp_path):
    assert dispatch(["check", str(tmp_path / "nada.qr")]) == EXIT_INVALID


def test_semantic_commands_reject_invalid_programs(fixtures_dir):
    assert dispatch(["fixpoint", str(fixtures_dir / "guard_in_branch.qr"), "--trunc", "3"]) == EXIT_INVALID


# ----------------------------------------------------------------- approx e fixpoint
def test_approx(walk, capsys):
    assert dispatch(["approx", walk("rhw"), *SMALL, "--depth", "2"]) == EXIT_OK

    payload = _json_out(capsys)
    assert payload["proc"] == "X"
    assert payload["program"].startswith("H[d]; qif [d] |L> -> TL[p]")
    assert [b["occ"] for b in payload["blocks"]] == [{"d": 1}, {"d": 2}]
    assert payload["possibly_truncated"] == []


def test_fixpoint_with_equivalence(walk, capsys):
    argv = ["fixpoint", walk("rhw"), *SMALL, "--report-iterations", "--check-equivalence"]

    assert dispatch(argv) == EXIT_OK

    payload = _json_out(capsys)
    assert payload["iterations"] == 5
    assert payload["equivalence"]["passed"] is True
    assert payload["possibly_truncated"]["X"] == [{"d": 4}]


def test_fixpoint_writes_output_file(walk, tmp_path, capsys):
    out = tmp_path / "fix.json"

    assert dispatch(["fixpoint", walk("drhw"), *SMALL, "--out", str(out)]) == EXIT_OK

    assert capsys.readouterr().out == ""
    assert set(json.loads(out.read_text(encoding="utf-8"))) == {"procedures", "main", "possibly_truncated"}


# ----------------------------------------------------------------- run
def test_run_bosonic_initialisation(walk, capsys):
    assert dispatch(["run", walk("ddrhw"), *SMALL, "--coin-init", "basis:L,L,L"]) == EXIT_OK

    payload = _json_out(capsys)
    assert list(payload["probs"]) == ["-1"]
    assert payload["trace"] == pytest.approx(1 / 24)


def test_run_csv(walk, capsys):
    assert dispatch(["run", walk("ddrhw"), *SMALL, "--coin-init", "basis:L,L", "--format", "csv"]) == EXIT_OK

    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "position,probability"
    position, probability = lines[1].split(",")
    assert position == "2"
    assert float(probability) == pytest.approx(0.25)
    assert len(lines) == 2


def test_run_fermions_pauli(walk):
    argv = ["run", walk("ddrhw"), *SMALL, "--coin-init", "basis:L,L", "--statistics", "fermion"]

    assert dispatch(argv) == EXIT_INVALID


# ----------------------------------------------------------------- oracle
@pytest.mark.parametrize("name,family,extra", [
    ("rhw", "unidirectional", ["--ring", "4", "--trunc", "5"]),
    ("ddrhw", "bidirectional", ["--ring", "4", "--trunc", "4", "--depth", "3"]),
    ("rhw", "symmetric", ["--ring", "4", "--trunc", "5", "--depth", "4"]),
    ("ddrhw", "symmetric", ["--ring", "4", "--trunc", "5", "--depth", "4"]),
    ("while4", "loop", ["--trunc", "4"]),
    ("while3", "loop", ["--trunc", "4", "--w", "V"]),
])
def test_oracle_families(walk, capsys, name, family, extra):
    assert dispatch(["oracle", walk(name), "--family", family, *extra]) == EXIT_OK

    payload = _json_out(capsys)
    assert payload["passed"] is True
    assert all(c["passed"] for c in payload["comparisons"])


def test_oracle_counts_approximations(walk, capsys):
    dispatch(["oracle", walk("rhw"), "--family", "unidirectional", "--ring", "4", "--trunc", "5"])

    labels = [c["label"] for c in _json_out(capsys)["comparisons"]]
    assert labels == ["X^(1)", "X^(2)", "X^(3)", "X^(4)", "X^(5)", "X"]


def test_oracle_bidirectional_needs_two_equations(walk):
    assert dispatch(["oracle", walk("rhw"), "--family", "bidirectional", *SMALL]) == EXIT_INVALID


# ----------------------------------------------------------------- simulate
def test_simulate_json(walk, capsys):
    assert dispatch(["simulate", walk("rhw"), "--ring", "4", "--depth", "2"]) == EXIT_OK

    steps = _json_out(capsys)
    assert len(steps) == 3
    assert steps[0][0]["position"] == 0
    assert {entry["residual"] for entry in steps[2]} >= {"E"}


def test_simulate_csv_choice(walk, capsys):
    argv = ["simulate", walk("qintw"), "--ring", "4", "--depth", "3", "--steps", "choice", "--format", "csv"]

    assert dispatch(argv) == EXIT_OK

    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "step,re,im,coins,position,residual"
    assert sum(1 for line in lines[1:] if line.startswith("3,")) == 5


# ----------------------------------------------------------------- erros internos
def test_internal_error(mocker, walk):
    mocker.patch.dict(COMMANDS, {"check": mocker.Mock(side_effect=RuntimeError("falha inesperada"))})

    assert dispatch(["check", walk("rhw")]) == EXIT_INTERNAL
