from __future__ import annotations

import json
import subprocess
import sys

import pytest

from cas.cli import main
from conftest import GOLDEN, WORKED_FIXTURES, PHONE_CALL

PLAN = "[Walk] <kitchen> (1)\n[Grab] <trash_bag> (1)\n"


@pytest.fixture
def plan(tmp_path):
    p = tmp_path / "plan.txt"
    p.write_text(PLAN)
    return p


def test_compare_identical(plan, capsys):
    assert main(["compare", "--problem", "home", "--ref", str(plan), "--cand", str(plan)]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "plan_difference: 0",
        "levenshtein: 0",
        "final_state_similarity: 1",
        "length_discrepancy: 0",
    ]


def test_compare_different(plan, tmp_path, capsys):
    cand = tmp_path / "cand.txt"
    cand.write_text("1. move_to(kitchen)\n")
    assert main(["compare", "--problem", "home", "--ref", str(plan), "--cand", str(cand)]) == 0
    out = capsys.readouterr().out
    assert "plan_difference: 1" in out and "final_state_similarity: 0.5" in out


def test_simulate(plan, capsys):
    assert main(["simulate", "--problem", "home", "--seq", str(plan), "--mode", "strict_skip"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[:2] == ["executed - move_to(kitchen)", "executed - grab(trash_bag)"]
    assert "  holding(trash_bag)" in out and "  robot_at(kitchen)" in out


def test_translate_missing_command(capsys):
    assert main(["translate", "--problem", "home", "--backend", "live"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("usage: cas translate") and "--command" in err


def test_bad_backend_spec(capsys):
    assert main(["translate", "--problem", "home", "--command", "x", "--backend", "carrier-pigeon"]) == 1


def test_translate_worked_example(capsys):
    args = ["translate", "--problem", "household", "--command", PHONE_CALL + ".", "--model", "worked-example",
            "--backend", f"replay:{WORKED_FIXTURES}", "--json"]
    # phone and roommate are not declared in the household problem
    assert main(args) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["entities"] == ["phone", "roommate"] and doc["unknown_entities"] == ["phone", "roommate"]
    # only the speech act survives: quoted text is not an entity reference
    assert doc["final_sequence"] == ['say("I found my phone!")']
    assert {r["reason"] for r in doc["removed"]} == {"nonexistent_entity"}


def test_runtime_error_exit_code(tmp_path, capsys):
    args = ["translate", "--problem", "home", "--command", "x", "--backend", f"replay:{tmp_path}"]
    assert main(args) == 2
    assert "stage=infer_entities" in capsys.readouterr().err
    assert main(["simulate", "--problem", "nowhere", "--seq", str(tmp_path / "none")]) == 2


def test_eval_writes_report(tmp_path, capsys):
    assert main(["eval", "--out", str(tmp_path), "--strict"]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["aggregates.csv", "cells.csv", "stats.csv", "summary.txt"]
    assert (tmp_path / "stats.csv").read_bytes() == (GOLDEN / "eval" / "stats.csv").read_bytes()
    assert capsys.readouterr().out == (GOLDEN / "eval" / "summary.txt").read_text()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cas", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("cas ")
