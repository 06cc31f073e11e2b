from __future__ import annotations

import importlib.util
import shutil
import sys
from pathlib import Path

import pytest
import yaml

from cas.domain import load_problem
from cas.errors import FixtureMiss, ValidationError
from cas.harness import (
    ModelProfile,
    evaluate,
    load_config,
    load_dataset,
    parse_record,
    problem_library,
    summarize_steps,
    summary_prompt,
    write_report,
)
from cas.llm import ChatResponse, ReplayBackend
from cas.metrics import MEASURES
from cas.resources import dataset_dir, fixture_dir, models_config
from cas.simulator import ASSISTED, SKIPPED, execute
from conftest import GOLDEN, WORKED_FIXTURES

ROOT = Path(__file__).resolve().parents[1]
TASK = "You are home and the phone rings. The person on the other end of the line asks to speak to your roommate."
NOTES = ["look for him", "inform him about the call", "place the phone on the table and ask him to talk"]

RECORD = """\
id: t1
problem: home
task: Take out the trash.
steps:
- action: '[Walk] <kitchen> (1)'
  nl: go to the kitchen
- action: '[Grab] <trash_bag> (1)'
summaries:
- {source: human, text: Take the trash bag.}
- {source: human, text: Grab the trash.}
- {source: model, text: Pick up the trash bag in the kitchen.}
"""


class Canned:
    backend_id = "canned"

    def __init__(self, text):
        self.text = text

    def complete(self, req):
        return ChatResponse(self.text, self.backend_id)


@pytest.fixture(scope="module")
def records():
    return load_dataset(dataset_dir())


@pytest.fixture(scope="module")
def config():
    return load_config(models_config(), env={})


@pytest.fixture(scope="module")
def full_report(records, config, aliases):
    return evaluate(records, config.models, problem_library(), config.make_backend(),
                    aliases=aliases, entity_model=config.entity_model, strict=True, workers=4)


def test_parse_record(aliases):
    r = parse_record(RECORD, aliases)
    assert [str(a) for a in r.reference] == ["move_to(kitchen)", "grab(trash_bag)"]
    assert r.per_action_nl == ("go to the kitchen", None)
    assert [s.source for s in r.summaries] == ["human", "human", "model"]


def test_record_needs_three_summaries(aliases):
    doc = yaml.safe_load(RECORD)
    doc["summaries"] = doc["summaries"][:2]
    with pytest.raises(ValidationError):
        parse_record(yaml.safe_dump(doc), aliases)


def test_record_notes_must_align(aliases):
    doc = yaml.safe_load(RECORD)
    doc["steps"][1]["action"] = "[Grab] <trash_bag> (1)\n[Walk] <entrance> (1)"
    with pytest.raises(ValidationError):
        parse_record(yaml.safe_dump(doc), aliases)


def test_empty_dataset_dir(tmp_path):
    assert load_dataset(tmp_path) == []


def test_duplicate_record_ids(tmp_path):
    (tmp_path / "a.yaml").write_text(RECORD)
    (tmp_path / "b.yaml").write_text(RECORD)
    with pytest.raises(ValidationError):
        load_dataset(tmp_path)


def test_bundled_dataset(records):
    assert len(records) == 40
    assert all(r.synthetic for r in records)
    assert len({r.id for r in records}) == 40


def test_references_execute_cleanly(records):
    problems = problem_library()
    for r in records:
        _, trace = execute(problems(r.problem_ref), r.reference, ASSISTED)
        assert [s for s in trace if s.status == SKIPPED] == [], r.id


def test_summary_prompt_golden():
    assert summary_prompt(TASK, NOTES) == (GOLDEN / "summary_prompt.txt").read_text(encoding="utf-8")


def test_summary_prompt_skips_missing_notes():
    assert summary_prompt("Task.", ["a", None, " ", "b"]).endswith("1. a\n2. b")
    with pytest.raises(ValueError):
        summary_prompt("Task.", [None, ""])


def test_summarize_worked_example():
    text = summarize_steps(ReplayBackend(WORKED_FIXTURES), TASK, NOTES)
    assert text == "Find your roommate and tell them they have a phone call."


def test_summarize_keeps_first_line():
    assert summarize_steps(Canned("\n\n  Do the thing.  \nExtra detail"), "T.", ["x"]) == "Do the thing."


def test_config_env_overrides(tmp_path):
    cfg = load_config(models_config(), env={"CAS_WORKERS": "2", "CAS_FIXTURES": str(tmp_path),
                                           "CAS_BACKEND": "record"})
    assert (cfg.workers, cfg.fixtures, cfg.backend) == (2, tmp_path, "record")
    assert [m.label for m in cfg.models] == ["M_t", "P", "P_t", "S"]
    assert cfg.fixtures != load_config(models_config(), env={}).fixtures


def test_full_evaluation_shape(full_report):
    assert len(full_report.cells) == 40 * 4 * 3
    assert all(c.ok for c in full_report.cells)
    assert len(full_report.aggregates) == 40 * 4
    friedman = [s for s in full_report.stats if s.test == "friedman"]
    assert [s.measure for s in friedman] == list(MEASURES)
    assert all(s.df == 3 and s.n == 40 for s in friedman)
    pairwise = [s for s in full_report.stats if s.test == "wilcoxon"]
    assert len(pairwise) == 4 * 6
    assert all(s.p_adjusted == min(1.0, s.p_value * 6) for s in pairwise if s.p_value is not None)


def test_report_matches_golden(full_report, tmp_path):
    write_report(full_report, tmp_path)
    for name in ("aggregates.csv", "stats.csv", "summary.txt"):
        assert (tmp_path / name).read_bytes() == (GOLDEN / "eval" / name).read_bytes(), name


def test_worker_count_does_not_change_results(records, config, aliases, full_report):
    serial = evaluate(records[:10], config.models, problem_library(), config.make_backend(),
                      aliases=aliases, entity_model=config.entity_model, workers=1)
    assert serial.cells == full_report.cells[: len(serial.cells)]


def test_single_model_omits_statistics(records, config, aliases):
    report = evaluate(records[:3], config.models[:1], problem_library(), config.make_backend(),
                      aliases=aliases, entity_model=config.entity_model)
    assert report.stats == [] and len(report.cells) == 9


def test_missing_fixtures(records, config, aliases):
    models = [config.models[0], ModelProfile("X", "never-recorded")]
    backend = config.make_backend()
    report = evaluate(records[:2], models, problem_library(), backend, aliases=aliases,
                      entity_model=config.entity_model)
    failed = [c for c in report.cells if not c.ok]
    assert len(failed) == 6 and all(c.model == "X" and "stage=translate" in c.error for c in failed)
    assert all(c.ok for c in report.cells if c.model == "M_t")
    assert all(a.metrics is None for a in report.aggregates if a.model == "X")
    with pytest.raises(FixtureMiss):
        evaluate(records[:2], models, problem_library(), backend, aliases=aliases,
                 entity_model=config.entity_model, strict=True)


def _load_tool(name):
    spec = importlib.util.spec_from_file_location(name, ROOT / "tools" / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod  # dataclasses look their module up here
    spec.loader.exec_module(mod)
    return mod


def _same_tree(a: Path, b: Path, pattern: str) -> bool:
    fa, fb = sorted(p.name for p in a.glob(pattern)), sorted(p.name for p in b.glob(pattern))
    return fa == fb and all((a / n).read_bytes() == (b / n).read_bytes() for n in fa)


def test_bundled_data_regenerates_identically(tmp_path, capsys):
    _load_tool("build_dataset").main(tmp_path / "dataset")
    assert _same_tree(tmp_path / "dataset", dataset_dir(), "*.yaml")
    _load_tool("synthesize_fixtures").main(tmp_path / "fixtures", tmp_path / "dataset")
    assert _same_tree(tmp_path / "fixtures", fixture_dir(), "*.txt")


def test_problem_library_directory(tmp_path):
    shutil.copy(ROOT / "src" / "cas" / "data" / "problems" / "home.problem", tmp_path / "x.problem")
    assert problem_library(tmp_path)("x").entity_names == load_problem("home").entity_names
