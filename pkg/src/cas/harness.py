"""Dataset loading, end-to-end evaluation and report emission.

Every record carries three overarching summaries. Each summary is fed
through the pipeline once per model, the output is simulated next to the
reference, and the four measures are computed; the three summary cells of
a (record, model) pair are then averaged. Models are compared per measure
with a Friedman test, Bonferroni-corrected pairwise Wilcoxon tests, and
one-sample Wilcoxon tests of final-state similarity against zero.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
import yaml

from cas import pipeline, stats
from cas.actionseq import ActionSequence, AliasTable, canonicalize_all, format_sequence, parse_vh
from cas.domain import ProblemDefinition, WorldState, load_problem
from cas.errors import (
    AllZeroDifferences,
    CASError,
    DegenerateSample,
    FixtureMiss,
    ParseError,
    StageError,
    ValidationError,
)
from cas.llm import Backend, ChatRequest, LiveBackend, RecordingBackend, ReplayBackend
from cas.metrics import MEASURES, MetricValues, aggregate, compare
from cas.simulator import ASSISTED, execute

log = logging.getLogger(__name__)

SUMMARY_MODEL = "claude-3-5-sonnet-v2"


@dataclass(frozen=True)
class Summary:
    source: str
    text: str


@dataclass(frozen=True)
class TaskRecord:
    id: str
    task_prose: str
    reference: ActionSequence
    per_action_nl: tuple[str | None, ...]
    summaries: tuple[Summary, ...]
    problem_ref: str
    category: str = ""
    synthetic: bool = False

    def __post_init__(self):
        if len(self.per_action_nl) != len(self.reference):
            raise ValidationError(
                f"record {self.id}: {len(self.per_action_nl)} step notes for {len(self.reference)} actions"
            )
        if len(self.summaries) != 3:
            raise ValidationError(f"record {self.id}: expected exactly 3 summaries, got {len(self.summaries)}")
        sources = sorted(s.source for s in self.summaries)
        if sources != ["human", "human", "model"]:
            raise ValidationError(f"record {self.id}: summaries must be two human and one model, got {sources}")


def parse_record(text: str, aliases: AliasTable, source: str = "<record>") -> TaskRecord:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ParseError(f"{source}: {e}", mark.line + 1 if mark else 0, mark.column + 1 if mark else 0) from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{source}: record must be a mapping")
    rid = str(doc.get("id") or Path(source).stem)
    missing = [k for k in ("task", "steps", "summaries", "problem") if k not in doc]
    if missing:
        raise ValidationError(f"record {rid}: missing field(s) {', '.join(missing)}")
    steps = doc["steps"] or []
    try:
        reference = parse_vh("\n".join(str(s["action"]) for s in steps))
    except ParseError as e:
        raise ParseError(f"record {rid}: {e}", e.line, e.column) from None
    except (KeyError, TypeError):
        raise ValidationError(f"record {rid}: every step needs an 'action'") from None
    notes = tuple((str(s["nl"]).strip() or None) if s.get("nl") else None for s in steps)
    summaries = tuple(Summary(str(s["source"]), str(s["text"]).strip()) for s in doc["summaries"] or [])
    return TaskRecord(
        id=rid,
        task_prose=str(doc["task"]).strip(),
        reference=canonicalize_all(reference, aliases),
        per_action_nl=notes,
        summaries=summaries,
        problem_ref=str(doc["problem"]),
        category=str(doc.get("category", "")),
        synthetic=bool(doc.get("synthetic", False)),
    )


def load_dataset(path: str | Path, aliases: AliasTable | None = None) -> list[TaskRecord]:
    """Load every ``*.yaml`` record in ``path``, ordered by file name."""
    if aliases is None:
        from cas.resources import default_aliases

        aliases = default_aliases()
    records = []
    for f in sorted(Path(path).glob("*.yaml")):
        records.append(parse_record(f.read_text(encoding="utf-8"), aliases, source=f.name))
    ids = [r.id for r in records]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ValidationError(f"duplicate record ids: {', '.join(dupes)}")
    return records


def summary_prompt(task_prose: str, per_action_nl: Iterable[str | None]) -> str:
    notes = [n.strip() for n in per_action_nl if n and n.strip()]
    if not notes:
        raise ValueError("need at least one non-empty step description to summarize")
    steps = "\n".join(f"{i}. {n}" for i, n in enumerate(notes, start=1))
    return pipeline.fill(pipeline.load_template("summary"), task=task_prose.strip(), steps=steps)


def summarize_steps(
    backend: Backend, task_prose: str, per_action_nl: Iterable[str | None], *, model_id: str = SUMMARY_MODEL
) -> str:
    """One-sentence overarching summary of a record's step notes (temperature 0)."""
    req = ChatRequest(summary_prompt(task_prose, per_action_nl), model_id, temperature=0.0)
    text = backend.complete(req).text
    return next((line.strip() for line in text.splitlines() if line.strip()), "")


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class ModelProfile:
    label: str
    model_id: str
    finetuned: bool = False


@dataclass
class EvalConfig:
    models: list[ModelProfile]
    backend: str = "replay"
    fixtures: Path | None = None
    endpoint: str | None = None
    api_key_env: str = "CAS_LLM_API_KEY"
    max_in_flight: int = 4
    timeout: float = 60.0
    workers: int = 1
    entity_model: str = pipeline.ENTITY_MODEL
    summary_model: str = SUMMARY_MODEL

    def make_backend(self, kind: str | None = None) -> Backend:
        kind = kind or self.backend
        if kind == "replay":
            if self.fixtures is None:
                raise ValueError("replay backend needs a fixtures directory")
            return ReplayBackend(self.fixtures)
        live = LiveBackend(
            self.endpoint,
            os.environ.get(self.api_key_env),
            max_in_flight=self.max_in_flight,
            timeout=self.timeout,
        )
        if kind == "live":
            return live
        if kind == "record":
            if self.fixtures is None:
                raise ValueError("record backend needs a fixtures directory")
            return RecordingBackend(live, self.fixtures)
        raise ValueError(f"unknown backend kind {kind!r}")


ENV_OVERRIDES = {
    "CAS_BACKEND": "backend",
    "CAS_FIXTURES": "fixtures",
    "CAS_LLM_ENDPOINT": "endpoint",
    "CAS_WORKERS": "workers",
}


def load_config(path: str | Path, env: Mapping[str, str] | None = None) -> EvalConfig:
    """Read a models/backend config file; ``CAS_*`` environment variables win."""
    path = Path(path)
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    env = os.environ if env is None else env
    backend = dict(doc.get("backend") or {})
    for var, key in ENV_OVERRIDES.items():
        if env.get(var):
            if key == "workers":
                doc["workers"] = int(env[var])
            else:
                backend["kind" if key == "backend" else key] = env[var]
    models = [
        ModelProfile(str(m["label"]), str(m["model_id"]), bool(m.get("finetuned", False)))
        for m in doc.get("models") or []
    ]
    if not models:
        raise ValidationError(f"{path}: no models configured")
    fixtures = backend.get("fixtures")
    if fixtures is not None:
        fixtures = Path(fixtures)
        if not fixtures.is_absolute():
            fixtures = path.parent / fixtures
    return EvalConfig(
        models=models,
        backend=str(backend.get("kind", "replay")),
        fixtures=fixtures,
        endpoint=backend.get("endpoint"),
        api_key_env=str(backend.get("api_key_env", "CAS_LLM_API_KEY")),
        max_in_flight=int(backend.get("max_in_flight", 4)),
        timeout=float(backend.get("timeout", 60.0)),
        workers=int(doc.get("workers", 1)),
        entity_model=str(doc.get("entity_model", pipeline.ENTITY_MODEL)),
        summary_model=str(doc.get("summary_model", SUMMARY_MODEL)),
    )


# -- evaluation ----------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    record_id: str
    model: str
    summary_index: int
    summary_source: str
    metrics: MetricValues | None
    candidate: ActionSequence = ()
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.metrics is not None


@dataclass(frozen=True)
class Aggregate:
    record_id: str
    model: str
    metrics: MetricValues | None


@dataclass(frozen=True)
class StatRow:
    measure: str
    test: str
    a: str
    b: str
    statistic: float | None
    df: int | None
    p_value: float | None
    p_adjusted: float | None
    n: int | None
    method: str
    note: str = ""


@dataclass
class MetricsReport:
    models: list[str]
    record_ids: list[str]
    cells: list[Cell]
    aggregates: list[Aggregate]
    stats: list[StatRow] = field(default_factory=list)

    def aggregate_matrix(self, measure: str) -> tuple[list[str], np.ndarray]:
        """Complete blocks only: records where every model has an aggregate."""
        by_key = {(a.record_id, a.model): a.metrics for a in self.aggregates}
        rows, ids = [], []
        for rid in self.record_ids:
            vals = [by_key.get((rid, m)) for m in self.models]
            if all(v is not None for v in vals):
                ids.append(rid)
                rows.append([getattr(v, measure) for v in vals])
        return ids, np.array(rows, dtype=float).reshape(len(rows), len(self.models))


def _evaluate_cell(backend, problem, record, model, idx, aliases, entity_model, mode, reference_final):
    summary = record.summaries[idx]
    try:
        result = pipeline.run(
            backend,
            problem,
            summary.text,
            model_id=model.model_id,
            aliases=aliases,
            with_catalog=not model.finetuned,
            entity_model=entity_model,
        )
    except StageError as e:
        return Cell(record.id, model.label, idx, summary.source, None, (), str(e)), e.cause
    except (CASError, ValueError) as e:
        return Cell(record.id, model.label, idx, summary.source, None, (), str(e)), e
    cand = result.final_sequence
    generated_final, _ = execute(problem, cand, mode)
    metrics = compare(record.reference, cand, problem.initial, reference_final, generated_final)
    return Cell(record.id, model.label, idx, summary.source, metrics, cand), None


def evaluate(
    records: Sequence[TaskRecord],
    models: Sequence[ModelProfile],
    problems: Mapping[str, ProblemDefinition] | Callable[[str], ProblemDefinition],
    backend: Backend,
    *,
    aliases: AliasTable,
    entity_model: str = pipeline.ENTITY_MODEL,
    strict: bool = False,
    workers: int = 1,
    mode: str = ASSISTED,
) -> MetricsReport:
    """Run every (record, model, summary) cell and assemble the report.

    Cell failures are recorded and the run continues, except that a
    fixture miss aborts the run when ``strict`` is set. Cells may run in
    parallel; assembly order is always (record, model, summary).
    """
    resolve = problems if callable(problems) else problems.__getitem__
    cache: dict[str, ProblemDefinition] = {}
    reference_finals: dict[str, WorldState] = {}
    for r in records:
        if r.problem_ref not in cache:
            cache[r.problem_ref] = resolve(r.problem_ref)
        reference_finals[r.id] = execute(cache[r.problem_ref], r.reference, mode)[0]

    jobs = [(r, m, i) for r in records for m in models for i in range(len(r.summaries))]

    def work(job):
        r, m, i = job
        return _evaluate_cell(
            backend, cache[r.problem_ref], r, m, i, aliases, entity_model, mode, reference_finals[r.id]
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(j) for j in jobs]

    cells = []
    for cell, cause in outcomes:
        if cause is not None:
            if strict and isinstance(cause, FixtureMiss):
                raise cause
            log.warning("cell %s/%s/%d failed: %s", cell.record_id, cell.model, cell.summary_index, cell.error)
        cells.append(cell)

    aggregates = []
    for r in records:
        for m in models:
            group = [c for c in cells if c.record_id == r.id and c.model == m.label]
            ok = all(c.ok for c in group)
            aggregates.append(Aggregate(r.id, m.label, aggregate([c.metrics for c in group]) if ok else None))

    report = MetricsReport([m.label for m in models], [r.id for r in records], cells, aggregates)
    if len(models) >= 2:
        report.stats = run_statistics(report)
    return report


def run_statistics(report: MetricsReport) -> list[StatRow]:
    rows: list[StatRow] = []
    models = report.models
    pairs = list(itertools.combinations(range(len(models)), 2))
    for measure in MEASURES:
        ids, matrix = report.aggregate_matrix(measure)
        try:
            fr = stats.friedman(matrix)
            rows.append(StatRow(measure, "friedman", "*", "*", fr.statistic, fr.df, fr.p_value, None, fr.n, fr.method))
        except DegenerateSample as e:
            rows.append(StatRow(measure, "friedman", "*", "*", None, None, None, None, len(ids), "friedman", str(e)))
        for i, j in pairs:
            rows.append(_pairwise(measure, models[i], models[j], matrix[:, i], matrix[:, j], len(pairs)))
        if measure == "final_state_similarity":
            for j, label in enumerate(models):
                rows.append(_one_sample(measure, label, matrix[:, j]))
    return rows


def _pairwise(measure, a, b, x, y, m) -> StatRow:
    try:
        res = stats.wilcoxon_signed_rank(x, y)
    except AllZeroDifferences as e:
        return StatRow(measure, "wilcoxon", a, b, None, None, None, None, len(x), "wilcoxon", str(e))
    except ValueError as e:
        return StatRow(measure, "wilcoxon", a, b, None, None, None, None, len(x), "wilcoxon", str(e))
    return StatRow(
        measure, "wilcoxon", a, b, res.statistic, None, res.p_value, stats.bonferroni(res.p_value, m), res.n, res.method
    )


def _one_sample(measure, label, x) -> StatRow:
    try:
        res = stats.wilcoxon_one_sample(x, 0.0)
    except (AllZeroDifferences, ValueError) as e:
        return StatRow(measure, "wilcoxon_one_sample", label, "0", None, None, None, None, len(x), "wilcoxon", str(e))
    return StatRow(measure, "wilcoxon_one_sample", label, "0", res.statistic, None, res.p_value, None, res.n, res.method)


# -- report files ----------------------------------------------------------------

CELL_COLUMNS = ["record_id", "model", "summary_index", "summary_source", "status", *MEASURES, "candidate", "error"]
AGGREGATE_COLUMNS = ["record_id", "model", "status", *MEASURES]
STAT_COLUMNS = ["measure", "test", "a", "b", "statistic", "df", "p_value", "p_adjusted", "n", "method", "note"]


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def _csv(header: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cells_csv(report: MetricsReport) -> str:
    rows = []
    for c in report.cells:
        vals = [_num(getattr(c.metrics, m)) if c.ok else "" for m in MEASURES]
        rows.append([c.record_id, c.model, c.summary_index, c.summary_source, "ok" if c.ok else "failed",
                     *vals, format_sequence(c.candidate), c.error])
    return _csv(CELL_COLUMNS, rows)


def aggregates_csv(report: MetricsReport) -> str:
    rows = []
    for a in report.aggregates:
        vals = [_num(getattr(a.metrics, m)) if a.metrics else "" for m in MEASURES]
        rows.append([a.record_id, a.model, "ok" if a.metrics else "failed", *vals])
    return _csv(AGGREGATE_COLUMNS, rows)


def stats_csv(report: MetricsReport) -> str:
    rows = [[s.measure, s.test, s.a, s.b, _num(s.statistic), _num(s.df), _num(s.p_value),
             _num(s.p_adjusted), _num(s.n), s.method, s.note] for s in report.stats]
    return _csv(STAT_COLUMNS, rows)


def summary_text(report: MetricsReport) -> str:
    failed = sum(1 for c in report.cells if not c.ok)
    out = [
        f"records: {len(report.record_ids)}  models: {len(report.models)}  "
        f"cells: {len(report.cells)} ({failed} failed)",
        "",
        "mean of per-record aggregates:",
        f"  {'model':<12}" + "".join(f"{m:>24}" for m in MEASURES),
    ]
    for label in report.models:
        vals = [a.metrics for a in report.aggregates if a.model == label and a.metrics]
        means = [np.mean([getattr(v, m) for v in vals]) if vals else float("nan") for m in MEASURES]
        out.append(f"  {label:<12}" + "".join(f"{x:>24.4f}" for x in means))
    if report.stats:
        out += ["", "tests (pairwise p-values Bonferroni-corrected):"]
        for s in report.stats:
            if s.p_value is None:
                out.append(f"  {s.measure:<24} {s.test:<20} {s.a} vs {s.b}: {s.note}")
                continue
            p = s.p_adjusted if s.p_adjusted is not None else s.p_value
            df = f"({s.df})" if s.df is not None else ""
            who = "all models" if s.test == "friedman" else f"{s.a} vs {s.b}"
            out.append(f"  {s.measure:<24} {s.test + df:<20} {who}: stat={s.statistic:.4g} p={p:.4g}")
    else:
        out += ["", "tests: omitted (fewer than two models)"]
    return "\n".join(out) + "\n"


def write_report(report: MetricsReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "cells.csv": cells_csv(report),
        "aggregates.csv": aggregates_csv(report),
        "stats.csv": stats_csv(report),
        "summary.txt": summary_text(report),
    }
    written = []
    for name, text in files.items():
        p = out / name
        p.write_text(text, encoding="utf-8", newline="")
        written.append(p)
    return written


def problem_library(directory: str | Path | None = None) -> Callable[[str], ProblemDefinition]:
    """Resolve problem names to files in ``directory`` (bundled problems by default)."""
    from cas.resources import problem_dir

    root = Path(directory) if directory else problem_dir()
    return lambda name: load_problem(root / f"{name}.problem")
