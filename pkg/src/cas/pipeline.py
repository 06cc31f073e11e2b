"""The command-to-action-sequence pipeline.

Three stages, each consuming the previous one's output:

1. entity inference: ask a model which world entities the command involves;
2. translation: ask a (possibly different) model for the action steps;
3. post-processing: map raw verbs onto the catalog and drop actions that
   are unmapped, mention undeclared entities, repeat the previous action,
   or do nothing.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from cas.actionseq import (
    EXTRANEOUS,
    ActionInstance,
    ActionSequence,
    AliasTable,
    canonicalize,
    is_quoted,
    normalize_name,
    parse_generic,
    parse_vh,
)
from cas.domain import ActionSchema, ProblemDefinition
from cas.errors import EmptyParse, EmptyShortlist, ParseError, StageError
from cas.llm import Backend, ChatRequest
from cas.resources import prompt_path

log = logging.getLogger(__name__)

ENTITY_MODEL = "codestral-22b-v0.1"

UNMAPPED = "unmapped"
NONEXISTENT_ENTITY = "nonexistent_entity"
CONSECUTIVE_DUPLICATE = "consecutive_duplicate"
EXTRANEOUS_ACTION = "extraneous"


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    text = prompt_path(name).read_text(encoding="utf-8")
    return text[:-1] if text.endswith("\n") else text


def fill(template: str, **values: str) -> str:
    # plain replacement: commands may legitimately contain braces
    for key, value in values.items():
        template = template.replace("{" + key + "}", value)
    return template


def entity_prompt(entities: Iterable[str], command: str) -> str:
    return fill(load_template("entity_inference"), entities=", ".join(entities), command=command)


def render_catalog(catalog: Iterable[ActionSchema]) -> str:
    return "\n".join(s.signature() for s in catalog)


def translation_prompt(
    entities: Iterable[str], command: str, catalog: Iterable[ActionSchema] | None = None
) -> str:
    prompt = fill(load_template("translation"), entities=", ".join(entities), command=command)
    if catalog is not None:
        prompt += "\n\n" + fill(load_template("translation_catalog"), catalog=render_catalog(catalog))
    return prompt


@dataclass(frozen=True)
class EntityShortlist:
    entities: tuple[str, ...]
    unknown: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.entities:
            raise EmptyShortlist("entity shortlist is empty")
        if not self.unknown <= set(self.entities):
            raise ValueError("unknown entities must be a subset of the shortlist")


_LIST_MARK = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*")


def parse_shortlist(text: str) -> list[str]:
    """Split a comma/newline separated answer into normalized entity tokens."""
    tokens: list[str] = []
    for line in text.replace("`", "").splitlines():
        line = _LIST_MARK.sub("", line)
        if ":" in line:
            line = line.rsplit(":", 1)[1]
        for part in line.split(","):
            tok = normalize_name(part.strip().strip("\"'.;"))
            if tok and tok not in tokens:
                tokens.append(tok)
    return tokens


def infer_entities(
    backend: Backend,
    problem: ProblemDefinition,
    command: str,
    *,
    model_id: str = ENTITY_MODEL,
    temperature: float = 0.0,
) -> EntityShortlist:
    if not problem.entities:
        raise ValueError("problem declares no entities")
    req = ChatRequest(entity_prompt(problem.entity_names, command), model_id, temperature=temperature)
    tokens = parse_shortlist(backend.complete(req).text)
    if not tokens:
        raise EmptyShortlist("model response contained no entity tokens")
    # hallucinated entities are kept and flagged; post-processing filters later
    unknown = frozenset(t for t in tokens if t not in problem.entities)
    return EntityShortlist(tuple(tokens), unknown)


def parse_translation(text: str) -> ActionSequence:
    try:
        return parse_generic(text)
    except EmptyParse:
        pass
    try:
        seq = parse_vh(text)
    except ParseError:
        seq = ()
    if not seq:
        raise EmptyParse("no actions recovered from translation output")
    return seq


def translate(
    backend: Backend,
    shortlist: EntityShortlist,
    command: str,
    *,
    model_id: str,
    catalog: Iterable[ActionSchema] | None = None,
    temperature: float = 0.0,
) -> tuple[str, ActionSequence]:
    """Ask ``model_id`` for the steps of ``command``.

    Pass ``catalog`` for pretrained models; fine-tuned models already know
    their action vocabulary and get the bare prompt.
    """
    req = ChatRequest(
        translation_prompt(shortlist.entities, command, catalog), model_id, temperature=temperature
    )
    text = backend.complete(req).text
    return text, parse_translation(text)


@dataclass(frozen=True)
class Removal:
    action: ActionInstance
    reason: str

    def __str__(self) -> str:
        return f"{self.reason}: {self.action}"


def post_process(
    raw: Iterable[ActionInstance],
    catalog: Mapping[str, ActionSchema] | Iterable[ActionSchema],
    entities: Iterable[str],
    aliases: AliasTable,
) -> tuple[ActionSequence, list[Removal]]:
    """Canonicalize ``raw`` and drop actions that fail the cleanup rules.

    Rules are checked per action in a fixed order, in one left-to-right
    pass: unmapped name (or too few arguments), nonexistent entity,
    duplicate of the last kept action, extraneous verb. Extra arguments
    beyond a schema's arity are truncated.
    """
    if not isinstance(catalog, Mapping):
        catalog = {s.name: s for s in catalog}
    entities = set(entities)
    kept: list[ActionInstance] = []
    removed: list[Removal] = []
    for action in raw:
        canon, _ = canonicalize(action, aliases)
        extraneous = canon.name == EXTRANEOUS
        if extraneous:
            canon = ActionInstance(normalize_name(action.name), canon.args)
        schema = catalog.get(canon.name)
        if schema is not None and len(canon.args) > len(schema.params):
            log.warning("truncating %s to %d argument(s)", canon, len(schema.params))
            canon = ActionInstance(canon.name, canon.args[: len(schema.params)])

        if not extraneous and (schema is None or len(canon.args) < len(schema.params)):
            removed.append(Removal(canon, UNMAPPED))
        elif any(not is_quoted(a) and a not in entities for a in canon.args):
            removed.append(Removal(canon, NONEXISTENT_ENTITY))
        elif kept and kept[-1] == canon:
            removed.append(Removal(canon, CONSECUTIVE_DUPLICATE))
        elif extraneous:
            removed.append(Removal(canon, EXTRANEOUS_ACTION))
        else:
            kept.append(canon)
    return tuple(kept), removed


@dataclass
class PipelineResult:
    command: str
    shortlist: EntityShortlist
    raw_text: str
    raw_sequence: ActionSequence
    final_sequence: ActionSequence
    removal_log: list[Removal] = field(default_factory=list)

    def describe(self) -> str:
        lines = [
            f"command: {self.command}",
            f"entities: {', '.join(self.shortlist.entities)}",
        ]
        if self.shortlist.unknown:
            lines.append(f"unknown entities: {', '.join(sorted(self.shortlist.unknown))}")
        lines.append("raw sequence:")
        lines += [f"  {a}" for a in self.raw_sequence]
        lines.append("final sequence:")
        lines += [f"  {a}" for a in self.final_sequence]
        if self.removal_log:
            lines.append("removed:")
            lines += [f"  {r}" for r in self.removal_log]
        return "\n".join(lines)


def run(
    backend: Backend,
    problem: ProblemDefinition,
    command: str,
    *,
    model_id: str,
    aliases: AliasTable,
    with_catalog: bool = True,
    entity_model: str = ENTITY_MODEL,
) -> PipelineResult:
    if not command.strip():
        raise ValueError("command must be non-empty")
    try:
        shortlist = infer_entities(backend, problem, command, model_id=entity_model)
    except Exception as e:
        raise StageError("infer_entities", e) from e
    try:
        catalog = problem.catalog() if with_catalog else None
        raw_text, raw = translate(backend, shortlist, command, model_id=model_id, catalog=catalog)
    except Exception as e:
        raise StageError("translate", e) from e
    try:
        final, removals = post_process(raw, problem.schemas, problem.entities, aliases)
    except Exception as e:  # pragma: no cover - post_process does not raise on valid input
        raise StageError("post_process", e) from e
    return PipelineResult(command, shortlist, raw_text, raw, final, removals)
