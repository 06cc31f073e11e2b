from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cas.domain import load_problem
from cas.errors import EmptyParse, EmptyShortlist, FixtureMiss, StageError
from cas.llm import ChatRequest, ChatResponse, ReplayBackend
from cas.pipeline import (
    CONSECUTIVE_DUPLICATE,
    EXTRANEOUS_ACTION,
    NONEXISTENT_ENTITY,
    UNMAPPED,
    EntityShortlist,
    entity_prompt,
    infer_entities,
    parse_shortlist,
    post_process,
    render_catalog,
    run,
    translate,
    translation_prompt,
)
from conftest import GOLDEN, WORKED_FIXTURES, PHONE_CALL, act

RAW_WORKED = (
    act("walk", "roommate"),
    act("find", "phone"),
    act("grab", "phone"),
    act("turnto", "roommate"),
    act("lookat", "roommate"),
    act("pointat", "phone"),
    act("talk", '"I found my phone!"'),
    act("putobjback", "phone"),
)


class Canned:
    """Backend answering every request with the same text."""

    backend_id = "canned"

    def __init__(self, text: str):
        self.text = text
        self.requests: list[ChatRequest] = []

    def complete(self, req):
        self.requests.append(req)
        return ChatResponse(self.text, self.backend_id)


@pytest.fixture(scope="module")
def household():
    return load_problem("household")


@pytest.fixture(scope="module")
def home():
    return load_problem("home")


@pytest.fixture(scope="module")
def worked_backend():
    return ReplayBackend(WORKED_FIXTURES)


def test_entity_prompt_golden(household):
    golden = (GOLDEN / "entity_prompt.txt").read_text(encoding="utf-8")
    assert entity_prompt(household.entity_names, PHONE_CALL) == golden


def test_translation_prompt_golden():
    golden = (GOLDEN / "translation_prompt.txt").read_text(encoding="utf-8")
    assert translation_prompt(["phone", "roommate"], PHONE_CALL + ".") == golden


def test_translation_prompt_with_catalog(household):
    prompt = translation_prompt(["phone"], "Grab the phone.", household.catalog())
    base = translation_prompt(["phone"], "Grab the phone.")
    assert prompt.startswith(base + "\n\n")
    assert "grab(obj)" in prompt and render_catalog(household.catalog()) in prompt


def test_prompt_fill_leaves_braces_alone():
    assert "{x}" in translation_prompt(["a"], "say {x}")


def test_infer_entities_worked_example(household, worked_backend):
    sl = infer_entities(worked_backend, household, PHONE_CALL)
    assert sl.entities == ("phone", "roommate")
    assert sl.unknown == {"phone", "roommate"}


def test_infer_entities_known(household):
    sl = infer_entities(Canned("kitchen, refrigerator"), household, "Get a drink")
    assert sl.entities == ("kitchen", "refrigerator") and sl.unknown == frozenset()


def test_infer_entities_empty(household):
    with pytest.raises(EmptyShortlist):
        infer_entities(Canned(""), household, "Get a drink")


@pytest.mark.parametrize(
    "text, expected",
    [
        ("phone, roommate", ["phone", "roommate"]),
        ("Relevant entities: Coffee Table, desk.", ["coffee_table", "desk"]),
        ("- phone\n- roommate\n- phone", ["phone", "roommate"]),
        ("1. `kitchen`\n2. `refrigerator`", ["kitchen", "refrigerator"]),
    ],
)
def test_parse_shortlist(text, expected):
    assert parse_shortlist(text) == expected


def test_shortlist_invariants():
    with pytest.raises(EmptyShortlist):
        EntityShortlist(())
    with pytest.raises(ValueError):
        EntityShortlist(("a",), frozenset({"b"}))


def test_translate_worked_example(worked_backend):
    sl = EntityShortlist(("phone", "roommate"))
    _, seq = translate(worked_backend, sl, PHONE_CALL + ".", model_id="worked-example")
    assert seq == RAW_WORKED


def test_translate_refusal():
    with pytest.raises(EmptyParse):
        translate(Canned("I cannot help with that."), EntityShortlist(("a",)), "x", model_id="m")


def test_post_process_rules(household, aliases):
    entities = set(household.entities) | {"roommate"}
    out, log = post_process(
        [act("walk", "roommate"), act("wait"), act("walk", "roommate")], household.schemas, entities, aliases
    )
    assert out == (act("move_to", "roommate"),)
    assert [(r.action.name, r.reason) for r in log] == [
        ("wait", EXTRANEOUS_ACTION),
        ("move_to", CONSECUTIVE_DUPLICATE),
    ]
    out, log = post_process([act("grab", "unicorn")], household.schemas, household.entities, aliases)
    assert out == () and log[0].reason == NONEXISTENT_ENTITY
    assert post_process([], household.schemas, household.entities, aliases) == ((), [])


def test_post_process_unmapped_and_arity(household, aliases):
    raw = [act("fly", "kitchen"), act("put_on", "clock"), act("grab", "clock", "desk"), act("say", '"hi"')]
    out, log = post_process(raw, household.schemas, household.entities, aliases)
    assert out == (act("grab", "clock"), act("say", '"hi"'))
    assert [r.reason for r in log] == [UNMAPPED, UNMAPPED]


def test_post_process_non_adjacent_repeats_survive(household, aliases):
    raw = [act("grab", "clock"), act("find", "desk"), act("grab", "clock")]
    out, _ = post_process(raw, household.schemas, household.entities, aliases)
    assert len(out) == 3


def test_worked_example_end_to_end(home, aliases, worked_backend):
    result = run(worked_backend, home, PHONE_CALL + ".", model_id="worked-example", aliases=aliases,
                 with_catalog=False)
    assert result.raw_sequence == RAW_WORKED
    assert result.final_sequence
    assert_result_invariants(result, home)
    assert result.final_sequence[0] == act("move_to", "roommate")
    assert act("say", '"I found my phone!"') in result.final_sequence


def assert_result_invariants(result, problem):
    final = result.final_sequence
    assert all(a.name in problem.schemas for a in final)
    assert all(x.startswith('"') or x in problem.entities for a in final for x in a.args)
    assert all(a != b for a, b in zip(final, final[1:]))
    assert len(final) + len(result.removal_log) == len(result.raw_sequence)


def test_run_errors(home, aliases, worked_backend):
    with pytest.raises(ValueError):
        run(worked_backend, home, "  ", model_id="m", aliases=aliases)
    with pytest.raises(StageError) as err:
        run(worked_backend, home, PHONE_CALL + ".", model_id="unrecorded-model", aliases=aliases)
    assert err.value.stage == "translate"
    assert isinstance(err.value.__cause__, FixtureMiss)
    with pytest.raises(StageError) as err:
        run(worked_backend, home, "Water the plant", model_id="m", aliases=aliases)
    assert err.value.stage == "infer_entities"


VERBS = ["walk", "run", "grab", "put_back", "putobjback", "wait", "noop", "fly", "talk", "turn_on", "give", "serve"]
ARGS = ["kitchen", "clock", "vacuum", "desk", "unicorn", '"hello"', "Living Room"]
raw_action = st.builds(lambda v, a: act(v, *a), st.sampled_from(VERBS), st.lists(st.sampled_from(ARGS), max_size=3))


@given(st.lists(raw_action, max_size=12))
def test_post_process_idempotent_and_accounted(household, aliases, raw):
    once, log = post_process(raw, household.schemas, household.entities, aliases)
    twice, log2 = post_process(once, household.schemas, household.entities, aliases)
    assert twice == once and log2 == []
    assert len(once) + len(log) == len(raw)
    assert all(a.name in household.schemas for a in once)
    assert all(a != b for a, b in zip(once, once[1:]))


def test_post_process_random_accounting(household, aliases):
    rng = random.Random(3)
    for _ in range(200):
        raw = [act(rng.choice(VERBS), *rng.sample(ARGS, rng.randint(0, 2))) for _ in range(rng.randint(0, 10))]
        out, log = post_process(raw, household.schemas, household.entities, aliases)
        assert len(out) + len(log) == len(raw)
