from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cas.domain import (
    ActionSchema,
    Entity,
    Fluent,
    WorldState,
    applicable,
    apply,
    fluents,
    ground,
    load_problem,
    normalize_entity,
    parse_problem,
)
from cas.errors import (
    ArityMismatch,
    NotApplicable,
    ParseError,
    RoleMismatch,
    UnknownEntity,
    ValidationError,
)
from conftest import SMALL_PROBLEM, act

REFERENCE_ENTITIES = (
    "master_bedroom_lamp bedside_table desk master_bedroom hallway bathroom car garage bedroom "
    "bedroom_lamp refrigerator kitchen_cabinets countertop kitchen back_door table living_room "
    "living_room_lamp entrance coffee_table front_door living_room_cabinets vacuum clock"
).split()

ENTITIES = {
    "hall": Entity("hall", "location"),
    "kitchen": Entity("kitchen", "location"),
    "phone": Entity("phone", "object", "kitchen"),
}
MOVE = ActionSchema.simple("move_to(?l: location)", pre=["robot_at(?from)"], add=["robot_at(?l)"],
                           delete=["robot_at(?from)"], where=["robot_at(?from)"])
GRAB = ActionSchema.simple("grab(?o: object)", pre=["robot_at(kitchen)", "at(?o, kitchen)"],
                           add=["holding(?o)"], delete=["at(?o, kitchen)"])
NOOP = ActionSchema.simple("look_at(?x: any)")


def test_normalize_entity_idempotent():
    assert normalize_entity("Living Room") == "living_room"
    assert normalize_entity(normalize_entity(" Back-Door ")) == "back_door"


@given(st.text(alphabet="aB _-3.x", min_size=1))
def test_normalize_entity_idempotent_property(s):
    once = normalize_entity(s) if any(c.isalnum() for c in s) else None
    if once:
        assert normalize_entity(once) == once


def test_fluent_structural_equality():
    assert Fluent.parse("at(phone, kitchen)") == Fluent("at", ("phone", "kitchen"))
    assert Fluent("at", ("a", "b")) != Fluent("at", ("b", "a"))
    with pytest.raises(ValidationError):
        Fluent("p", ())


def test_world_state_needs_one_robot_location():
    with pytest.raises(ValidationError):
        WorldState.of("at(phone, kitchen)")
    with pytest.raises(ValidationError):
        WorldState.of("robot_at(hall)", "robot_at(kitchen)")
    assert WorldState.of("robot_at(hall)").robot_location == "hall"


def test_schema_rejects_unbound_variables():
    with pytest.raises(ValidationError):
        ActionSchema.simple("grab(?o: object)", add=["holding(?x)"])


def test_ground():
    ga = ground(MOVE, ["kitchen"], ENTITIES)
    assert ga.action == act("move_to", "kitchen")
    with pytest.raises(ArityMismatch):
        ground(GRAB, ["phone", "hall"], ENTITIES)
    with pytest.raises(UnknownEntity):
        ground(GRAB, ["unicorn"], ENTITIES)
    with pytest.raises(RoleMismatch):
        ground(GRAB, ["kitchen"], ENTITIES)


def test_applicable():
    at_kitchen = WorldState.of("robot_at(kitchen)", "at(phone, kitchen)")
    at_hall = WorldState.of("robot_at(hall)", "at(phone, kitchen)")
    assert applicable(at_kitchen, ground(MOVE, ["hall"], ENTITIES))
    assert not applicable(at_hall, ground(GRAB, ["phone"], ENTITIES))
    assert applicable(at_hall, ground(NOOP, ["phone"], ENTITIES))


def test_apply():
    s = WorldState.of("robot_at(hall)")
    assert apply(s, ground(MOVE, ["kitchen"], ENTITIES)) == WorldState.of("robot_at(kitchen)")
    assert apply(s, ground(NOOP, ["hall"], ENTITIES)) == s
    with pytest.raises(NotApplicable):
        apply(s, ground(GRAB, ["phone"], ENTITIES))


def test_add_wins_over_delete():
    # moving to where the robot already is must not lose robot_at
    s = WorldState.of("robot_at(hall)")
    assert apply(s, ground(MOVE, ["hall"], ENTITIES)) == s


def test_located_builtin(small_problem):
    s = small_problem.initial
    # move_to an object goes to the object's location
    s2 = apply(s, small_problem.ground(act("move_to", "phone")))
    assert s2.robot_location == "kitchen"
    s3 = apply(s2, small_problem.ground(act("grab", "phone")))
    # a held object travels with the robot
    s4 = apply(s3, small_problem.ground(act("move_to", "phone")))
    assert s4.robot_location == "kitchen"
    assert Fluent("holding", ("phone",)) in s4


def test_bundled_household_matches_entity_list():
    p = load_problem("household")
    assert p.entity_names == REFERENCE_ENTITIES
    assert len(p.entities) == 24
    assert len(p.schemas) == 12


def test_bundled_home_problem_extends_household():
    home = load_problem("home")
    assert set(REFERENCE_ENTITIES) <= set(home.entities)
    assert home.entities["roommate"].category == "person"
    assert set(home.schemas) == set(load_problem("household").schemas)


def test_parse_problem_entities_and_initial(small_problem):
    assert small_problem.entities["phone"] == Entity("phone", "object", "kitchen")
    assert small_problem.initial.fluents >= fluents("robot_at(hall)", "at(phone, kitchen)", "at(bob, hall)")


def test_parse_problem_errors():
    with pytest.raises(ParseError):
        parse_problem("")
    with pytest.raises(ValidationError):
        parse_problem("[entities]\nhall: location\n[initial]\nrobot_at(hall), at(ghost, hall)\n")
    dup = SMALL_PROBLEM.replace("say(?t: text)", "say(?t: text)\nsay(?t: text)")
    with pytest.raises((ParseError, ValidationError)):
        parse_problem(dup)
    with pytest.raises(ParseError) as err:
        parse_problem("[entities]\nhall location\n")
    assert err.value.line == 2


# --- randomized apply properties -------------------------------------------------

NAMES = ["a", "b", "c"]
fluent_st = st.builds(lambda p, x: Fluent(p, (x,)), st.sampled_from(["p", "q", "r"]), st.sampled_from(NAMES))
fset = st.frozensets(fluent_st, max_size=5)
RANDOM_ENTITIES = {n: Entity(n, "object") for n in NAMES}


def make_state(extra):
    return WorldState(frozenset(extra) | {Fluent("robot_at", ("a",))})


@given(fset, fset, fset, fset)
def test_apply_properties(state_f, pre, add, delete):
    schema = ActionSchema("act", (), (), tuple(pre), tuple(add), tuple(delete))
    ga = ground(schema, [], RANDOM_ENTITIES)
    s = make_state(state_f)
    if not applicable(s, ga):
        with pytest.raises(NotApplicable):
            apply(s, ga)
        return
    out = apply(s, ga)
    assert len(out.fluents) == len(set(out.fluents))
    assert out.fluents == (s.fluents - (delete - add)) | add
    # reverse application restores the state when effects are "clean"
    if add.isdisjoint(delete) and delete <= s.fluents and add.isdisjoint(s.fluents):
        back = ActionSchema("undo", (), (), (), tuple(delete), tuple(add))
        assert apply(out, ground(back, [], RANDOM_ENTITIES)) == s
