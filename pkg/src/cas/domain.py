"""Symbolic household domain: entities, fluents, world states, action schemas.

Schemas are STRIPS-style with one extension: a ``where`` clause binds
auxiliary variables from the current state before preconditions are
checked. ``grab(?o)`` can therefore require ``robot_at(?l)`` for whatever
room ``?o`` currently sits in, without the caller naming the room.

The builtin relation ``located(?x, ?l)`` resolves an entity's place: a
location is its own place, a held object is wherever the robot is, any
other entity is wherever its ``at(?x, ?l)`` fluent puts it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from cas.actionseq import ActionInstance, is_quoted, normalize_name
from cas.errors import (
    ArityMismatch,
    NotApplicable,
    ParseError,
    RoleMismatch,
    UnknownAction,
    UnknownEntity,
    ValidationError,
)

CATEGORIES = ("object", "location", "person")
ROLES = CATEGORIES + ("any", "text")
LOCATED = "located"
ROBOT_AT = "robot_at"


@dataclass(frozen=True, order=True)
class Fluent:
    predicate: str
    args: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if not 1 <= len(self.args) <= 3:
            raise ValidationError(f"fluent {self.predicate} must have 1-3 args, got {len(self.args)}")

    @classmethod
    def parse(cls, text: str) -> "Fluent":
        m = _FLUENT.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"not a fluent: {text!r}")
        args = tuple(a.strip() for a in m.group("args").split(","))
        return cls(m.group("pred"), args)

    def substitute(self, binding: Mapping[str, str]) -> "Fluent":
        return Fluent(self.predicate, tuple(binding.get(a, a) for a in self.args))

    def variables(self) -> set[str]:
        return {a for a in self.args if a.startswith("?")}

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(self.args)})"


def fluents(*texts: str) -> frozenset[Fluent]:
    return frozenset(Fluent.parse(t) for t in texts)


@dataclass(frozen=True)
class WorldState:
    """An immutable set of ground fluents with exactly one ``robot_at``."""

    fluents: frozenset[Fluent]

    def __post_init__(self):
        if not isinstance(self.fluents, frozenset):
            object.__setattr__(self, "fluents", frozenset(self.fluents))
        n = sum(1 for f in self.fluents if f.predicate == ROBOT_AT)
        if n != 1:
            raise ValidationError(f"world state needs exactly one robot_at fluent, found {n}")

    @classmethod
    def of(cls, *texts: str) -> "WorldState":
        return cls(fluents(*texts))

    def __contains__(self, f: object) -> bool:
        return f in self.fluents

    def __iter__(self) -> Iterator[Fluent]:
        return iter(sorted(self.fluents))

    def __len__(self) -> int:
        return len(self.fluents)

    @property
    def robot_location(self) -> str:
        return next(f.args[0] for f in self.fluents if f.predicate == ROBOT_AT)

    def difference(self, other: "WorldState") -> int:
        """Size of the symmetric fluent difference."""
        return len(self.fluents ^ other.fluents)

    def __str__(self) -> str:
        return "{" + ", ".join(str(f) for f in self) + "}"


@dataclass(frozen=True)
class Param:
    var: str
    role: str = "any"

    def __str__(self) -> str:
        return f"{self.var}: {self.role}"


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[Param, ...]
    where: tuple[Fluent, ...] = ()
    pre: tuple[Fluent, ...] = ()
    add: tuple[Fluent, ...] = ()
    delete: tuple[Fluent, ...] = ()

    def __post_init__(self):
        for attr in ("params", "where", "pre", "add", "delete"):
            v = getattr(self, attr)
            if not isinstance(v, tuple):
                object.__setattr__(self, attr, tuple(v))
        bound = set()
        for p in self.params:
            if not p.var.startswith("?"):
                raise ValidationError(f"{self.name}: parameter {p.var!r} must start with '?'")
            if p.role not in ROLES:
                raise ValidationError(f"{self.name}: unknown role {p.role!r}")
            if p.var in bound:
                raise ValidationError(f"{self.name}: duplicate parameter {p.var}")
            bound.add(p.var)
        for w in self.where:
            bound |= w.variables()
        for t in self.pre + self.add + self.delete:
            free = t.variables() - bound
            if free:
                raise ValidationError(
                    f"{self.name}: variables {sorted(free)} in {t} are neither parameters nor bound by where"
                )

    def signature(self) -> str:
        """Predicate-form rendering used in prompts, e.g. ``put_on(obj, surface)``."""
        return f"{self.name}({', '.join(p.var[1:] for p in self.params)})"

    @classmethod
    def simple(cls, header: str, *, pre=(), add=(), delete=(), where=()) -> "ActionSchema":
        """Build a schema from compact text, mainly for tests: ``simple("grab(?o: object)", ...)``."""
        name, params = _parse_header(header, 0)
        conv = lambda ts: tuple(Fluent.parse(t) for t in ts)  # noqa: E731
        return cls(name, params, conv(where), conv(pre), conv(add), conv(delete))


@dataclass(frozen=True)
class Entity:
    name: str
    category: str
    location: str | None = None


@dataclass(frozen=True)
class Effects:
    """Fully ground preconditions and effects of an action in a given state."""

    pre: frozenset[Fluent]
    add: frozenset[Fluent]
    delete: frozenset[Fluent]

    def missing(self, state: WorldState) -> frozenset[Fluent]:
        return frozenset(f for f in self.pre if f not in state)


@dataclass(frozen=True)
class GroundAction:
    """A schema with its parameters bound; ``where`` variables stay open."""

    schema: ActionSchema
    action: ActionInstance
    entities: Mapping[str, Entity] = field(compare=False, repr=False)

    @property
    def binding(self) -> dict[str, str]:
        return {p.var: a for p, a in zip(self.schema.params, self.action.args)}

    def resolve(self, state: WorldState) -> Effects | None:
        """Bind ``where`` variables against ``state``; None if they cannot be bound."""
        binding = self.binding
        for template in self.schema.where:
            if not _bind(template, binding, state, self.entities):
                return None
        sub = lambda ts: frozenset(t.substitute(binding) for t in ts)  # noqa: E731
        add = sub(self.schema.add)
        # add-after-delete: a fluent both deleted and added survives
        return Effects(sub(self.schema.pre), add, sub(self.schema.delete) - add)

    def __str__(self) -> str:
        return str(self.action)


def _bind(template: Fluent, binding: dict[str, str], state: WorldState, entities) -> bool:
    t = template.substitute(binding)
    if t.predicate == LOCATED:
        subject, place = t.args
        where = _locate(subject, state, entities)
        if where is None:
            return False
        if place.startswith("?"):
            binding[place] = where
            return True
        return place == where
    open_vars = t.variables()
    if not open_vars:
        return t in state
    for f in sorted(state.fluents):
        if f.predicate != t.predicate or len(f.args) != len(t.args):
            continue
        trial = {}
        for want, have in zip(t.args, f.args):
            if want.startswith("?"):
                if trial.setdefault(want, have) != have:
                    break
            elif want != have:
                break
        else:
            binding.update(trial)
            return True
    return False


def _locate(name: str, state: WorldState, entities) -> str | None:
    ent = entities.get(name)
    if ent is not None and ent.category == "location":
        return name
    if Fluent("holding", (name,)) in state:
        return state.robot_location
    for f in sorted(state.fluents):
        if f.predicate == "at" and len(f.args) == 2 and f.args[0] == name:
            return f.args[1]
    return None


@dataclass(frozen=True)
class ProblemDefinition:
    entities: Mapping[str, Entity]
    schemas: Mapping[str, ActionSchema]
    initial: WorldState
    name: str = "problem"

    def __post_init__(self):
        unknown = sorted(
            {a for f in self.initial.fluents for a in f.args if not is_quoted(a)} - set(self.entities)
        )
        if unknown:
            raise ValidationError(f"initial state references undeclared entities: {', '.join(unknown)}")

    @property
    def entity_names(self) -> list[str]:
        """Entity names in declaration order."""
        return list(self.entities)

    def catalog(self) -> list[ActionSchema]:
        return list(self.schemas.values())

    def ground(self, action: ActionInstance) -> GroundAction:
        schema = self.schemas.get(action.name)
        if schema is None:
            raise UnknownAction(f"no schema named {action.name!r}")
        return ground(schema, action.args, self.entities)


def ground(schema: ActionSchema, args: Iterable[str], entities: Mapping[str, Entity]) -> GroundAction:
    """Bind ``schema`` parameters to ``args``, checking arity, existence and roles."""
    args = tuple(args)
    if len(args) != len(schema.params):
        raise ArityMismatch(f"{schema.name} takes {len(schema.params)} argument(s), got {len(args)}")
    for param, arg in zip(schema.params, args):
        if param.role == "text":
            if not is_quoted(arg):
                raise RoleMismatch(f"{schema.name}: {param.var} expects quoted text, got {arg}")
            continue
        if is_quoted(arg):
            raise RoleMismatch(f"{schema.name}: {param.var} expects an entity, got text")
        ent = entities.get(arg)
        if ent is None:
            raise UnknownEntity(f"{arg!r} is not an entity of this problem")
        if param.role != "any" and ent.category != param.role:
            raise RoleMismatch(f"{schema.name}: {param.var} expects {param.role}, {arg} is a {ent.category}")
    return GroundAction(schema, ActionInstance(schema.name, args), entities)


def applicable(state: WorldState, action: GroundAction) -> bool:
    eff = action.resolve(state)
    return eff is not None and eff.pre <= state.fluents


def apply(state: WorldState, action: GroundAction) -> WorldState:
    eff = action.resolve(state)
    if eff is None or not eff.pre <= state.fluents:
        raise NotApplicable(f"{action} is not applicable in {state}")
    return WorldState((state.fluents - eff.delete) | eff.add)


# -- problem file --------------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_FLUENT = re.compile(rf"(?P<pred>{_NAME})\s*\((?P<args>[^()]*)\)")
_ENTITY = re.compile(rf"^(?P<name>{_NAME})\s*:\s*(?P<cat>{_NAME})(?:\s+at\s+(?P<loc>{_NAME}))?$")
_HEADER = re.compile(rf"^(?P<name>{_NAME})\s*\((?P<params>[^()]*)\)$")
_CLAUSE = re.compile(r"^(?P<kind>where|pre|add|del)\s*:\s*(?P<body>.*)$")
_SECTIONS = ("entities", "schemas", "initial")


def _parse_header(text: str, lineno: int) -> tuple[str, tuple[Param, ...]]:
    m = _HEADER.match(text.strip())
    if m is None:
        raise ParseError(f"bad schema header {text.strip()!r}", lineno, 1)
    params = []
    for part in filter(None, (p.strip() for p in m.group("params").split(","))):
        var, _, role = (s.strip() for s in part.partition(":"))
        params.append(Param(var, role or "any"))
    return m.group("name").lower(), tuple(params)


def _parse_fluent_list(body: str, lineno: int, col: int) -> list[Fluent]:
    out = []
    pos = 0
    body = body.rstrip()
    while pos < len(body):
        while pos < len(body) and body[pos] in " \t,":
            pos += 1
        if pos >= len(body):
            break
        m = _FLUENT.match(body, pos)
        if m is None:
            raise ParseError("expected fluent 'pred(arg, ...)'", lineno, col + pos)
        args = tuple(a.strip() for a in m.group("args").split(","))
        if any(not a for a in args):
            raise ParseError("empty fluent argument", lineno, col + pos)
        try:
            out.append(Fluent(m.group("pred").lower(), args))
        except ValidationError as e:
            raise ParseError(str(e), lineno, col + pos) from None
        pos = m.end()
    return out


def parse_problem(text: str, name: str = "problem") -> ProblemDefinition:
    """Parse the line-oriented problem format (see ``docs/problem-format.md``)."""
    section = None
    entities: dict[str, Entity] = {}
    schemas: dict[str, ActionSchema] = {}
    initial: list[Fluent] = []
    current: dict | None = None
    saw_content = False

    def finish_schema():
        if current is None:
            return
        try:
            schema = ActionSchema(
                current["name"],
                current["params"],
                tuple(current["where"]),
                tuple(current["pre"]),
                tuple(current["add"]),
                tuple(current["del"]),
            )
        except ValidationError as e:
            raise ParseError(str(e), current["line"], 1) from None
        if schema.name in schemas:
            raise ValidationError(f"schema names must be unique: {schema.name!r} declared twice")
        schemas[schema.name] = schema

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        saw_content = True
        col = len(stripped) - len(stripped.lstrip()) + 1
        line = stripped.strip()
        if line.startswith("["):
            m = re.fullmatch(r"\[\s*(\w+)\s*\]", line)
            if m is None or m.group(1).lower() not in _SECTIONS:
                raise ParseError(f"unknown section {line!r}", lineno, col)
            finish_schema()
            current = None
            section = m.group(1).lower()
            continue
        if section is None:
            raise ParseError("content before first section header", lineno, col)
        if section == "entities":
            m = _ENTITY.match(line)
            if m is None:
                raise ParseError("expected 'name: category [at location]'", lineno, col)
            ename = m.group("name").lower()
            cat = m.group("cat").lower()
            if cat not in CATEGORIES:
                raise ParseError(f"unknown category {cat!r}", lineno, col + line.index(m.group("cat")))
            if ename in entities:
                raise ValidationError(f"entity {ename!r} declared twice (line {lineno})")
            loc = m.group("loc")
            entities[ename] = Entity(ename, cat, loc.lower() if loc else None)
        elif section == "schemas":
            if col == 1:
                finish_schema()
                sname, params = _parse_header(line, lineno)
                current = {"name": sname, "params": params, "line": lineno,
                           "where": [], "pre": [], "add": [], "del": []}
            else:
                if current is None:
                    raise ParseError("clause outside of a schema", lineno, col)
                m = _CLAUSE.match(line)
                if m is None:
                    raise ParseError("expected 'where|pre|add|del: fluent, ...'", lineno, col)
                body_col = col + m.start("body")
                current[m.group("kind")].extend(_parse_fluent_list(m.group("body"), lineno, body_col))
        else:
            initial.extend(_parse_fluent_list(line, lineno, col))
    finish_schema()
    if not saw_content:
        raise ParseError("empty problem file", 1, 1)

    for ent in entities.values():
        if ent.location is not None:
            if ent.location not in entities:
                raise ValidationError(f"entity {ent.name!r} placed at undeclared {ent.location!r}")
            initial.append(Fluent("at", (ent.name, ent.location)))
    try:
        state = WorldState(frozenset(initial))
    except ValidationError as e:
        raise ValidationError(f"[initial]: {e}") from None
    return ProblemDefinition(entities, schemas, state, name)


def load_problem(source: str | Path) -> ProblemDefinition:
    """Load a problem from a path, or from a bundled problem name such as ``household``."""
    path = Path(source)
    if not path.exists() and path.suffix == "" and "/" not in str(source):
        from cas.resources import problem_path

        path = problem_path(str(source))
    return parse_problem(path.read_text(encoding="utf-8"), name=path.stem)


def normalize_entity(text: str) -> str:
    return normalize_name(text)
