"""Lenient execution of action sequences against a problem's initial state.

Impossible actions (unknown verb, wrong arguments, unmet preconditions)
are skipped rather than failing the run. In ``assisted`` mode a missing
``robot_at`` precondition is first satisfied by an implicit ``move_to``,
the way a planner-backed tool fills in navigation the user left out.
Object possession and other preconditions are never auto-satisfied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from cas.actionseq import ActionInstance
from cas.domain import ROBOT_AT, ProblemDefinition, WorldState, applicable, apply
from cas.errors import GroundingError

STRICT = "strict_skip"
ASSISTED = "assisted"
MODES = (STRICT, ASSISTED)

EXECUTED = "executed"
SKIPPED = "skipped"


@dataclass(frozen=True)
class TraceStep:
    action: ActionInstance
    status: str
    reason: str = ""
    implicit: bool = False

    def line(self) -> str:
        reason = self.reason or ("implicit" if self.implicit else "-")
        return f"{self.status} {reason} {self.action}"


def execute(
    problem: ProblemDefinition,
    seq: Iterable[ActionInstance],
    mode: str = ASSISTED,
    initial: WorldState | None = None,
) -> tuple[WorldState, list[TraceStep]]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    state = problem.initial if initial is None else initial
    trace: list[TraceStep] = []
    for action in seq:
        try:
            ground = problem.ground(action)
        except GroundingError as e:
            trace.append(TraceStep(action, SKIPPED, e.reason))
            continue

        if mode == ASSISTED:
            state = _navigate(problem, state, ground, trace)

        eff = ground.resolve(state)
        if eff is None:
            trace.append(TraceStep(action, SKIPPED, "unresolved"))
        elif not eff.pre <= state.fluents:
            trace.append(TraceStep(action, SKIPPED, "precondition"))
        else:
            state = apply(state, ground)
            trace.append(TraceStep(action, EXECUTED))
    return state, trace


def _navigate(problem, state, ground, trace) -> WorldState:
    eff = ground.resolve(state)
    if eff is None or "move_to" not in problem.schemas:
        return state
    targets = sorted(f.args[0] for f in eff.missing(state) if f.predicate == ROBOT_AT)
    # two different robot_at preconditions can never hold together
    if len(targets) != 1:
        return state
    move = ActionInstance("move_to", (targets[0],))
    try:
        nav = problem.ground(move)
    except GroundingError:
        return state
    if not applicable(state, nav):
        return state
    trace.append(TraceStep(move, EXECUTED, implicit=True))
    return apply(state, nav)


def final_state(problem: ProblemDefinition, seq: Iterable[ActionInstance], mode: str = ASSISTED) -> WorldState:
    return execute(problem, seq, mode)[0]


def format_trace(trace: Iterable[TraceStep]) -> str:
    return "\n".join(step.line() for step in trace)
