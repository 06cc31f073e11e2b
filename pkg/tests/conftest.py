from __future__ import annotations

from pathlib import Path

import pytest

from cas.actionseq import ActionInstance
from cas.domain import parse_problem
from cas.resources import default_aliases

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
WORKED_FIXTURES = HERE / "fixtures" / "worked_example"

PHONE_CALL = "Find your roommate and tell them they have a phone call"

SMALL_PROBLEM = """\
[entities]
hall: location
kitchen: location
table: location
phone: object at kitchen
mail: object at hall
car: location
bob: person at hall

[schemas]
move_to(?to: any)
  where: located(?to, ?dest), robot_at(?from)
  pre: robot_at(?from)
  add: robot_at(?dest)
  del: robot_at(?from)
grab(?o: object)
  where: at(?o, ?l)
  pre: robot_at(?l), at(?o, ?l)
  add: holding(?o)
  del: at(?o, ?l)
put_on(?o: object, ?s: location)
  pre: robot_at(?s), holding(?o)
  add: at(?o, ?s)
  del: holding(?o)
say(?t: text)

[initial]
robot_at(hall), at(phone, kitchen), at(mail, hall)
"""


def act(name: str, *args: str) -> ActionInstance:
    return ActionInstance(name, tuple(args))


@pytest.fixture(scope="session")
def small_problem():
    return parse_problem(SMALL_PROBLEM, "small")


@pytest.fixture(scope="session")
def aliases():
    return default_aliases()


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
