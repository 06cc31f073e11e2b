"""
Worlds, actions and lenient execution
=====================================

A problem file declares entities, action schemas and an initial state.
Executing a plan against it skips whatever the robot cannot do.
"""

from cas.actionseq import ActionInstance
from cas.domain import load_problem
from cas.simulator import ASSISTED, STRICT, execute, format_trace

home = load_problem("home")
print(f"{len(home.entities)} entities, {len(home.schemas)} action schemas")
for schema in home.catalog():
    print("  ", schema.signature())

# where things start out
print("robot starts in", home.initial.robot_location)
print("mail is", home.entities["mail"].location)

###############################################################################
# A plan as a person might write it: no walking between steps.

plan = [
    ActionInstance("grab", ("mail",)),
    ActionInstance("put_on", ("mail", "table")),
    ActionInstance("grab", ("car",)),  # the car is a place, not an object
]

###############################################################################
# Strict execution skips every step whose preconditions do not hold.

final, trace = execute(home, plan, STRICT)
print(format_trace(trace))

###############################################################################
# Assisted execution walks the robot to where it needs to be first.
# Only location is filled in; the robot never picks things up on its own.

final, trace = execute(home, plan, ASSISTED)
print(format_trace(trace))
changed = final.fluents ^ home.initial.fluents
print("facts changed:", sorted(str(f) for f in changed))
