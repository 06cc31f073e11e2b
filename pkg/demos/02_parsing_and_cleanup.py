"""
From raw model text to a clean action sequence
==============================================

Model output comes in two shapes: VirtualHome-style script lines and
loose ``verb(args)`` text. Both parse to the same representation, and
post-processing maps verbs onto the action catalog and drops the rest.
"""

from cas.actionseq import format_sequence, parse_generic, parse_vh
from cas.domain import load_problem
from cas.pipeline import post_process
from cas.resources import default_aliases

script = """\
[Walk] <kitchen> (1)
[Open] <refrigerator> (1)
[Grab] <water_bottle> (1)
"""
print(format_sequence(parse_vh(script)))

chatty = """\
Sure! Here is what I would do:

1. go_to(Kitchen)
2. go_to(Kitchen)
3. Wait()
4. Open(fridge)
5. SwitchOn(coffee_maker)
6. Juggle(plate)
7. Talk("Coffee is brewing.")

Let me know if you need anything else.
"""
raw = parse_generic(chatty)
print(format_sequence(raw))

###############################################################################
# Cleanup. Each dropped action is logged with the rule that removed it.

home = load_problem("home")
aliases = default_aliases()
final, removed = post_process(raw, home.schemas, home.entities, aliases)
print("kept:   ", format_sequence(final))
for r in removed:
    print("removed:", r)

# cleanup is idempotent and accounts for every input action
again, nothing = post_process(final, home.schemas, home.entities, aliases)
assert again == final and not nothing
assert len(final) + len(removed) == len(raw)
