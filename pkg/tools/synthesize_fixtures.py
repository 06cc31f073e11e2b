"""Generate the bundled replay fixtures for the synthetic dataset.

For every (record, summary) this writes the entity-inference response, one
translation response per configured model, and the summary response for
each record. Responses are derived from the reference sequence by seeded,
per-model noise: dropped steps, spelled-out navigation, extra find/look
steps, repeats, waits, unknown verbs, invented entities. Fine-tuned
profiles answer in VirtualHome script with VirtualHome verbs; pretrained
profiles answer in numbered ``verb(args)`` lines wrapped in chatter.

Prompts are built with the package's own prompt functions, so fixtures
must be regenerated whenever a template changes:

    python tools/synthesize_fixtures.py [OUT_DIR]
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass

from cas import pipeline
from cas.actionseq import ActionInstance, is_quoted
from cas.domain import load_problem
from cas.harness import load_config, load_dataset, summary_prompt
from cas.llm import ChatRequest, FixtureStore, fingerprint
from cas.resources import dataset_dir, fixture_dir, models_config


@dataclass(frozen=True)
class Profile:
    drop: float
    nav: float
    find: float
    dup: float
    wait: float
    unknown_verb: float
    invent: float
    swap: float
    sign_off: float


PROFILES = {
    "mistral-7b-qlora": Profile(0.25, 0.30, 0.20, 0.12, 0.10, 0.12, 0.15, 0.10, 0.20),
    "phi-4": Profile(0.30, 0.20, 0.15, 0.08, 0.05, 0.15, 0.12, 0.15, 0.30),
    "phi-4-qlora": Profile(0.18, 0.30, 0.20, 0.10, 0.08, 0.08, 0.10, 0.08, 0.20),
    "claude-3-5-sonnet-v2": Profile(0.06, 0.30, 0.08, 0.03, 0.02, 0.03, 0.04, 0.04, 0.15),
}

VH_VERBS = {
    "move_to": ["Walk", "Walk", "Run"],
    "grab": ["Grab"],
    "put_down": ["PutObjBack", "Drop"],
    "put_on": ["PutBack", "PutIn"],
    "open": ["Open"],
    "close": ["Close"],
    "turn_on": ["SwitchOn"],
    "turn_off": ["SwitchOff"],
    "say": ["Talk"],
    "give": ["Give"],
    "find": ["Find"],
    "look_at": ["LookAt", "TurnTo"],
}
CASUAL_VERBS = {"move_to": ["move_to", "move_to", "Walk", "go_to"], "grab": ["grab", "grab", "pick_up"]}
UNKNOWN_VERBS = ["Wipe", "Pour", "Scrub", "Wash", "Carry", "Greet_person", "Knock"]
INVENTED = ["mailbox", "sofa", "fridge", "kitchen_table", "mug", "front_porch", "couch", "shelf"]
CHATTER_HEAD = ["Here are the steps:", "Sure! Here is the plan:", "Steps to complete the task:", ""]
CHATTER_TAIL = ["", "", "Let me know if you need anything else.", "The task is complete."]
SIGN_OFF = ['"Done!"', '"All set."', '"I have finished the task."']


def entity_response(rng: random.Random, record, problem) -> str:
    names = []
    for a in record.reference:
        for arg in a.args:
            if not is_quoted(arg) and arg not in names:
                names.append(arg)
    if rng.random() < 0.3:
        names.append(rng.choice(problem.entity_names))
    if rng.random() < 0.15:
        names.append(rng.choice(INVENTED))
    names = list(dict.fromkeys(names)) or [rng.choice(problem.entity_names)]
    style = rng.random()
    if style < 0.6:
        return ", ".join(names)
    if style < 0.85:
        return "Relevant entities: " + ", ".join(names)
    return "\n".join(f"- {n}" for n in names)


def perturb(rng: random.Random, reference, shortlist, problem, prof: Profile) -> list[ActionInstance]:
    out: list[ActionInstance] = []
    locations = [n for n, e in problem.entities.items() if e.category == "location"]
    pool = list(shortlist) or locations
    for i, act in enumerate(reference):
        target = next((a for a in act.args if not is_quoted(a)), None)
        if target and act.name != "move_to" and rng.random() < prof.nav:
            out.append(ActionInstance("move_to", (target,)))
        if target and act.name == "grab" and rng.random() < prof.find:
            out.append(ActionInstance("find", (target,)))
        if rng.random() < prof.wait:
            out.append(ActionInstance("wait", ()))
        if rng.random() < prof.unknown_verb:
            out.append(ActionInstance(rng.choice(UNKNOWN_VERBS).lower(), (target or rng.choice(pool),)))
        if i > 0 and rng.random() < prof.drop:
            continue
        args = list(act.args)
        if args and not is_quoted(args[-1]):
            if rng.random() < prof.invent:
                args[-1] = rng.choice(INVENTED)
            elif rng.random() < prof.swap:
                args[-1] = rng.choice(pool)
        new = ActionInstance(act.name, tuple(args))
        out.append(new)
        if rng.random() < prof.dup:
            out.append(new)
        if act.name == "move_to" and target in problem.entities and problem.entities[target].category == "person":
            if rng.random() < 0.5:
                out.append(ActionInstance("look_at", (target,)))
    if rng.random() < prof.sign_off:
        out.append(ActionInstance("say", (rng.choice(SIGN_OFF),)))
    return out


def render_vh(rng: random.Random, actions) -> str:
    lines = []
    for a in actions:
        verb = rng.choice(VH_VERBS.get(a.name, [a.name.title().replace("_", "")]))
        if verb == "PutObjBack":
            args = a.args[:1]
        else:
            args = a.args
        lines.append(" ".join([f"[{verb}]"] + [f"<{x}> ({rng.randint(1, 3)})" for x in args]))
    return "\n".join(lines)


def render_generic(rng: random.Random, actions) -> str:
    lines = []
    head = rng.choice(CHATTER_HEAD)
    if head:
        lines += [head, ""]
    numbered = rng.random() < 0.7
    for i, a in enumerate(actions, start=1):
        name = rng.choice(CASUAL_VERBS.get(a.name, [a.name]))
        call = f"{name}({', '.join(a.args)})"
        lines.append(f"{i}. {call}" if numbered else f"- {call}")
    tail = rng.choice(CHATTER_TAIL)
    if tail:
        lines += ["", tail]
    text = "\n".join(lines)
    if rng.random() < 0.2:
        text = "```\n" + text + "\n```"
    return text


def main(out=None, dataset=None) -> int:
    config = load_config(models_config(), env={})
    store = FixtureStore(out or fixture_dir())
    store.root.mkdir(parents=True, exist_ok=True)
    for old in store.root.glob("*.txt"):
        old.unlink()
    records = load_dataset(dataset or dataset_dir())
    problems = {}
    written = 0
    for record in records:
        problem = problems.setdefault(record.problem_ref, load_problem(record.problem_ref))
        req = ChatRequest(summary_prompt(record.task_prose, record.per_action_nl), config.summary_model)
        model_summary = next(s.text for s in record.summaries if s.source == "model")
        store.put(fingerprint(req), model_summary + "\n")
        written += 1
        for summary in record.summaries:
            rng = random.Random(f"entities:{record.id}:{summary.text}")
            resp = entity_response(rng, record, problem)
            req = ChatRequest(pipeline.entity_prompt(problem.entity_names, summary.text), config.entity_model)
            store.put(fingerprint(req), resp)
            written += 1
            shortlist = pipeline.parse_shortlist(resp)
            for model in config.models:
                rng = random.Random(f"translate:{record.id}:{summary.text}:{model.model_id}")
                actions = perturb(rng, record.reference, shortlist, problem, PROFILES[model.model_id])
                text = render_vh(rng, actions) if model.finetuned else render_generic(rng, actions)
                catalog = None if model.finetuned else problem.catalog()
                prompt = pipeline.translation_prompt(shortlist, summary.text, catalog)
                store.put(fingerprint(ChatRequest(prompt, model.model_id)), text + "\n")
                written += 1
    print(f"wrote {written} fixtures to {store.root}")
    return 0


if __name__ == "__main__":
    sys.exit(main(*sys.argv[1:2]))
