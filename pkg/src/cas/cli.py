"""Command-line entry point.

    cas translate --problem home --command "Bring me the mail" --backend replay:DIR
    cas simulate  --problem home --seq plan.txt --mode assisted
    cas compare   --problem home --ref ref.txt --cand cand.txt
    cas eval      --dataset DIR --models models.yaml --out report/ [--strict]
    cas record    --dataset DIR --models models.yaml

Exit status: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from cas import __version__
from cas.actionseq import AliasTable, canonicalize_all, load_aliases
from cas.domain import load_problem
from cas.errors import CASError, EmptyParse, ParseError
from cas.llm import LiveBackend, RecordingBackend, ReplayBackend
from cas.metrics import compare
from cas.pipeline import ENTITY_MODEL, parse_translation, run
from cas.resources import alias_path, dataset_dir, models_config
from cas.simulator import ASSISTED, MODES, execute, format_trace

log = logging.getLogger("cas")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cas", description="Natural-language commands to robot action sequences.")
    p.add_argument("--version", action="version", version=f"cas {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    p.add_argument("--aliases", type=Path, default=None, help="alias table (default: bundled)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("translate", help="run the pipeline on one command")
    t.add_argument("--problem", required=True, help="problem file or bundled name (household, home)")
    t.add_argument("--command", required=True, dest="nl_command")
    t.add_argument("--backend", required=True, help="replay:DIR | record:DIR | live")
    t.add_argument("--model", default="claude-3-5-sonnet-v2", help="translation model id")
    t.add_argument("--entity-model", default=ENTITY_MODEL)
    t.add_argument("--catalog", action="store_true", help="include the action catalog (pretrained models)")
    t.add_argument("--json", action="store_true", help="print the result as JSON")

    s = sub.add_parser("simulate", help="execute a sequence and print the trace and final state")
    s.add_argument("--problem", required=True)
    s.add_argument("--seq", required=True, type=Path, help="sequence file (VirtualHome or verb(args) lines)")
    s.add_argument("--mode", choices=MODES, default=ASSISTED)

    c = sub.add_parser("compare", help="score a candidate sequence against a reference")
    c.add_argument("--ref", required=True, type=Path)
    c.add_argument("--cand", required=True, type=Path)
    c.add_argument("--problem", required=True)
    c.add_argument("--mode", choices=MODES, default=ASSISTED)

    for name, text in (("eval", "evaluate models over a dataset"), ("record", "populate fixtures from live backends")):
        e = sub.add_parser(name, help=text)
        e.add_argument("--dataset", type=Path, default=None, help="record directory (default: bundled)")
        e.add_argument("--models", type=Path, default=None, help="models config (default: bundled)")
        e.add_argument("--problems", type=Path, default=None, help="problem directory (default: bundled)")
        if name == "eval":
            e.add_argument("--out", required=True, type=Path)
            e.add_argument("--strict", action="store_true", help="abort on the first fixture miss")
    return p


def _backend(spec: str):
    kind, _, arg = spec.partition(":")
    if kind == "replay" and arg:
        return ReplayBackend(arg)
    if kind == "record" and arg:
        return RecordingBackend(LiveBackend(), arg)
    if kind == "live" and not arg:
        return LiveBackend()
    raise UsageError(f"bad --backend {spec!r}; expected replay:DIR, record:DIR or live")


def _read_sequence(path: Path, aliases: AliasTable):
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return ()
    try:
        seq = parse_translation(text)
    except EmptyParse:
        raise ParseError(f"{path}: no actions found") from None
    return canonicalize_all(seq, aliases)


def cmd_translate(args, aliases) -> int:
    problem = load_problem(args.problem)
    result = run(
        _backend(args.backend),
        problem,
        args.nl_command,
        model_id=args.model,
        aliases=aliases,
        with_catalog=args.catalog,
        entity_model=args.entity_model,
    )
    if args.json:
        doc = {
            "command": result.command,
            "entities": list(result.shortlist.entities),
            "unknown_entities": sorted(result.shortlist.unknown),
            "raw_text": result.raw_text,
            "raw_sequence": [str(a) for a in result.raw_sequence],
            "final_sequence": [str(a) for a in result.final_sequence],
            "removed": [{"action": str(r.action), "reason": r.reason} for r in result.removal_log],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(result.describe())
    return 0


def cmd_simulate(args, aliases) -> int:
    problem = load_problem(args.problem)
    final, trace = execute(problem, _read_sequence(args.seq, aliases), args.mode)
    if trace:
        print(format_trace(trace))
    print("final state:")
    for f in final:
        print(f"  {f}")
    return 0


def cmd_compare(args, aliases) -> int:
    problem = load_problem(args.problem)
    ref = _read_sequence(args.ref, aliases)
    cand = _read_sequence(args.cand, aliases)
    human = execute(problem, ref, args.mode)[0]
    generated = execute(problem, cand, args.mode)[0]
    values = compare(ref, cand, problem.initial, human, generated)
    for name, value in values.as_dict().items():
        print(f"{name}: {value:g}")
    return 0


def _eval_inputs(args, aliases):
    from cas.harness import load_config, load_dataset, problem_library

    config = load_config(args.models or models_config())
    records = load_dataset(args.dataset or dataset_dir(), aliases)
    return config, records, problem_library(args.problems)


def cmd_eval(args, aliases) -> int:
    from cas.harness import evaluate, summary_text, write_report

    config, records, problems = _eval_inputs(args, aliases)
    report = evaluate(
        records,
        config.models,
        problems,
        config.make_backend(),
        aliases=aliases,
        entity_model=config.entity_model,
        strict=args.strict,
        workers=config.workers,
    )
    for path in write_report(report, args.out):
        log.info("wrote %s", path)
    sys.stdout.write(summary_text(report))
    return 0


def cmd_record(args, aliases) -> int:
    from cas.harness import evaluate

    config, records, problems = _eval_inputs(args, aliases)
    report = evaluate(
        records,
        config.models,
        problems,
        config.make_backend("record"),
        aliases=aliases,
        entity_model=config.entity_model,
        workers=config.workers,
    )
    failed = sum(1 for c in report.cells if not c.ok)
    print(f"recorded {len(report.cells) - failed} of {len(report.cells)} cells into {config.fixtures}")
    return 0 if failed == 0 else 2


COMMANDS = {
    "translate": cmd_translate,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "eval": cmd_eval,
    "record": cmd_record,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        aliases = load_aliases(args.aliases or alias_path())
        return COMMANDS[args.command](args, aliases)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except (CASError, OSError, ValueError) as e:
        print(f"cas: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
