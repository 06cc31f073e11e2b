"""Action instances and sequences: parsing, canonicalization, serialization.

Two input dialects are understood:

* VirtualHome script lines, ``[Walk] <roommate> (1)``, one action per line.
* Free-form model output containing ``verb(arg, ...)`` patterns, possibly
  wrapped in numbering, bullets, code fences or chatter.

Everything is case-insensitive; the canonical form is lowercase. Quoted
string arguments (speech) are kept verbatim, quotes included.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from cas.errors import EmptyParse, ParseError

log = logging.getLogger(__name__)

EXTRANEOUS = "@extraneous"

_NON_IDENT = re.compile(r"[^a-z0-9_]")
_SEPARATORS = re.compile(r"[\s\-]+")
_UNDERSCORES = re.compile(r"_+")


def normalize_name(text: str) -> str:
    """Lowercase ``text`` and squash it into an identifier token.

    Whitespace and hyphens become underscores, anything else outside
    ``[a-z0-9_]`` is dropped. Idempotent.
    """
    s = _SEPARATORS.sub("_", text.strip().lower())
    s = _NON_IDENT.sub("", s)
    return _UNDERSCORES.sub("_", s).strip("_")


def is_quoted(arg: str) -> bool:
    return len(arg) >= 2 and arg[0] == arg[-1] and arg[0] in "\"'"


def normalize_arg(arg: str) -> str:
    arg = arg.strip()
    if is_quoted(arg):
        # single quotes are folded to double so equal speech compares equal
        return '"' + arg[1:-1] + '"'
    return normalize_name(arg)


@dataclass(frozen=True, order=True)
class ActionInstance:
    name: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("action name must be non-empty")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @classmethod
    def make(cls, name: str, *args: str) -> "ActionInstance":
        """Build an instance with normalized name and arguments."""
        return cls(normalize_name(name), tuple(normalize_arg(a) for a in args))

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.args)})"


ActionSequence = tuple[ActionInstance, ...]


def format_sequence(seq: Iterable[ActionInstance]) -> str:
    return ", ".join(str(a) for a in seq)


# -- VirtualHome script --------------------------------------------------------

_VH_LINE = re.compile(r"^\[(?P<verb>[^\[\]]+)\]\s*(?P<rest>.*)$")
_VH_ARG = re.compile(r"<(?P<arg>[^<>]*)>\s*(?:\(\s*(?P<idx>[\d.]+)\s*\))?\s*")


def parse_vh(text: str) -> ActionSequence:
    """Parse VirtualHome-style script text.

    Blank lines are ignored; object indices are dropped. A line that does
    not follow ``[Verb] <arg> (idx) ...`` raises :class:`ParseError`.
    """
    actions = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        m = _VH_LINE.match(line)
        if m is None:
            raise ParseError("expected '[Verb] <arg> (idx) ...'", lineno, 1)
        rest = m.group("rest")
        args = []
        pos = 0
        while pos < len(rest):
            am = _VH_ARG.match(rest, pos)
            if am is None:
                col = raw.index(rest) + pos + 1 if rest in raw else 1
                raise ParseError("expected '<arg>' in VirtualHome line", lineno, col)
            args.append(normalize_arg(am.group("arg")))
            pos = am.end()
        name = normalize_name(m.group("verb"))
        if not name:
            raise ParseError("empty verb", lineno, 2)
        actions.append(ActionInstance(name, tuple(args)))
    return tuple(actions)


def serialize_vh(seq: Iterable[ActionInstance]) -> str:
    """Render a sequence as VirtualHome script text (index fixed to 1)."""
    lines = []
    for a in seq:
        parts = [f"[{a.name}]"] + [f"<{arg}> (1)" for arg in a.args]
        lines.append(" ".join(parts))
    return "\n".join(lines)


# -- free-form model output ----------------------------------------------------

# a fence line may carry a language tag; inline fences are just delimiters
_FENCE_LINE = re.compile(r"^\s*```[A-Za-z0-9_+-]*\s*$")
_FENCE = re.compile(r"```")
_LIST_MARK = re.compile(r"^\s*(?:(?:\d+|[a-zA-Z])[.)]|[-*•])\s+")
_CALL = re.compile(
    r"(?P<name>[A-Za-z_][A-Za-z0-9_]*)\s*\((?P<args>(?:\"[^\"]*\"|'[^']*'|[^()\"'])*)\)"
)
_ARG_SPLIT = re.compile(r"\s*(\"[^\"]*\"|'[^']*'|[^,]+?)\s*(?:,|$)")


def _split_args(body: str) -> tuple[str, ...]:
    body = body.strip()
    if not body:
        return ()
    return tuple(normalize_arg(m.group(1)) for m in _ARG_SPLIT.finditer(body) if m.group(1).strip())


def extract_actions(text: str) -> tuple[ActionSequence, list[str]]:
    """Scan free text for ``verb(args)`` patterns.

    At most one action is taken per line (the first match), so the output
    is never longer than the number of input lines. Returns the actions and
    the non-blank lines that yielded nothing.
    """
    actions: list[ActionInstance] = []
    skipped: list[str] = []
    for raw in text.splitlines():
        line = "" if _FENCE_LINE.match(raw) else _FENCE.sub(" ", raw)
        line = _LIST_MARK.sub("", line).strip()
        if not line:
            continue
        m = _CALL.search(line)
        if m is None:
            skipped.append(raw.strip())
            continue
        name = normalize_name(m.group("name"))
        args = tuple(a for a in _split_args(m.group("args")) if a)
        actions.append(ActionInstance(name, args))
    return tuple(actions), skipped


def parse_generic(text: str) -> ActionSequence:
    """Tolerant parse of raw model output; raises EmptyParse if nothing is found."""
    actions, skipped = extract_actions(text)
    for line in skipped:
        log.debug("no action pattern in line: %r", line)
    if not actions:
        raise EmptyParse("no actions recovered from model output")
    return actions


# -- alias table ---------------------------------------------------------------


@dataclass(frozen=True)
class Alias:
    target: str
    # indices of raw arguments to keep, in output order; None keeps all
    arg_order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class AliasTable:
    """Keyword mapping from raw verb names onto canonical action names.

    ``canonical`` holds every name considered known as-is. The special
    target ``@extraneous`` marks do-nothing verbs that post-processing drops.
    """

    aliases: dict[str, Alias] = field(default_factory=dict)
    canonical: frozenset[str] = frozenset()

    @property
    def extraneous(self) -> frozenset[str]:
        return frozenset(k for k, v in self.aliases.items() if v.target == EXTRANEOUS)

    def is_known(self, name: str) -> bool:
        return name in self.aliases or name in self.canonical


_ALIAS_KEY = re.compile(r"^(?P<name>[^\[\]]+?)\s*(?:\[(?P<order>[\d,\s]*)\])?$")


def parse_aliases(text: str, canonical: Iterable[str] = ()) -> AliasTable:
    """Parse ``alias1|alias2[1,0] -> canonical`` lines.

    The optional ``[i,j,...]`` suffix on an alias selects and reorders its
    raw arguments. Targets are themselves canonical. An alias may not be a
    canonical name of a different action, which keeps canonicalization
    idempotent.
    """
    aliases: dict[str, Alias] = {}
    names = set(canonical)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError("expected 'alias|... -> canonical'", lineno, 1)
        lhs, rhs = (s.strip() for s in line.split("->", 1))
        target = rhs if rhs == EXTRANEOUS else normalize_name(rhs)
        if not target:
            raise ParseError("empty canonical name", lineno, raw.index("->") + 3)
        if target != EXTRANEOUS:
            names.add(target)
        for part in lhs.split("|"):
            m = _ALIAS_KEY.match(part.strip())
            if m is None or not normalize_name(m.group("name")):
                raise ParseError(f"bad alias {part.strip()!r}", lineno, 1)
            order = None
            if m.group("order") is not None:
                order = tuple(int(i) for i in m.group("order").split(",") if i.strip())
            key = normalize_name(m.group("name"))
            if key in aliases and aliases[key].target != target:
                raise ParseError(f"alias {key!r} mapped twice", lineno, 1)
            aliases[key] = Alias(target, order)
    for key, alias in aliases.items():
        if key in names and alias.target != key:
            raise ParseError(f"alias {key!r} is also a canonical name", 0, 0)
    return AliasTable(aliases, frozenset(names))


def load_aliases(path: str | Path, canonical: Iterable[str] = ()) -> AliasTable:
    return parse_aliases(Path(path).read_text(encoding="utf-8"), canonical)


def canonicalize(action: ActionInstance, aliases: AliasTable) -> tuple[ActionInstance, bool]:
    """Fold ``action`` onto its canonical name.

    Returns the canonical instance and whether the name was known (aliased
    or already canonical). Unknown names come back lowercased but otherwise
    untouched.
    """
    args = tuple(normalize_arg(a) for a in action.args)
    if action.name == EXTRANEOUS:
        return ActionInstance(EXTRANEOUS, args), True
    name = normalize_name(action.name)
    alias = aliases.aliases.get(name)
    if alias is None:
        return ActionInstance(name, args), name in aliases.canonical
    if alias.arg_order is not None:
        args = tuple(args[i] for i in alias.arg_order if i < len(args))
    return ActionInstance(alias.target, args), True


def canonicalize_all(seq: Sequence[ActionInstance], aliases: AliasTable) -> ActionSequence:
    return tuple(canonicalize(a, aliases)[0] for a in seq)
