"""Human-likeness measures comparing a generated sequence to a reference.

All sequence measures treat a whole grounded action (verb plus arguments)
as one token.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, fields
from typing import Hashable, Sequence

from cas.domain import WorldState
from cas.errors import EmptyInput

MEASURES = ("plan_difference", "levenshtein", "final_state_similarity", "length_discrepancy")


def plan_difference(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Order-free distance ``|A - B| + |B - A|`` with multiset semantics."""
    ca, cb = Counter(a), Counter(b)
    return sum((ca - cb).values()) + sum((cb - ca).values())


def levenshtein(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Unit-cost insert/delete/substitute edit distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def final_state_similarity(initial: WorldState, human: WorldState, generated: WorldState) -> float:
    """``1 - |F_h - F_l| / |F_h - I|`` over symmetric fluent differences.

    When the reference leaves the world unchanged the ratio is undefined;
    the result is then 1 if the generated state matches exactly, else 0.
    Not floored at zero.
    """
    denom = human.difference(initial)
    num = human.difference(generated)
    if denom == 0:
        return 1.0 if num == 0 else 0.0
    return 1.0 - num / denom


def length_discrepancy(a: Sequence, b: Sequence) -> int:
    return abs(len(a) - len(b))


@dataclass(frozen=True)
class MetricValues:
    plan_difference: float
    levenshtein: float
    final_state_similarity: float
    length_discrepancy: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def compare(
    reference: Sequence[Hashable],
    candidate: Sequence[Hashable],
    initial: WorldState,
    human_final: WorldState,
    generated_final: WorldState,
) -> MetricValues:
    return MetricValues(
        plan_difference(reference, candidate),
        levenshtein(reference, candidate),
        final_state_similarity(initial, human_final, generated_final),
        length_discrepancy(reference, candidate),
    )


def aggregate(per_summary: Sequence[MetricValues]) -> MetricValues:
    """Field-wise arithmetic mean."""
    if not per_summary:
        raise EmptyInput("cannot aggregate an empty list of metric values")
    n = len(per_summary)
    return MetricValues(
        **{f.name: sum(getattr(m, f.name) for m in per_summary) / n for f in fields(MetricValues)}
    )
