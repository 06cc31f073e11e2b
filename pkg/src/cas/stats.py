"""Nonparametric tests: Friedman, Wilcoxon signed-rank, Bonferroni.

Ties get mid-ranks throughout. The Wilcoxon test drops zero differences,
enumerates the exact null distribution for up to ``EXACT_MAX_N`` nonzero
differences and otherwise uses the normal approximation with tie and
continuity corrections. All p-values are two-sided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from cas.errors import AllZeroDifferences, DegenerateSample

EXACT_MAX_N = 12
# differences are rounded before ranking so float noise cannot split ties
_DIFF_DECIMALS = 12


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str
    df: int | None = None
    n: int | None = None

    __test__ = False  # not a pytest class


def midranks(values) -> np.ndarray:
    """Ranks starting at 1, ties sharing the average of their positions."""
    return sps.rankdata(np.asarray(values, dtype=float), method="average")


def _tie_term(values) -> float:
    _, counts = np.unique(np.asarray(values), return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def friedman(values) -> TestResult:
    """Friedman test on an ``n x k`` matrix: rows are blocks, columns treatments."""
    data = np.asarray(values, dtype=float)
    if data.ndim != 2:
        raise DegenerateSample("expected a 2-D blocks x treatments matrix")
    n, k = data.shape
    if n < 2 or k < 2:
        raise DegenerateSample(f"need at least 2 blocks and 2 treatments, got {n}x{k}")
    if not np.all(np.isfinite(data)):
        raise DegenerateSample("sample has missing or non-finite cells")

    ranks = np.apply_along_axis(midranks, 1, data)
    rank_sums = ranks.sum(axis=0)
    ties = sum(_tie_term(row) for row in data)
    denom = 1.0 - ties / (n * k * (k * k - 1))
    if denom <= 0:
        # every block constant: no rank variation at all
        return TestResult(0.0, 1.0, "friedman", df=k - 1, n=n)
    stat = (12.0 / (n * k * (k + 1)) * float(np.sum(rank_sums**2)) - 3.0 * n * (k + 1)) / denom
    stat = max(stat, 0.0)
    return TestResult(stat, float(sps.chi2.sf(stat, k - 1)), "friedman", df=k - 1, n=n)


def _null_counts(doubled: list[int]) -> np.ndarray:
    # counts[t] = number of sign assignments whose doubled W+ equals t
    counts = np.zeros(sum(doubled) + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: len(counts) - r]
        counts = counts + shifted
    return counts


def signed_rank_null(ranks) -> dict[float, float]:
    """Exact null distribution of W+ for the given (possibly tied) ranks.

    Every one of the ``2**n`` sign assignments is equally likely; counts are
    accumulated by dynamic programming over doubled ranks, which are
    integers even with mid-rank ties.
    """
    counts = _null_counts([int(round(2 * r)) for r in ranks])
    total = 2 ** len(ranks)
    return {t / 2: int(c) / total for t, c in enumerate(counts) if c}


def _exact_p(ranks, w_plus: float) -> float:
    doubled = [int(round(2 * r)) for r in ranks]
    counts = _null_counts(doubled)
    total = sum(doubled)
    t = np.arange(len(counts))
    observed = abs(2 * int(round(2 * w_plus)) - total)
    extreme = int(counts[np.abs(2 * t - total) >= observed].sum())
    return min(1.0, extreme / 2 ** len(doubled))


def wilcoxon_signed_rank(x, y) -> TestResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and the same length")
    if len(x) < 2:
        raise ValueError("need at least 2 pairs")
    d = np.round(x - y, _DIFF_DECIMALS)
    d = d[d != 0]
    if d.size == 0:
        raise AllZeroDifferences("all paired differences are zero")
    n = d.size
    ranks = midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    stat = min(w_plus, w_minus)

    if n <= EXACT_MAX_N:
        return TestResult(stat, _exact_p(ranks, w_plus), "wilcoxon-exact", n=n)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(ranks) / 48.0
    if var <= 0:
        return TestResult(stat, 1.0, "wilcoxon-normal", n=n)
    z = max(abs(w_plus - mean) - 0.5, 0.0) / np.sqrt(var)
    return TestResult(stat, float(min(1.0, 2.0 * sps.norm.sf(z))), "wilcoxon-normal", n=n)


def wilcoxon_one_sample(x, mu0: float = 0.0) -> TestResult:
    x = np.asarray(x, dtype=float)
    return wilcoxon_signed_rank(x, np.full_like(x, mu0))


def bonferroni(p: float, m: int) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if m < 1:
        raise ValueError("number of comparisons must be >= 1")
    return min(1.0, p * m)
