"""Two-sample Mann-Whitney U test.

Self-contained implementation with an exact null distribution for small,
tie-free samples and a tie-corrected normal approximation otherwise. The
exact path is deliberately independent of any third-party statistics
library so it can be cross-checked against brute-force enumeration.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

# Exact distribution is used up to this pooled sample size (tie-free only).
EXACT_CUTOFF = 20


class Alternative(enum.Enum):
    """Direction of the first sample relative to the second."""

    TWO_SIDED = "two-sided"
    GREATER = "greater"
    LESS = "less"


class Method(enum.Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal-approx"


@dataclass(frozen=True)
class MwuResult:
    u_statistic: float
    p_value: float
    method: Method


def rank_with_ties(pooled: Sequence[float]) -> list[float]:
    """Midranks 1..n; tied values get the average of their rank positions."""
    if not pooled:
        raise ValueError("cannot rank an empty sequence")
    for v in pooled:
        if not math.isfinite(v):
            raise ValueError(f"non-finite value in sample: {v!r}")
    order = sorted(range(len(pooled)), key=pooled.__getitem__)
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        midrank = (i + j) / 2.0 + 1.0
        for m in range(i, j + 1):
            ranks[order[m]] = midrank
        i = j + 1
    return ranks


def _tie_group_sizes(pooled: Iterable[float]) -> list[int]:
    return [len(list(g)) for _, g in itertools.groupby(sorted(pooled))]


@lru_cache(maxsize=None)
def _u_count(u: int, n1: int, n2: int) -> int:
    """Number of rank assignments with statistic value u, by the standard
    counting recurrence f(u; n1, n2) = f(u - n2; n1 - 1, n2) + f(u; n1, n2 - 1).
    """
    if u < 0 or u > n1 * n2:
        return 0
    if n1 == 0 or n2 == 0:
        return 1 if u == 0 else 0
    return _u_count(u - n2, n1 - 1, n2) + _u_count(u, n1, n2 - 1)


@lru_cache(maxsize=None)
def _u_cdf_counts(n1: int, n2: int) -> tuple[int, ...]:
    """Cumulative counts of the null distribution: entry u is #{U <= u}."""
    total = 0
    out = []
    for u in range(n1 * n2 + 1):
        total += _u_count(u, n1, n2)
        out.append(total)
    return tuple(out)


def exact_p(u: float, n1: int, n2: int, alternative: Alternative) -> float:
    """Exact p-value of U under the tie-free null distribution.

    Tails include the observed value; the two-sided p-value is
    min(1, 2 * min(lower tail, upper tail)).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("both sample sizes must be >= 1")
    if not 0 <= u <= n1 * n2:
        raise ValueError(f"u={u} outside [0, {n1 * n2}]")
    cdf = _u_cdf_counts(n1, n2)
    total = cdf[-1]
    # U is integral in the tie-free case; floor/ceil make half-integer
    # inputs land on the correct inclusive tail either way. Tail counts are
    # kept integral until the final division so that swapped samples yield
    # bitwise-identical two-sided p-values.
    lower_count = cdf[math.floor(u)]
    k_hi = math.ceil(u)
    upper_count = total - (cdf[k_hi - 1] if k_hi >= 1 else 0)
    lower = lower_count / total
    upper = upper_count / total
    if alternative is Alternative.LESS:
        return lower
    if alternative is Alternative.GREATER:
        return upper
    return min(1.0, 2.0 * min(lower, upper))


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_approx_p(
    u: float,
    n1: int,
    n2: int,
    tie_groups: Iterable[int],
    alternative: Alternative,
) -> float:
    """Tie-corrected normal approximation with continuity correction.

    The 0.5 correction is applied toward the mean n1*n2/2. A degenerate
    pooled sample (all values identical) yields p = 1.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("both sample sizes must be >= 1")
    n = n1 + n2
    tie_term = sum(t**3 - t for t in tie_groups)
    if n < 2:
        raise ValueError("pooled sample too small for the approximation")
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return 1.0
    sd = math.sqrt(var)
    mean = n1 * n2 / 2.0
    if alternative is Alternative.TWO_SIDED:
        big_u = max(u, n1 * n2 - u)
        return min(1.0, 2.0 * _norm_sf((big_u - mean - 0.5) / sd))
    if alternative is Alternative.GREATER:
        return _norm_sf((u - mean - 0.5) / sd)
    # LESS: lower tail, correction shifts u up toward the mean.
    return 1.0 - _norm_sf((u - mean + 0.5) / sd)


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    alternative: Alternative = Alternative.TWO_SIDED,
) -> MwuResult:
    """Mann-Whitney U test of ``a`` against ``b``.

    Returns U for the first sample (number of (x, y) pairs with x > y,
    ties counted half). Uses the exact distribution when the pooled sample
    is tie-free and no larger than ``EXACT_CUTOFF``, otherwise the
    tie-corrected normal approximation.
    """
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be non-empty")
    pooled = list(a) + list(b)
    ranks = rank_with_ties(pooled)
    rank_sum_a = sum(ranks[:n1])
    u = rank_sum_a - n1 * (n1 + 1) / 2.0
    tie_groups = _tie_group_sizes(pooled)
    has_ties = any(t > 1 for t in tie_groups)
    if not has_ties and n1 + n2 <= EXACT_CUTOFF:
        return MwuResult(u, exact_p(u, n1, n2, alternative), Method.EXACT)
    p = normal_approx_p(u, n1, n2, tie_groups, alternative)
    return MwuResult(u, p, Method.NORMAL_APPROX)
