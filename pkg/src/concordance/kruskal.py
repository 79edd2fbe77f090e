"""Kruskal-Wallis statistic from group rank sums, with tie correction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapacityError, DegenerateStatisticError
from .groups import Arrangement, GroupSizes, midranks


@dataclass(frozen=True)
class KwResult:
    """KW statistic with per-group rank sums and optional tie correction."""

    kw: Fraction
    kw_tie_corrected: Fraction | None
    rank_sums: tuple[Fraction, ...]
    mean_ranks: tuple[Fraction, ...]
    tie_counts: tuple[int, ...]


def kruskal_wallis(arr: Arrangement, sizes: GroupSizes) -> KwResult:
    """KW = -3(n+1) + 12/(n(n+1)) * sum of R_i^2/n_i, with midranks under ties.

    n is the total observation count in both occurrences.  The tie-corrected
    value is present exactly when the arrangement contains ties.
    """
    if sizes.k < 2:
        raise DegenerateStatisticError(
            "Kruskal-Wallis needs at least two groups to be defined"
        )
    arr.validate_against(sizes)
    ranks = midranks(arr).ranks
    labels = arr.labels()
    sums = [Fraction(0)] * sizes.k
    for g, r in zip(labels, ranks):
        sums[g] += r
    n = sizes.n
    kw = -3 * (n + 1) + Fraction(12, n * (n + 1)) * sum(
        s * s / ni for s, ni in zip(sums, sizes.sizes)
    )
    tie_counts = arr.tie_block_sizes()
    corrected = None
    if tie_counts:
        try:
            corrected = tie_correction(kw, tie_counts, n)
        except DegenerateStatisticError:
            corrected = None  # every observation tied: the correction is 0/0
    means = tuple(s / ni for s, ni in zip(sums, sizes.sizes))
    return KwResult(kw, corrected, tuple(sums), means, tie_counts)


def tie_correction(kw: Fraction, tie_counts: Sequence[int], n: int) -> Fraction:
    """Divide KW by 1 - sum(t_i^3 - t_i) / (n^3 - n)."""
    if n < 2:
        raise DegenerateStatisticError("tie correction needs n >= 2")
    kw = Fraction(kw)
    if not tie_counts:
        return kw
    num = sum(t**3 - t for t in tie_counts)
    denom = 1 - Fraction(num, n**3 - n)
    if denom <= 0:
        raise DegenerateStatisticError(
            "tie correction degenerates when all observations tie"
        )
    return kw / denom


def kw_attainable_max(sizes: GroupSizes) -> Fraction:
    """Largest KW value over all arrangements of the given sizes.

    The rank-sum vector's extreme points all come from arrangements with
    consecutive groups, so scanning the k! block orders suffices.
    """
    if sizes.k < 2:
        raise DegenerateStatisticError(
            "Kruskal-Wallis needs at least two groups to be defined"
        )
    if sizes.k > 9:
        raise CapacityError("attainable-maximum scan supports at most 9 groups")
    best: Fraction | None = None
    for perm in itertools.permutations(range(sizes.k)):
        labels: list[int] = []
        for g in perm:
            labels.extend([g] * sizes.sizes[g])
        kw = kruskal_wallis(Arrangement.untied(labels), sizes).kw
        if best is None or kw > best:
            best = kw
    assert best is not None
    return best
