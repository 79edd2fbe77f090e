"""The concordance statistic: preference matrix, disorder and tau.

The disorder of an arrangement is the minimum number of pairwise
disagreements separating it from any arrangement in which each group's
observations sit consecutively; it equals total cross-group pairs minus
the Linear Ordering Problem optimum of the preference matrix.  Tau
rescales disorder by the maximum attainable disorder so that 1 means
fully separated groups and 0 means maximal interleaving.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, DegenerateStatisticError
from .groups import Arrangement, GroupSizes
from .lop import MAX_BRUTEFORCE_GROUPS, PreferenceMatrix, lop_exact_dp


@dataclass(frozen=True)
class PentagonalParams:
    """Odd-group count b and the generalized pentagonal number GP_b."""

    b: int
    gp: int

    @classmethod
    def from_sizes(cls, sizes: GroupSizes) -> "PentagonalParams":
        b = sizes.odd_group_count()
        return cls(b, pentagonal(b))


@dataclass(frozen=True)
class DisorderResult:
    """Disorder, its maximum, tau and the closest consecutive group order."""

    disorder: Fraction
    max_disorder: int
    tau: Fraction
    closest_order: tuple[int, ...]
    total_pairs: int
    degenerate: bool = False


def preference_matrix(arr: Arrangement, sizes: GroupSizes) -> PreferenceMatrix:
    """Count how often each group precedes each other group.

    A cross-group pair in distinct blocks credits one full unit to the
    earlier group's direction; a cross-group pair inside one tie-block
    credits half a unit to each direction.
    """
    arr.validate_against(sizes)
    k = sizes.k
    half = [[0] * k for _ in range(k)]
    placed = [0] * k
    for block in arr.blocks:
        counts = Counter(block)
        for g, c in counts.items():
            row_inc = 2 * c
            for r in range(k):
                if r != g and placed[r]:
                    half[r][g] += placed[r] * row_inc
        for g1, g2 in itertools.combinations(sorted(counts), 2):
            w = counts[g1] * counts[g2]
            half[g1][g2] += w
            half[g2][g1] += w
        for g, c in counts.items():
            placed[g] += c
    return PreferenceMatrix(tuple(tuple(row) for row in half))


def pentagonal(b: int) -> int:
    """Generalized pentagonal number: l(3l-1)/2 for b=2l, l(3l+1)/2 for b=2l+1."""
    if b < 0:
        raise ValueError(f"b must be nonnegative, got {b}")
    ell, parity = divmod(b, 2)
    if parity == 0:
        return ell * (3 * ell - 1) // 2
    return ell * (3 * ell + 1) // 2


def max_disorder(sizes: GroupSizes) -> int:
    """Maximum disorder attainable for the given group sizes.

    Formula value: total cross pairs - (GP_b + sum of floor(n_r*n_s/2)),
    with b the number of odd-sized groups.  A value of 0 (e.g. sizes (1,1))
    makes tau undefined; callers flag that case as degenerate.
    """
    if sizes.k < 2:
        raise DegenerateStatisticError(
            "disorder needs at least two groups to be defined"
        )
    k = sizes.k
    halves = sum(
        sizes.sizes[r] * sizes.sizes[s] // 2
        for r in range(k)
        for s in range(r + 1, k)
    )
    gp = pentagonal(sizes.odd_group_count())
    return sizes.total_cross_pairs() - (gp + halves)


def max_disorder_bruteforce(sizes: GroupSizes, budget: int = 10**7) -> int:
    """Maximum disorder found by enumerating every distinct arrangement.

    Independent check of the closed formula; refuses when the number of
    arrangements exceeds the budget.
    """
    count = sizes.multinomial()
    if count > budget:
        raise CapacityError(
            f"{count} arrangements exceed the brute-force budget of {budget}"
        )
    from .exact import enumerate_distribution

    dist = enumerate_distribution(sizes, "disorder", budget=budget)
    return int(max(dist.support))


def disorder(arr: Arrangement, sizes: GroupSizes) -> DisorderResult:
    """Disorder, tau and the closest consecutive group order for an arrangement."""
    if sizes.k < 2:
        raise DegenerateStatisticError(
            "disorder needs at least two groups to be defined"
        )
    total = sizes.total_cross_pairs()
    solution = lop_exact_dp(preference_matrix(arr, sizes))
    dis = total - solution.value
    md = max_disorder(sizes)
    if md == 0:
        # disorder is necessarily 0 here; report full concordance, flagged
        return DisorderResult(dis, md, Fraction(1), solution.order, total, True)
    return DisorderResult(dis, md, 1 - dis / md, solution.order, total, False)


def disorder_oracle(arr: Arrangement, sizes: GroupSizes) -> Fraction:
    """Disorder recomputed the slow way: min over all k! group orders of the
    summed weights of observation pairs the order reverses.

    Shares nothing with the preference-matrix construction or the subset DP,
    which is the point.
    """
    arr.validate_against(sizes)
    k = sizes.k
    if k > MAX_BRUTEFORCE_GROUPS:
        raise CapacityError(
            f"oracle supports at most {MAX_BRUTEFORCE_GROUPS} groups, got {k}"
        )
    flat = [(i, g) for i, block in enumerate(arr.blocks) for g in block]
    best: Fraction | None = None
    for perm in itertools.permutations(range(k)):
        rank = {g: r for r, g in enumerate(perm)}
        doubled = 0
        for a in range(len(flat)):
            block_a, g_a = flat[a]
            for b in range(a + 1, len(flat)):
                block_b, g_b = flat[b]
                if g_a == g_b:
                    continue
                if block_a == block_b:
                    doubled += 1  # tied pair: half a disagreement either way
                elif rank[g_b] < rank[g_a]:
                    doubled += 2
        value = Fraction(doubled, 2)
        if best is None or value < best:
            best = value
    assert best is not None
    return best
