"""Kendall distance and rank correlation between two permutations."""
from __future__ import annotations

from typing import Sequence

from .errors import InputDataError


def kendall_distance(p1: Sequence[object], p2: Sequence[object]) -> int:
    """Number of item pairs ordered oppositely by the two permutations."""
    _validate(p1, p2)
    pos2 = {item: i for i, item in enumerate(p2)}
    order = [pos2[item] for item in p1]
    n = len(order)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if order[i] > order[j]:
                count += 1
    return count


def kendall_correlation(p1: Sequence[object], p2: Sequence[object]) -> float:
    """Rank correlation 1 - 2*d / (n*(n-1)/2), in [-1, 1]."""
    _validate(p1, p2)
    n = len(p1)
    if n < 2:
        raise InputDataError("correlation needs at least two items")
    d = kendall_distance(p1, p2)
    return 1.0 - 2.0 * d / (n * (n - 1) / 2)


def _validate(p1: Sequence[object], p2: Sequence[object]) -> None:
    if len(p1) != len(p2):
        raise InputDataError(f"permutation lengths differ: {len(p1)} vs {len(p2)}")
    s1, s2 = set(p1), set(p2)
    if len(s1) != len(p1) or len(s2) != len(p2):
        raise InputDataError("permutations must consist of distinct items")
    if s1 != s2:
        raise InputDataError("permutations are not over the same items")
