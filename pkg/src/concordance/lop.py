"""Exact solvers for the Linear Ordering Problem on small preference matrices.

Entries are stored in half-units (doubled integers) because tied
observations credit 0.5 to each direction of a pair; floating point would
break the exact distribution counts downstream.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import CapacityError, InputDataError

MAX_DP_GROUPS = 24
MAX_BRUTEFORCE_GROUPS = 9


@dataclass(frozen=True)
class PreferenceMatrix:
    """k x k pairwise precedence counts, stored in units of one half."""

    half_units: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        k = len(self.half_units)
        rows = []
        for r, row in enumerate(self.half_units):
            if len(row) != k:
                raise InputDataError("preference matrix must be square")
            row = tuple(int(v) for v in row)
            if row[r] != 0:
                raise InputDataError("preference matrix diagonal must be zero")
            if any(v < 0 for v in row):
                raise InputDataError("preference counts must be nonnegative")
            rows.append(row)
        object.__setattr__(self, "half_units", tuple(rows))

    @classmethod
    def from_counts(cls, rows: Sequence[Sequence[object]]) -> "PreferenceMatrix":
        """Build from plain counts (ints, halves, Fractions); diagonal entries ignored."""
        k = len(rows)
        half = [[0] * k for _ in range(k)]
        for r in range(k):
            if len(rows[r]) != k:
                raise InputDataError("preference matrix must be square")
            for s in range(k):
                if r == s:
                    continue
                doubled = Fraction(rows[r][s]) * 2
                if doubled.denominator != 1:
                    raise InputDataError(
                        f"entry ({r},{s})={rows[r][s]} is not a half-integer"
                    )
                half[r][s] = int(doubled)
        return cls(tuple(tuple(row) for row in half))

    @property
    def k(self) -> int:
        return len(self.half_units)

    def entry(self, r: int, s: int) -> Fraction:
        return Fraction(self.half_units[r][s], 2)

    def counts(self) -> list[list[Fraction]]:
        k = self.k
        return [[self.entry(r, s) for s in range(k)] for r in range(k)]

    def transpose(self) -> "PreferenceMatrix":
        k = self.k
        return PreferenceMatrix(
            tuple(tuple(self.half_units[s][r] for s in range(k)) for r in range(k))
        )

    def total(self) -> Fraction:
        """Sum of all off-diagonal entries."""
        return Fraction(sum(sum(row) for row in self.half_units), 2)


@dataclass(frozen=True)
class LopSolution:
    """A maximizing group order and its objective value."""

    order: tuple[int, ...]
    value: Fraction
    optimal: bool = field(default=True)


def _order_value_half(m2: Sequence[Sequence[int]], order: Sequence[int]) -> int:
    k = len(order)
    total = 0
    for i in range(k):
        row = m2[order[i]]
        for j in range(i + 1, k):
            total += row[order[j]]
    return total


def lop_exact_dp(m: PreferenceMatrix) -> LopSolution:
    """Maximize retained precedences by dynamic programming over subsets.

    best(S) treats S as the set still to be placed and chooses its first
    element f, collecting m[f][j] for every j placed after it:
    best(S) = max over f in S of rowsum(f, S - f) + best(S - f).
    O(2^k * k^2) time, O(2^k) space.  Ties between optimal orders are broken
    toward the lexicographically smallest order.
    """
    k = m.k
    if k > MAX_DP_GROUPS:
        raise CapacityError(
            f"subset DP supports at most {MAX_DP_GROUPS} groups, got {k}"
        )
    m2 = m.half_units
    size = 1 << k
    best = [0] * size
    for mask in range(1, size):
        best_v = None
        mm = mask
        while mm:
            f = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            rest = mask ^ (1 << f)
            row = m2[f]
            s = best[rest]
            rr = rest
            while rr:
                j = (rr & -rr).bit_length() - 1
                rr &= rr - 1
                s += row[j]
            if best_v is None or s > best_v:
                best_v = s
        best[mask] = best_v
    order: list[int] = []
    mask = size - 1
    while mask:
        for f in range(k):
            bit = 1 << f
            if not mask & bit:
                continue
            rest = mask ^ bit
            row = m2[f]
            s = best[rest]
            rr = rest
            while rr:
                j = (rr & -rr).bit_length() - 1
                rr &= rr - 1
                s += row[j]
            if s == best[mask]:
                order.append(f)
                mask = rest
                break
    return LopSolution(tuple(order), Fraction(best[size - 1], 2))


def lop_bruteforce(m: PreferenceMatrix) -> LopSolution:
    """Reference solver: evaluate all k! orders explicitly."""
    k = m.k
    if k > MAX_BRUTEFORCE_GROUPS:
        raise CapacityError(
            f"brute force supports at most {MAX_BRUTEFORCE_GROUPS} groups, got {k}"
        )
    m2 = m.half_units
    best_order: tuple[int, ...] | None = None
    best_value = -1
    for perm in itertools.permutations(range(k)):
        v = _order_value_half(m2, perm)
        if v > best_value:
            best_value = v
            best_order = perm
    assert best_order is not None
    return LopSolution(best_order, Fraction(best_value, 2))


def order_values(m: PreferenceMatrix) -> list[tuple[tuple[int, ...], Fraction]]:
    """Objective of every group order, in lexicographic order of the orders."""
    k = m.k
    if k > MAX_BRUTEFORCE_GROUPS:
        raise CapacityError(
            f"order enumeration supports at most {MAX_BRUTEFORCE_GROUPS} groups, got {k}"
        )
    return [
        (perm, Fraction(_order_value_half(m.half_units, perm), 2))
        for perm in itertools.permutations(range(k))
    ]
