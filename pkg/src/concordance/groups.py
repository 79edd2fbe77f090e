"""Group sizes, value-ordered arrangements and midranks.

An arrangement is the sequence of group labels obtained by sorting all
observations by value.  Observations with exactly equal values form a
tie-block; a block of size one is an untied observation.  Everything
downstream (preference matrices, disorder, rank statistics) consumes
these types.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import InputDataError


@dataclass(frozen=True)
class GroupSizes:
    """Sizes (n_1, ..., n_k) of the k groups under comparison."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise InputDataError("at least one group is required")
        if any(s < 1 for s in sizes):
            raise InputDataError(f"every group size must be >= 1, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def total_cross_pairs(self) -> int:
        """Number of cross-group observation pairs, sum of n_r * n_s over r < s."""
        k = self.k
        return sum(
            self.sizes[r] * self.sizes[s] for r in range(k) for s in range(r + 1, k)
        )

    def odd_group_count(self) -> int:
        return sum(1 for s in self.sizes if s % 2 == 1)

    def multinomial(self) -> int:
        """Number of distinct label arrangements, n! / prod(n_i!)."""
        result = 1
        acc = 0
        for s in self.sizes:
            acc += s
            result *= math.comb(acc, s)
        return result


@dataclass(frozen=True)
class Arrangement:
    """Ordered tie-blocks of group indices; a singleton block is untied.

    Blocks are stored as sorted tuples so that two arrangements with the
    same tie structure compare equal regardless of input order.  Same-group
    duplicates inside a block are retained: they matter for midranks even
    though they never contribute cross-group precedences.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise InputDataError("an arrangement needs at least one observation")
        norm = []
        for block in self.blocks:
            if not block:
                raise InputDataError("empty tie-block in arrangement")
            if any(int(g) < 0 for g in block):
                raise InputDataError("group indices must be nonnegative")
            norm.append(tuple(sorted(int(g) for g in block)))
        object.__setattr__(self, "blocks", tuple(norm))

    @classmethod
    def untied(cls, labels: Sequence[int]) -> "Arrangement":
        """Arrangement with no ties from a flat label sequence."""
        return cls(tuple((int(g),) for g in labels))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def has_ties(self) -> bool:
        return any(len(b) > 1 for b in self.blocks)

    def labels(self) -> tuple[int, ...]:
        """Flat label sequence (block members in canonical order)."""
        return tuple(g for block in self.blocks for g in block)

    def group_counts(self) -> tuple[int, ...]:
        """Occurrences of each group index 0..max present."""
        flat = self.labels()
        k = max(flat) + 1
        counts = [0] * k
        for g in flat:
            counts[g] += 1
        return tuple(counts)

    def group_sizes(self) -> GroupSizes:
        """GroupSizes reconstructed from the label occurrences."""
        return GroupSizes(self.group_counts())

    def tie_block_sizes(self) -> tuple[int, ...]:
        """Sizes of all blocks larger than one, in position order."""
        return tuple(len(b) for b in self.blocks if len(b) > 1)

    def validate_against(self, sizes: GroupSizes) -> None:
        counts = Counter(self.labels())
        expected = {g: s for g, s in enumerate(sizes.sizes)}
        if dict(counts) != expected:
            raise InputDataError(
                f"arrangement labels {dict(counts)} do not match group sizes {sizes.sizes}"
            )


@dataclass(frozen=True)
class RankAssignment:
    """Per-observation ranks in arrangement order; midranks under ties."""

    ranks: tuple[Fraction, ...]

    def total(self) -> Fraction:
        return sum(self.ranks, Fraction(0))


def midranks(arr: Arrangement) -> RankAssignment:
    """Assign 1-based ranks; every member of a tie-block gets the block's mean rank."""
    ranks: list[Fraction] = []
    pos = 0
    for block in arr.blocks:
        size = len(block)
        # block occupies positions pos+1 .. pos+size
        mid = Fraction(2 * pos + size + 1, 2)
        ranks.extend([mid] * size)
        pos += size
    return RankAssignment(tuple(ranks))


def arrangement_from_data(
    records: Iterable[tuple[object, object]],
) -> tuple[GroupSizes, Arrangement]:
    """Build (GroupSizes, Arrangement) from raw (group label, value) records.

    Observations are sorted ascending by value; records with exactly equal
    values form one tie-block.  Group labels map to indices 0..k-1 in order
    of first appearance in the input.  Values are compared with exact
    equality: no epsilon tolerance, so parse them as Decimal (or another
    exact type) if the data came from text.
    """
    recs = list(records)
    if not recs:
        raise InputDataError("no records given")
    index = _label_index_map(recs)
    try:
        ordered = sorted(recs, key=lambda rec: rec[1])
    except TypeError as exc:
        raise InputDataError(f"values are not mutually orderable: {exc}") from exc
    blocks: list[tuple[int, ...]] = []
    current: list[int] = []
    current_value: object = None
    for label, value in ordered:
        if current and value == current_value:
            current.append(index[label])
        else:
            if current:
                blocks.append(tuple(current))
            current = [index[label]]
            current_value = value
    blocks.append(tuple(current))
    counts = Counter(index[label] for label, _ in recs)
    sizes = GroupSizes(tuple(counts[g] for g in range(len(index))))
    return sizes, Arrangement(tuple(blocks))


def group_label_order(records: Iterable[tuple[object, object]]) -> tuple[object, ...]:
    """Distinct group labels in first-appearance order (the index mapping)."""
    return tuple(_label_index_map(list(records)))


def _label_index_map(recs: list[tuple[object, object]]) -> dict[object, int]:
    index: dict[object, int] = {}
    for label, _ in recs:
        if label not in index:
            index[label] = len(index)
    return index


def arrangements_iter(sizes: GroupSizes) -> Iterator[tuple[int, ...]]:
    """Yield every distinct untied label sequence for the given sizes.

    Lexicographic order; n!/prod(n_i!) sequences in total.  Intended for
    oracles and small enumerations, not for production-scale counting.
    """
    remaining = list(sizes.sizes)
    k = sizes.k
    n = sizes.n
    seq: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(seq) == n:
            yield tuple(seq)
            return
        for g in range(k):
            if remaining[g] > 0:
                remaining[g] -= 1
                seq.append(g)
                yield from rec()
                seq.pop()
                remaining[g] += 1

    return rec()
