import random
from decimal import Decimal
from fractions import Fraction

import pytest

from concordance import (
    Arrangement,
    GroupSizes,
    InputDataError,
    arrangement_from_data,
    arrangements_iter,
    group_label_order,
    midranks,
)
from util import random_arrangement

UNTIED_LABELS = (0, 0, 0, 0, 0, 2, 2, 0, 1, 0, 1, 0, 0, 2, 0, 1, 1, 1)

TIED_BLOCKS = (
    (0,), (0,), (0,), (0,),
    (0, 2),
    (2,),
    (0, 1),
    (0,), (1,), (0,), (0,), (2,),
    (0, 1),
    (1,), (1,),
)


def test_group_sizes_basics():
    sizes = GroupSizes((10, 5, 3))
    assert sizes.k == 3
    assert sizes.n == 18
    assert sizes.total_cross_pairs() == 95
    assert sizes.odd_group_count() == 2
    assert sizes.multinomial() == 2_450_448


def test_group_sizes_validation():
    with pytest.raises(InputDataError):
        GroupSizes(())
    with pytest.raises(InputDataError):
        GroupSizes((3, 0))


def test_from_data_untied_hours(untied_records):
    sizes, arr = arrangement_from_data(untied_records)
    assert sizes.sizes == (10, 5, 3)
    assert not arr.has_ties
    assert arr.labels() == UNTIED_LABELS
    assert group_label_order(untied_records) == ("A", "B", "C")


def test_from_data_tied_hours(tied_records):
    sizes, arr = arrangement_from_data(tied_records)
    assert sizes.sizes == (10, 5, 3)
    assert arr.blocks == TIED_BLOCKS
    assert arr.tie_block_sizes() == (2, 2, 2)


def test_from_data_singleton():
    sizes, arr = arrangement_from_data([("A", 5.0)])
    assert sizes.sizes == (1,)
    assert arr.blocks == ((0,),)


def test_from_data_empty():
    with pytest.raises(InputDataError):
        arrangement_from_data([])


def test_from_data_unorderable_values():
    with pytest.raises(InputDataError):
        arrangement_from_data([("A", 1), ("B", "x")])


def test_first_appearance_label_order():
    records = [("B", 2), ("A", 1), ("B", 3)]
    assert group_label_order(records) == ("B", "A")
    sizes, arr = arrangement_from_data(records)
    assert sizes.sizes == (2, 1)  # B first, so B is group 0
    assert arr.labels() == (1, 0, 0)


def test_from_data_input_order_invariance(tied_records):
    rng = random.Random(7)
    base_sizes, base_arr = arrangement_from_data(tied_records)
    labels = group_label_order(tied_records)
    for _ in range(5):
        shuffled = tied_records[:]
        rng.shuffle(shuffled)
        sizes, arr = arrangement_from_data(shuffled)
        names = group_label_order(shuffled)
        # identical blocks once indices are mapped back to label names
        base_named = [tuple(sorted(labels[g] for g in b)) for b in base_arr.blocks]
        named = [tuple(sorted(names[g] for g in b)) for b in arr.blocks]
        assert named == base_named
        assert sorted(sizes.sizes) == sorted(base_sizes.sizes)


def test_from_data_decimal_exact_tie():
    # string-equal decimals tie; nearby decimals do not
    sizes, arr = arrangement_from_data(
        [("A", Decimal("0.10")), ("B", Decimal("0.1")), ("A", Decimal("0.1000001"))]
    )
    assert arr.blocks == ((0, 1), (0,))


def test_round_trip_sizes(tied_records):
    sizes, arr = arrangement_from_data(tied_records)
    assert arr.group_sizes() == sizes


def test_validate_against_mismatch():
    arr = Arrangement.untied([0, 0, 1])
    with pytest.raises(InputDataError):
        arr.validate_against(GroupSizes((1, 2)))


def test_midranks_untied_hours(untied_records):
    sizes, arr = arrangement_from_data(untied_records)
    ranks = midranks(arr).ranks
    sums = [Fraction(0)] * sizes.k
    for g, r in zip(arr.labels(), ranks):
        sums[g] += r
    assert tuple(sums) == (73, 71, 27)


def test_midranks_tied_hours(tied_records):
    sizes, arr = arrangement_from_data(tied_records)
    ranks = midranks(arr).ranks
    sums = [Fraction(0)] * sizes.k
    for g, r in zip(arr.labels(), ranks):
        sums[g] += r
    assert tuple(sums) == (Fraction(149, 2), 70, Fraction(53, 2))
    means = tuple(s / n for s, n in zip(sums, sizes.sizes))
    assert means == (Fraction(149, 20), 14, Fraction(53, 6))  # 7.45, 14, 8.83...


def test_midranks_full_tie():
    arr = Arrangement(((0, 1, 2),))
    assert midranks(arr).ranks == (2, 2, 2)


def test_same_group_duplicates_in_a_tie_block():
    # two A's tied with each other still occupy two rank positions
    sizes, arr = arrangement_from_data([("A", 5), ("A", 5), ("B", 7)])
    assert arr.blocks == ((0, 0), (1,))
    assert midranks(arr).ranks == (Fraction(3, 2), Fraction(3, 2), 3)
    assert arr.group_sizes() == sizes == GroupSizes((2, 1))


def test_midranks_sum_invariant():
    rng = random.Random(11)
    for _ in range(50):
        _, arr = random_arrangement(rng, allow_ties=True)
        n = arr.n
        assert midranks(arr).total() == Fraction(n * (n + 1), 2)


def test_arrangements_iter_small():
    seqs = list(arrangements_iter(GroupSizes((2, 1))))
    assert seqs == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_arrangements_iter_count_matches_multinomial():
    sizes = GroupSizes((2, 2, 2))
    assert len(list(arrangements_iter(sizes))) == sizes.multinomial() == 90
