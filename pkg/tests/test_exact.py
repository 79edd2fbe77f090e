import json
import math
import os
from fractions import Fraction

import pytest

from concordance import (
    CapacityError,
    ConfigurationError,
    DegenerateStatisticError,
    ExactDistribution,
    GroupSizes,
    InputDataError,
    critical_values,
    enumerate_distribution,
    exact_kw_pvalue,
    exact_pvalue,
    load_or_enumerate,
)
from concordance.exact import _inversion_counts, cache_filename
from util import reference_histogram

SIZES_222 = GroupSizes((2, 2, 2))

TABLE_KW_222 = {
    Fraction(0): 6,
    Fraction(2, 7): 12,
    Fraction(6, 7): 12,
    Fraction(8, 7): 12,
    Fraction(2): 12,
    Fraction(18, 7): 6,
    Fraction(24, 7): 12,
    Fraction(26, 7): 12,
    Fraction(32, 7): 6,
}


def test_inversion_counts_basics():
    assert _inversion_counts(0, 5) == (1,)
    assert _inversion_counts(1, 1) == (1, 1)
    assert _inversion_counts(2, 2) == (1, 1, 2, 1, 1)
    assert _inversion_counts(3, 2) == _inversion_counts(2, 3)
    for a, b in [(3, 4), (5, 5), (2, 9)]:
        assert sum(_inversion_counts(a, b)) == math.comb(a + b, a)


def test_disorder_distribution_222():
    dist = enumerate_distribution(SIZES_222, "disorder")
    assert dist.total == 90
    assert dist.support == tuple(Fraction(d) for d in range(7))
    assert dist.counts == (6, 12, 18, 18, 18, 12, 6)
    assert dist.probabilities() == tuple(
        Fraction(c, 90) for c in (6, 12, 18, 18, 18, 12, 6)
    )


def test_kw_distribution_222():
    dist = enumerate_distribution(SIZES_222, "kw")
    assert dist.total == 90
    assert dict(zip(dist.support, dist.counts)) == TABLE_KW_222


def test_tiny_distribution_21():
    dist = enumerate_distribution(GroupSizes((2, 1)), "disorder")
    assert dist.support == (0, 1)
    assert dist.counts == (2, 1)
    assert dist.total == 3


@pytest.mark.parametrize(
    "sizes", [(3, 2, 2), (4, 3), (2, 2, 2, 2), (3, 3, 2), (5, 1, 1), (2, 1), (1, 1)]
)
@pytest.mark.parametrize("statistic", ["disorder", "kw"])
def test_engine_matches_reference_enumeration(sizes, statistic):
    gs = GroupSizes(sizes)
    dist = enumerate_distribution(gs, statistic)
    assert dict(zip(dist.support, dist.counts)) == reference_histogram(gs, statistic)


def test_worker_count_does_not_change_bytes():
    gs = GroupSizes((5, 4, 3))  # 27720 arrangements: large enough to use the pool
    payloads = set()
    for workers in (1, 2, os.cpu_count() or 1):
        dist = enumerate_distribution(gs, "disorder", workers=workers)
        payloads.add(json.dumps(dist.to_payload(), sort_keys=True))
    assert len(payloads) == 1


def test_budget_refusal_names_the_multinomial():
    gs = GroupSizes((6, 6, 6, 6))
    expected = math.factorial(24) // math.factorial(6) ** 4
    with pytest.raises(CapacityError) as err:
        enumerate_distribution(gs, "disorder")
    assert str(expected) in str(err.value)
    with pytest.raises(CapacityError):
        enumerate_distribution(GroupSizes((10, 5, 3)), "disorder", budget=1000)


def test_argument_validation():
    with pytest.raises(ConfigurationError):
        enumerate_distribution(SIZES_222, "median")
    with pytest.raises(DegenerateStatisticError):
        enumerate_distribution(GroupSizes((5,)), "disorder")


def test_exact_pvalue_222():
    dist = enumerate_distribution(SIZES_222, "disorder")
    assert exact_pvalue(SIZES_222, 6, distribution=dist).p_value == 1
    p0 = exact_pvalue(SIZES_222, 0, distribution=dist)
    assert p0.p_value == Fraction(6, 90)
    assert p0.direction == "disorder<=observed"
    assert p0.method == "exact"
    assert p0.total_enumerated == 90
    # a tied observation is tested against the integer support with <=
    assert exact_pvalue(SIZES_222, Fraction(5, 2), distribution=dist).p_value == (
        Fraction(36, 90)
    )
    with pytest.raises(InputDataError):
        exact_pvalue(SIZES_222, -1, distribution=dist)


def test_exact_pvalue_monotone():
    dist = enumerate_distribution(SIZES_222, "disorder")
    ps = [
        exact_pvalue(SIZES_222, d, distribution=dist).p_value for d in range(7)
    ]
    assert ps == sorted(ps)
    assert all(0 < p <= 1 for p in ps)


def test_exact_kw_pvalue_222():
    dist = enumerate_distribution(SIZES_222, "kw")
    # float observations snap to the nearest atom; 4.57 sits below 32/7
    assert exact_kw_pvalue(SIZES_222, 4.57, distribution=dist).p_value == Fraction(6, 90)
    assert exact_kw_pvalue(
        SIZES_222, float(Fraction(32, 7)), distribution=dist
    ).p_value == Fraction(6, 90)
    assert exact_kw_pvalue(SIZES_222, Fraction(32, 7), distribution=dist).p_value == (
        Fraction(6, 90)
    )
    assert exact_kw_pvalue(SIZES_222, 0, distribution=dist).p_value == 1
    res = exact_kw_pvalue(SIZES_222, Fraction(2), distribution=dist)
    assert res.direction == "kw>=observed"
    assert res.p_value == Fraction(6 + 12 + 12 + 6 + 12, 90)


def test_critical_values_222():
    dist = enumerate_distribution(SIZES_222, "disorder")
    rows = critical_values(SIZES_222, ["0.10", "0.05", "0.01"], distribution=dist)
    assert rows[0].alpha == Fraction(1, 10)
    assert rows[0].critical == 0
    assert rows[0].attained == Fraction(6, 90)
    assert rows[1].critical is None and rows[1].attained is None
    assert rows[2].critical is None
    # float alphas carry decimal semantics
    rows_f = critical_values(SIZES_222, [0.10], distribution=dist)
    assert rows_f[0].critical == 0


def test_critical_values_validation():
    dist = enumerate_distribution(SIZES_222, "disorder")
    with pytest.raises(ConfigurationError):
        critical_values(SIZES_222, ["1.5"], distribution=dist)


def test_distribution_kwarg_is_checked():
    ddist = enumerate_distribution(SIZES_222, "disorder")
    with pytest.raises(ConfigurationError):
        exact_kw_pvalue(SIZES_222, 1, distribution=ddist)
    with pytest.raises(ConfigurationError):
        exact_pvalue(GroupSizes((3, 3)), 1, distribution=ddist)


def test_size_order_invariance():
    a = enumerate_distribution(GroupSizes((2, 3, 4)), "disorder")
    b = enumerate_distribution(GroupSizes((4, 3, 2)), "disorder")
    assert a.support == b.support
    assert a.counts == b.counts
    ka = enumerate_distribution(GroupSizes((2, 3, 4)), "kw")
    kb = enumerate_distribution(GroupSizes((4, 3, 2)), "kw")
    assert ka.support == kb.support
    assert ka.counts == kb.counts


def test_payload_round_trip():
    dist = enumerate_distribution(SIZES_222, "kw")
    again = ExactDistribution.from_payload(
        json.loads(json.dumps(dist.to_payload()))
    )
    assert again == dist


def test_payload_rejects_corruption():
    payload = enumerate_distribution(SIZES_222, "disorder").to_payload()
    broken = dict(payload, counts=[1] * len(payload["counts"]))
    with pytest.raises(InputDataError):
        ExactDistribution.from_payload(broken)
    with pytest.raises(InputDataError):
        ExactDistribution.from_payload({"kind": "something-else"})


def test_cache_hit_equals_miss(tmp_path):
    missed = load_or_enumerate(GroupSizes((2, 3, 2)), "disorder", tmp_path)
    cache_file = tmp_path / cache_filename(GroupSizes((2, 3, 2)), "disorder")
    assert cache_file.exists()
    first_bytes = cache_file.read_bytes()
    # a permuted size vector must hit the same canonical entry
    hit = load_or_enumerate(GroupSizes((3, 2, 2)), "disorder", tmp_path)
    assert hit == missed
    assert cache_file.read_bytes() == first_bytes
    assert missed.sizes.sizes == (3, 2, 2)  # canonical descending order


def test_cache_rejects_mismatched_content(tmp_path):
    dist = load_or_enumerate(GroupSizes((2, 2)), "disorder", tmp_path)
    path = tmp_path / cache_filename(GroupSizes((2, 2)), "disorder")
    payload = dist.to_payload()
    payload["statistic"] = "kw"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(InputDataError):
        load_or_enumerate(GroupSizes((2, 2)), "disorder", tmp_path)


def test_multinomial_totals_check():
    for sizes in [(2, 2, 2), (4, 3), (3, 3, 2), (2, 2, 1)]:
        gs = GroupSizes(sizes)
        dist = enumerate_distribution(gs, "disorder")
        n = gs.n
        explicit = math.factorial(n)
        for s in sizes:
            explicit //= math.factorial(s)
        assert dist.total == sum(dist.counts) == explicit
