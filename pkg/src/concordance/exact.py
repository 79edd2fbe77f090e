"""Exact null distributions by enumeration of all distinct label arrangements.

The enumerator is a recursive descent over remaining group counts.  Two
algebraic shortcuts keep it exact while skipping most explicit leaves:

* one live group left: the completion is forced, a single leaf;
* two live groups left: the suffix is a two-letter word whose statistic
  contribution is affine (disorder) or quadratic (rank-sum signature) in
  its inversion count, so the whole completion family is accounted for by
  Gaussian-binomial inversion counts.

Parallelism partitions the arrangement space by the label pair in the
first two positions; every worker owns a disjoint prefix class and the
merge is plain integer addition, so results are identical for any worker
count.  All counts are exact integers end to end.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import (
    CapacityError,
    ConfigurationError,
    DegenerateStatisticError,
    InputDataError,
)
from .groups import GroupSizes
from .parallel import resolve_workers, run_tasks

DEFAULT_BUDGET = 10**9
DIST_FORMAT_VERSION = 1

STATISTIC_DISORDER = "disorder"
STATISTIC_KW = "kw"
_STATISTICS = (STATISTIC_DISORDER, STATISTIC_KW)

# widest k for which per-node linear-ordering maxima are found by scanning
# all k! orders; beyond it a constrained subset DP takes over
_SCAN_GROUP_LIMIT = 7

_INV_CACHE: dict[tuple[int, int], tuple[int, ...]] = {}


def _inversion_counts(a: int, b: int) -> tuple[int, ...]:
    """Number of two-letter words (a x's, b y's) per inversion count.

    Entry v is the count of words with exactly v y-before-x pairs: the
    coefficients of the Gaussian binomial [a+b choose a]_q.  Intermediate
    pairs are cached because enumerations over whole size families revisit
    them constantly.
    """
    if a > b:
        a, b = b, a  # the distribution is symmetric in the two letters
    if a == 0:
        return (1,)
    cached = _INV_CACHE.get((a, b))
    if cached is not None:
        return cached

    def lookup(ap: int, bp: int) -> tuple[int, ...]:
        if ap > bp:
            ap, bp = bp, ap
        return (1,) if ap == 0 else _INV_CACHE[(ap, bp)]

    # G(a', b') = G(a'-1, b') + q^(a') * G(a', b'-1), filled bottom-up
    for ap in range(1, a + 1):
        for bp in range(ap, b + 1):
            if (ap, bp) in _INV_CACHE:
                continue
            left = lookup(ap - 1, bp)
            down = lookup(ap, bp - 1)
            out = [0] * (ap * bp + 1)
            for v, c in enumerate(left):
                out[v] += c
            for v, c in enumerate(down):
                out[v + ap] += c
            _INV_CACHE[(ap, bp)] = tuple(out)
    return _INV_CACHE[(a, b)]


def _constrained_best(
    m: Sequence[Sequence[int]], k: int, first: int = -1, second: int = -1
) -> int:
    """Max pair sum over group orders, subset DP choosing the front element.

    With `first`/`second` set, only orders placing `first` before `second`
    are considered; with the defaults the search is unconstrained.
    """
    fbit = 1 << first if first >= 0 else 0
    size = 1 << k
    best = [0] * size
    for mask in range(1, size):
        best_v = None
        mm = mask
        while mm:
            f = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if f == second and mask & fbit:
                continue
            rest = mask ^ (1 << f)
            row = m[f]
            s = best[rest]
            rr = rest
            while rr:
                j = (rr & -rr).bit_length() - 1
                rr &= rr - 1
                s += row[j]
            if best_v is None or s > best_v:
                best_v = s
        # only unreachable for an empty mask, which the loop never visits
        best[mask] = best_v if best_v is not None else 0
    return best[size - 1]


def _order_scan_tables(k: int):
    """Per-order pair lists, split by relative order of each group pair."""
    perms = list(itertools.permutations(range(k)))
    pair_lists = [
        tuple((p[i], p[j]) for i in range(k) for j in range(i + 1, k)) for p in perms
    ]
    return perms, pair_lists


def _disorder_histogram(
    sizes: Sequence[int], prefix: Sequence[int] = ()
) -> dict[int, int]:
    """Histogram of disorder over all tie-free arrangements with this prefix."""
    k = len(sizes)
    n = sum(sizes)
    total = sum(sizes[r] * sizes[s] for r in range(k) for s in range(r + 1, k))
    rem = list(sizes)
    placed = [0] * k
    m = [[0] * k for _ in range(k)]
    hist: dict[int, int] = {}
    scan = k <= _SCAN_GROUP_LIMIT
    if scan:
        perms, pair_lists = _order_scan_tables(k)

    def place(g: int) -> None:
        for r in range(k):
            if r != g:
                m[r][g] += placed[r]
        placed[g] += 1
        rem[g] -= 1

    def unplace(g: int) -> None:
        rem[g] += 1
        placed[g] -= 1
        for r in range(k):
            if r != g:
                m[r][g] -= placed[r]

    def best_order_value() -> int:
        if scan:
            return max(sum(m[r][s] for r, s in pl) for pl in pair_lists)
        return _constrained_best(m, k)

    def leaf() -> None:
        d = total - best_order_value()
        hist[d] = hist.get(d, 0) + 1

    def complete_one(x: int) -> None:
        a = rem[x]
        for h in range(k):
            if h != x:
                m[h][x] += placed[h] * a
        leaf()
        for h in range(k):
            if h != x:
                m[h][x] -= placed[h] * a

    def complete_two(x: int, y: int) -> None:
        a, b = rem[x], rem[y]
        ab = a * b
        for h in range(k):
            if h != x:
                m[h][x] += placed[h] * a
            if h != y:
                m[h][y] += placed[h] * b
        # the suffix's own x/y pairs are still missing from m: with v
        # y-before-x inversions they add ab-v to m[x][y] and v to m[y][x]
        if scan:
            p_best = None
            q_best = None
            for pi, pl in enumerate(pair_lists):
                perm = perms[pi]
                v = sum(m[r][s] for r, s in pl)
                if perm.index(x) < perm.index(y):
                    if p_best is None or v > p_best:
                        p_best = v
                else:
                    if q_best is None or v > q_best:
                        q_best = v
            p_line = p_best + ab
            q_line = q_best
        else:
            p_line = _constrained_best(m, k, x, y) + ab
            q_line = _constrained_best(m, k, y, x)
        base = hist
        for v, c in enumerate(_inversion_counts(a, b)):
            value = p_line - v
            other = q_line + v
            if other > value:
                value = other
            d = total - value
            base[d] = base.get(d, 0) + c
        for h in range(k):
            if h != x:
                m[h][x] -= placed[h] * a
            if h != y:
                m[h][y] -= placed[h] * b

    def rec() -> None:
        live = [g for g in range(k) if rem[g]]
        count = len(live)
        if count > 2:
            for g in live:
                place(g)
                rec()
                unplace(g)
        elif count == 2:
            complete_two(live[0], live[1])
        elif count == 1:
            complete_one(live[0])
        else:
            leaf()

    for g in prefix:
        if rem[g] <= 0:
            raise InputDataError(f"prefix uses more of group {g} than available")
        place(g)
    rec()
    return hist


def _kw_signature_histogram(
    sizes: Sequence[int], prefix: Sequence[int] = ()
) -> dict[int, int]:
    """Histogram of the integer rank-sum signature sum(w_g * S_g^2) with
    w_g = lcm(sizes)/n_g, over all tie-free arrangements with this prefix.

    The signature determines KW exactly and keeps all arithmetic integral.
    """
    k = len(sizes)
    n = sum(sizes)
    lcm = math.lcm(*sizes)
    w = [lcm // s for s in sizes]
    rem = list(sizes)
    sums = [0] * k
    hist: dict[int, int] = {}

    def leaf() -> None:
        sig = sum(w[g] * sums[g] * sums[g] for g in range(k))
        hist[sig] = hist.get(sig, 0) + 1

    def complete_one(x: int, t: int) -> None:
        tail = (n * (n + 1) - t * (t + 1)) // 2
        sums[x] += tail
        leaf()
        sums[x] -= tail

    def complete_two(x: int, y: int, t: int) -> None:
        a, b = rem[x], rem[y]
        tail = (n * (n + 1) - t * (t + 1)) // 2
        lowest = a * t + a * (a + 1) // 2  # x's packed into the earliest slots
        sx0 = sums[x] + lowest
        sy0 = sums[y] + tail - lowest
        const = sum(w[g] * sums[g] * sums[g] for g in range(k) if g != x and g != y)
        wx, wy = w[x], w[y]
        base = hist
        for v, c in enumerate(_inversion_counts(a, b)):
            sx = sx0 + v
            sy = sy0 - v
            sig = const + wx * sx * sx + wy * sy * sy
            base[sig] = base.get(sig, 0) + c

    def rec(t: int) -> None:
        live = [g for g in range(k) if rem[g]]
        count = len(live)
        if count > 2:
            for g in live:
                rem[g] -= 1
                sums[g] += t + 1
                rec(t + 1)
                sums[g] -= t + 1
                rem[g] += 1
        elif count == 2:
            complete_two(live[0], live[1], t)
        elif count == 1:
            complete_one(live[0], t)
        else:
            leaf()

    t = 0
    for g in prefix:
        if rem[g] <= 0:
            raise InputDataError(f"prefix uses more of group {g} than available")
        rem[g] -= 1
        t += 1
        sums[g] += t
    rec(t)
    return hist


def _prefix_classes(sizes: Sequence[int]) -> list[tuple[int, ...]]:
    """Disjoint first-two-position label pairs covering the arrangement space."""
    k = len(sizes)
    classes = []
    for g1 in range(k):
        for g2 in range(k):
            need = {g1: 1}
            need[g2] = need.get(g2, 0) + 1
            if all(sizes[g] >= c for g, c in need.items()):
                classes.append((g1, g2))
    return classes


def _histogram_task(args: tuple[tuple[int, ...], str, tuple[int, ...]]) -> dict[int, int]:
    sizes, statistic, prefix = args
    if statistic == STATISTIC_DISORDER:
        return _disorder_histogram(sizes, prefix)
    return _kw_signature_histogram(sizes, prefix)


@dataclass(frozen=True)
class ExactDistribution:
    """Exact pmf of a statistic over all n!/prod(n_i!) label arrangements."""

    sizes: GroupSizes
    statistic: str
    support: tuple[Fraction, ...]
    counts: tuple[int, ...]
    total: int

    def probabilities(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.total) for c in self.counts)

    def prob_at_most(self, value: Fraction) -> Fraction:
        count = 0
        for v, c in zip(self.support, self.counts):
            if v <= value:
                count += c
        return Fraction(count, self.total)

    def prob_at_least(self, value: Fraction) -> Fraction:
        count = 0
        for v, c in zip(self.support, self.counts):
            if v >= value:
                count += c
        return Fraction(count, self.total)

    def to_payload(self) -> dict:
        """JSON-serializable form; rationals stored as [numerator, denominator]."""
        return {
            "format_version": DIST_FORMAT_VERSION,
            "kind": "exact-distribution",
            "sizes": list(self.sizes.sizes),
            "statistic": self.statistic,
            "total": self.total,
            "support": [[v.numerator, v.denominator] for v in self.support],
            "counts": list(self.counts),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ExactDistribution":
        if payload.get("kind") != "exact-distribution":
            raise InputDataError("not an exact-distribution payload")
        if payload.get("format_version") != DIST_FORMAT_VERSION:
            raise InputDataError(
                f"unsupported distribution format version {payload.get('format_version')}"
            )
        support = tuple(Fraction(num, den) for num, den in payload["support"])
        counts = tuple(int(c) for c in payload["counts"])
        total = int(payload["total"])
        if sum(counts) != total:
            raise InputDataError("corrupt distribution payload: counts do not sum to total")
        if any(support[i] >= support[i + 1] for i in range(len(support) - 1)):
            raise InputDataError("corrupt distribution payload: support not sorted")
        dist = cls(
            GroupSizes(tuple(payload["sizes"])),
            str(payload["statistic"]),
            support,
            counts,
            total,
        )
        return dist


@dataclass(frozen=True)
class PValueResult:
    """A p-value with its tail direction and provenance."""

    statistic_value: Fraction
    p_value: Fraction
    direction: str
    method: str
    total_enumerated: int


@dataclass(frozen=True)
class CriticalValueRow:
    """Largest disorder whose left-tail probability stays within alpha.

    `critical` is None when even the smallest support atom exceeds alpha
    (the level is unattainable for these sizes).
    """

    alpha: Fraction
    critical: Fraction | None
    attained: Fraction | None


def enumerate_distribution(
    sizes: GroupSizes,
    statistic: str,
    *,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> ExactDistribution:
    """Exact distribution of `statistic` ("disorder" or "kw") for `sizes`."""
    if statistic not in _STATISTICS:
        raise ConfigurationError(
            f"unknown statistic {statistic!r}; expected one of {_STATISTICS}"
        )
    if sizes.k < 2:
        raise DegenerateStatisticError(
            "null distributions need at least two groups"
        )
    count = sizes.multinomial()
    if count > budget:
        raise CapacityError(
            f"exact enumeration needs {count} arrangements, above the budget of "
            f"{budget}; use the Monte Carlo path instead"
        )
    if workers is None and count <= 10_000:
        workers = 1  # pool startup would dwarf the enumeration itself
    else:
        workers = resolve_workers(workers)
    tasks = [
        (sizes.sizes, statistic, prefix) for prefix in _prefix_classes(sizes.sizes)
    ]
    merged: dict[int, int] = {}
    for part in run_tasks(_histogram_task, tasks, workers):
        for key, c in part.items():
            merged[key] = merged.get(key, 0) + c
    if sum(merged.values()) != count:
        raise RuntimeError(
            "enumeration self-check failed: leaf count does not match the multinomial"
        )
    if statistic == STATISTIC_DISORDER:
        keyed = {Fraction(d): c for d, c in merged.items()}
    else:
        n = sizes.n
        lcm = math.lcm(*sizes.sizes)
        keyed = {
            -3 * (n + 1) + Fraction(12 * sig, lcm * n * (n + 1)): c
            for sig, c in merged.items()
        }
    support = tuple(sorted(keyed))
    return ExactDistribution(
        sizes, statistic, support, tuple(keyed[v] for v in support), count
    )


def exact_pvalue(
    sizes: GroupSizes,
    observed_disorder: Fraction | int | float,
    *,
    distribution: ExactDistribution | None = None,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> PValueResult:
    """Left-tail exact p-value: share of arrangements with disorder <= observed.

    Small disorder is the evidence against the null, hence the left tail.  A
    half-integer observed value (tied data) is tested against the tie-free
    integer support with the same threshold rule.
    """
    observed = Fraction(observed_disorder)
    if observed < 0:
        raise InputDataError(f"disorder cannot be negative, got {observed}")
    dist = _distribution_for(
        sizes, STATISTIC_DISORDER, distribution, workers=workers, budget=budget
    )
    return PValueResult(
        statistic_value=observed,
        p_value=dist.prob_at_most(observed),
        direction="disorder<=observed",
        method="exact",
        total_enumerated=dist.total,
    )


def exact_kw_pvalue(
    sizes: GroupSizes,
    observed_kw: Fraction | int | float,
    *,
    distribution: ExactDistribution | None = None,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> PValueResult:
    """Right-tail exact p-value for KW over tie-free arrangements.

    Pass the exact rational statistic when available.  A float is snapped to
    the nearest support atom when it is within 1e-9 relative distance, which
    absorbs double-rounding of exact atoms without inventing equality.
    """
    dist = _distribution_for(
        sizes, STATISTIC_KW, distribution, workers=workers, budget=budget
    )
    if isinstance(observed_kw, float):
        observed = _snap_to_support(observed_kw, dist.support)
    else:
        observed = Fraction(observed_kw)
    return PValueResult(
        statistic_value=observed,
        p_value=dist.prob_at_least(observed),
        direction="kw>=observed",
        method="exact",
        total_enumerated=dist.total,
    )


def critical_values(
    sizes: GroupSizes,
    alphas: Sequence[Fraction | float | str],
    *,
    distribution: ExactDistribution | None = None,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[CriticalValueRow]:
    """Conservative critical disorders: largest d with P(D <= d) <= alpha."""
    dist = _distribution_for(
        sizes, STATISTIC_DISORDER, distribution, workers=workers, budget=budget
    )
    rows = []
    for raw in alphas:
        alpha = _as_alpha(raw)
        critical = None
        attained = None
        cum = 0
        for v, c in zip(dist.support, dist.counts):
            cum += c
            p = Fraction(cum, dist.total)
            if p <= alpha:
                critical, attained = v, p
            else:
                break
        rows.append(CriticalValueRow(alpha, critical, attained))
    return rows


def _distribution_for(
    sizes: GroupSizes,
    statistic: str,
    distribution: ExactDistribution | None,
    *,
    workers: int | None,
    budget: int,
) -> ExactDistribution:
    if distribution is not None:
        if distribution.statistic != statistic:
            raise ConfigurationError(
                f"distribution is for {distribution.statistic!r}, need {statistic!r}"
            )
        if sorted(distribution.sizes.sizes) != sorted(sizes.sizes):
            raise ConfigurationError(
                f"distribution sizes {distribution.sizes.sizes} do not match {sizes.sizes}"
            )
        return distribution
    return enumerate_distribution(sizes, statistic, workers=workers, budget=budget)


def _snap_to_support(x: float, support: tuple[Fraction, ...]) -> Fraction:
    nearest = min(support, key=lambda v: abs(v - Fraction(x)))
    if abs(nearest - Fraction(x)) <= Fraction(1, 10**9) * max(1, abs(nearest)):
        return nearest
    return Fraction(x)


def _as_alpha(raw: Fraction | float | str) -> Fraction:
    # floats go through repr so 0.05 means the decimal 0.05, not its binary image
    alpha = Fraction(repr(raw)) if isinstance(raw, float) else Fraction(raw)
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must be in (0, 1), got {raw}")
    return alpha


# --- distribution cache -----------------------------------------------------

def canonical_sizes(sizes: GroupSizes) -> GroupSizes:
    """Cache key ordering: sizes sorted descending (distributions only depend
    on the multiset of sizes)."""
    return GroupSizes(tuple(sorted(sizes.sizes, reverse=True)))


def cache_filename(sizes: GroupSizes, statistic: str) -> str:
    key = "-".join(str(s) for s in canonical_sizes(sizes).sizes)
    return f"{statistic}_{key}_v{DIST_FORMAT_VERSION}.json"


def load_or_enumerate(
    sizes: GroupSizes,
    statistic: str,
    cache_dir: str | Path | None = None,
    *,
    workers: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> ExactDistribution:
    """Fetch the distribution from the cache directory or enumerate and store it.

    Distributions are enumerated and stored under the size multiset's
    canonical (descending) order, so permuted size vectors share one entry
    and cache hits reproduce misses byte for byte.
    """
    canon = canonical_sizes(sizes)
    if cache_dir is None:
        return enumerate_distribution(canon, statistic, workers=workers, budget=budget)
    path = Path(cache_dir) / cache_filename(sizes, statistic)
    if path.exists():
        payload = json.loads(path.read_text(encoding="utf-8"))
        dist = ExactDistribution.from_payload(payload)
        if dist.sizes.sizes != canon.sizes or dist.statistic != statistic:
            raise InputDataError(f"cache file {path} does not match its key")
        return dist
    dist = enumerate_distribution(canon, statistic, workers=workers, budget=budget)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(dist.to_payload(), sort_keys=True, indent=None), encoding="utf-8"
    )
    return dist
