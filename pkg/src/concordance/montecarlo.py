"""Sampling-based p-values and distribution estimates.

Each sample index gets its own Philox counter-based substream keyed by
(master seed, index), so estimates are reproducible bit for bit no matter
how the indices are split across workers.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import beta

from .coefficient import disorder
from .errors import ConfigurationError, DegenerateStatisticError
from .exact import STATISTIC_DISORDER, _STATISTICS, _constrained_best
from .groups import Arrangement, GroupSizes
from .kruskal import kw_attainable_max
from .parallel import resolve_workers, run_tasks

_MASK64 = (1 << 64) - 1
_SCAN_GROUP_LIMIT = 7

MIN_PVALUE_SAMPLES = 100
MIN_DISTRIBUTION_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    """Add-one permutation p-value estimate with a Clopper-Pearson 95% CI."""

    p_hat: float
    ci_low: float
    ci_high: float
    samples: int
    seed: int
    exceed_count: int


@dataclass(frozen=True)
class McDistribution:
    """Empirical pmf of a statistic under uniform label shuffles."""

    sizes: GroupSizes
    statistic: str
    values: tuple[Fraction, ...]
    counts: tuple[int, ...]
    samples: int
    seed: int
    normalized: bool = False

    def frequencies(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.samples) for c in self.counts)


def _substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=[seed & _MASK64, index & _MASK64])
    )


def _scan_tables(k: int) -> list[tuple[tuple[int, int], ...]]:
    return [
        tuple((p[i], p[j]) for i in range(k) for j in range(i + 1, k))
        for p in itertools.permutations(range(k))
    ]


def _best_order_value(m: list[list[int]], k: int, pair_lists) -> int:
    if pair_lists is not None:
        return max(sum(m[r][s] for r, s in pl) for pl in pair_lists)
    return _constrained_best(m, k)


def _pvalue_chunk(args: tuple) -> int:
    sizes, block_sizes, observed_doubled, seed, start, stop = args
    k = len(sizes)
    total2 = 2 * sum(sizes[r] * sizes[s] for r in range(k) for s in range(r + 1, k))
    labels = np.repeat(np.arange(k), sizes)
    n = len(labels)
    pair_lists = _scan_tables(k) if k <= _SCAN_GROUP_LIMIT else None
    hits = 0
    for index in range(start, stop):
        rng = _substream(seed, index)
        seq = labels[rng.permutation(n)].tolist()
        m = [[0] * k for _ in range(k)]
        placed = [0] * k
        pos = 0
        for size in block_sizes:
            if size == 1:
                g = seq[pos]
                for r in range(k):
                    if r != g and placed[r]:
                        m[r][g] += 2 * placed[r]
                placed[g] += 1
                pos += 1
                continue
            block = seq[pos : pos + size]
            counts: dict[int, int] = {}
            for g in block:
                counts[g] = counts.get(g, 0) + 1
            for g, c in counts.items():
                inc = 2 * c
                for r in range(k):
                    if r != g and placed[r]:
                        m[r][g] += placed[r] * inc
            items = sorted(counts.items())
            for i in range(len(items)):
                g1, c1 = items[i]
                for j in range(i + 1, len(items)):
                    g2, c2 = items[j]
                    w = c1 * c2
                    m[g1][g2] += w
                    m[g2][g1] += w
            for g, c in counts.items():
                placed[g] += c
            pos += size
        best2 = _best_order_value(m, k, pair_lists)
        if total2 - best2 <= observed_doubled:
            hits += 1
    return hits


def _distribution_chunk(args: tuple) -> dict[int, int]:
    sizes, statistic, seed, start, stop = args
    k = len(sizes)
    labels = np.repeat(np.arange(k), sizes)
    n = len(labels)
    hist: dict[int, int] = {}
    if statistic == STATISTIC_DISORDER:
        total = sum(sizes[r] * sizes[s] for r in range(k) for s in range(r + 1, k))
        pair_lists = _scan_tables(k) if k <= _SCAN_GROUP_LIMIT else None
        for index in range(start, stop):
            rng = _substream(seed, index)
            seq = labels[rng.permutation(n)].tolist()
            m = [[0] * k for _ in range(k)]
            placed = [0] * k
            for g in seq:
                for r in range(k):
                    if r != g and placed[r]:
                        m[r][g] += placed[r]
                placed[g] += 1
            d = total - _best_order_value(m, k, pair_lists)
            hist[d] = hist.get(d, 0) + 1
    else:
        lcm = math.lcm(*sizes)
        w = [lcm // s for s in sizes]
        for index in range(start, stop):
            rng = _substream(seed, index)
            seq = labels[rng.permutation(n)].tolist()
            sums = [0] * k
            for pos, g in enumerate(seq, start=1):
                sums[g] += pos
            sig = sum(w[g] * sums[g] * sums[g] for g in range(k))
            hist[sig] = hist.get(sig, 0) + 1
    return hist


def _index_chunks(samples: int, workers: int) -> list[tuple[int, int]]:
    step = (samples + workers - 1) // workers
    return [(lo, min(lo + step, samples)) for lo in range(0, samples, step)]


def _clopper_pearson(x: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    alpha = 1.0 - confidence
    low = 0.0 if x == 0 else float(beta.ppf(alpha / 2, x, n - x + 1))
    high = 1.0 if x == n else float(beta.ppf(1 - alpha / 2, x + 1, n - x))
    return max(0.0, low), min(1.0, high)


def mc_pvalue(
    arr: Arrangement,
    sizes: GroupSizes,
    samples: int,
    seed: int,
    *,
    workers: int | None = None,
) -> McEstimate:
    """Tie-conditioned permutation p-value for the disorder statistic.

    The observed tie-block structure over positions is kept fixed and the
    label multiset is shuffled uniformly within it.  The estimator is the
    add-one form (hits + 1)/(samples + 1), which never reports zero.
    """
    if samples < MIN_PVALUE_SAMPLES:
        raise ConfigurationError(
            f"at least {MIN_PVALUE_SAMPLES} samples required, got {samples}"
        )
    observed = disorder(arr, sizes)
    observed_doubled = int(observed.disorder * 2)
    block_sizes = tuple(len(b) for b in arr.blocks)
    if workers is None and samples <= 10_000:
        workers = 1
    else:
        workers = resolve_workers(workers)
    tasks = [
        (sizes.sizes, block_sizes, observed_doubled, seed, lo, hi)
        for lo, hi in _index_chunks(samples, workers)
    ]
    hits = sum(run_tasks(_pvalue_chunk, tasks, workers))
    low, high = _clopper_pearson(hits, samples)
    return McEstimate(
        p_hat=(hits + 1) / (samples + 1),
        ci_low=low,
        ci_high=high,
        samples=samples,
        seed=seed,
        exceed_count=hits,
    )


def mc_distribution(
    sizes: GroupSizes,
    statistic: str,
    samples: int,
    seed: int,
    *,
    normalize_kw: bool = False,
    workers: int | None = None,
) -> McDistribution:
    """Empirical pmf of disorder or KW under uniform tie-free shuffles."""
    if statistic not in _STATISTICS:
        raise ConfigurationError(
            f"unknown statistic {statistic!r}; expected one of {_STATISTICS}"
        )
    if samples < MIN_DISTRIBUTION_SAMPLES:
        raise ConfigurationError(
            f"at least {MIN_DISTRIBUTION_SAMPLES} samples required, got {samples}"
        )
    if sizes.k < 2:
        raise DegenerateStatisticError("null distributions need at least two groups")
    if workers is None and samples <= 10_000:
        workers = 1
    else:
        workers = resolve_workers(workers)
    tasks = [
        (sizes.sizes, statistic, seed, lo, hi)
        for lo, hi in _index_chunks(samples, workers)
    ]
    merged: dict[int, int] = {}
    for part in run_tasks(_distribution_chunk, tasks, workers):
        for key, c in part.items():
            merged[key] = merged.get(key, 0) + c
    if statistic == STATISTIC_DISORDER:
        keyed = {Fraction(d): c for d, c in merged.items()}
        normalized = False
    else:
        n = sizes.n
        lcm = math.lcm(*sizes.sizes)
        keyed = {
            -3 * (n + 1) + Fraction(12 * sig, lcm * n * (n + 1)): c
            for sig, c in merged.items()
        }
        normalized = bool(normalize_kw)
        if normalized:
            top = kw_attainable_max(sizes)
            if top <= 0:
                raise DegenerateStatisticError(
                    "cannot normalize KW: attainable maximum is not positive"
                )
            keyed = {v / top: c for v, c in keyed.items()}
    values = tuple(sorted(keyed))
    return McDistribution(
        sizes,
        statistic,
        values,
        tuple(keyed[v] for v in values),
        samples,
        seed,
        normalized,
    )
