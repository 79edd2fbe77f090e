"""Shared test helpers: slow reference enumerators and random generators."""
import csv
import random
from fractions import Fraction
from pathlib import Path

from concordance import (
    Arrangement,
    GroupSizes,
    PreferenceMatrix,
    arrangements_iter,
    disorder,
    kruskal_wallis,
)

DATA_DIR = Path(__file__).parent / "data"

LABEL_INDEX = {"a": 0, "b": 1, "c": 2}


def load_reference_222():
    """All 90 arrangements of sizes (2,2,2) with frozen (dis, tau, kw) values."""
    rows = []
    with open(DATA_DIR / "reference_222.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            labels = tuple(LABEL_INDEX[t] for t in row["arrangement"].split())
            rows.append((labels, int(row["dis"]), row["tau"], row["kw"]))
    assert len(rows) == 90
    return rows


def reference_histogram(sizes: GroupSizes, statistic: str) -> dict:
    """Per-arrangement enumeration through the public statistics.

    Deliberately naive: one full disorder()/kruskal_wallis() call per
    arrangement, no incremental state, so it exercises none of the
    production enumerator's shortcuts.
    """
    hist: dict = {}
    for labels in arrangements_iter(sizes):
        arr = Arrangement.untied(labels)
        if statistic == "disorder":
            key = Fraction(disorder(arr, sizes).disorder)
        else:
            key = Fraction(kruskal_wallis(arr, sizes).kw)
        hist[key] = hist.get(key, 0) + 1
    return hist


def random_sizes(rng: random.Random, k_max: int = 4, n_max: int = 5) -> GroupSizes:
    k = rng.randint(2, k_max)
    return GroupSizes(tuple(rng.randint(1, n_max) for _ in range(k)))


def random_valid_matrix(rng: random.Random, k: int) -> PreferenceMatrix:
    """Random half-integer matrix with m[r][s] + m[s][r] = n_r * n_s."""
    sizes = [rng.randint(1, 5) for _ in range(k)]
    half = [[0] * k for _ in range(k)]
    for r in range(k):
        for s in range(r + 1, k):
            pairs2 = 2 * sizes[r] * sizes[s]
            u = rng.randint(0, pairs2)
            half[r][s] = u
            half[s][r] = pairs2 - u
    return PreferenceMatrix(tuple(tuple(row) for row in half))


def random_arrangement(
    rng: random.Random,
    k_max: int = 4,
    n_max: int = 5,
    allow_ties: bool = False,
) -> tuple[GroupSizes, Arrangement]:
    sizes = random_sizes(rng, k_max, n_max)
    labels = [g for g, s in enumerate(sizes.sizes) for _ in range(s)]
    rng.shuffle(labels)
    if not allow_ties:
        return sizes, Arrangement.untied(labels)
    blocks = []
    i = 0
    while i < len(labels):
        size = min(rng.choice([1, 1, 1, 2, 3]), len(labels) - i)
        blocks.append(tuple(labels[i : i + size]))
        i += size
    return sizes, Arrangement(tuple(blocks))
