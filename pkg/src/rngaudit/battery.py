"""The four-family statistical test battery over a uniform sample.

Families: a global-uniformity composite (location, scale, spread
homogeneity, and three distributional distances), a permutation
orderings test, a serial d-ary tuple test, and a birthday-spacings
test.  Tuple-based tests use disjoint tuples by default; overlapping
windows are available behind ``tuple_mode="overlapping"``.

The battery runs every enabled family, never aborts on a single
family's failure (errors become report entries), and applies no
multiple-testing correction unless the Bonferroni flag is set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .stats import (
    DEFAULT_ALPHA,
    BinnedCounts,
    TestResult,
    anderson_darling_uniform,
    chi_square_gof,
    ks_test_uniform,
    levene_test,
    poisson_pmf,
    t_test_mean,
    variance_test,
)

__all__ = [
    "BatteryConfig",
    "BatteryReport",
    "run_battery",
    "global_uniformity",
    "permutation_test",
    "serial_test",
    "birthday_spacings_test",
    "rank_pattern",
    "pattern_index",
    "TEST_REGISTRY",
]

DEFAULT_TESTS = ("uniformity", "permutation", "serial", "birthday")
TIE_WARN_FRACTION = 1e-4


@dataclass(frozen=True)
class BatteryConfig:
    """Knobs for one battery run.  Defaults follow the audit recipe:

    alpha 0.01, permutation tuples of 3, serial test with 8 digits over
    pairs, birthday spacings with 512 draws into 2**24 cells.
    """

    tests: tuple[str, ...] = DEFAULT_TESTS
    alpha: float = DEFAULT_ALPHA
    permutation_k: int = 3
    serial_d: int = 8
    serial_l: int = 2
    birthday_n: int = 512
    birthday_k: int = 2**24
    tuple_mode: str = "disjoint"
    levene_groups: int = 10
    gof_bins: int = 100
    bonferroni: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 2 <= self.permutation_k <= 8:
            raise ValueError("permutation_k must lie in [2, 8]")
        if self.serial_d < 2:
            raise ValueError("serial_d must be >= 2")
        if self.serial_l < 1:
            raise ValueError("serial_l must be >= 1")
        if self.tuple_mode not in ("disjoint", "overlapping"):
            raise ValueError("tuple_mode must be 'disjoint' or 'overlapping'")
        if self.birthday_n < 2:
            raise ValueError("birthday_n must be >= 2")
        if self.birthday_k < 2:
            raise ValueError("birthday_k must be >= 2")
        if self.levene_groups < 2:
            raise ValueError("levene_groups must be >= 2")
        if self.gof_bins < 2:
            raise ValueError("gof_bins must be >= 2")

    def to_dict(self) -> dict:
        return {
            "tests": list(self.tests),
            "alpha": self.alpha,
            "permutation_k": self.permutation_k,
            "serial_d": self.serial_d,
            "serial_l": self.serial_l,
            "birthday_n": self.birthday_n,
            "birthday_k": self.birthday_k,
            "tuple_mode": self.tuple_mode,
            "levene_groups": self.levene_groups,
            "gof_bins": self.gof_bins,
            "bonferroni": self.bonferroni,
        }


@dataclass
class BatteryReport:
    """Everything one battery run produced."""

    results: list[TestResult]
    errors: list[dict]
    provenance: str
    config: BatteryConfig
    n_rejections: int = field(init=False)

    def __post_init__(self):
        self.n_rejections = sum(1 for r in self.results if r.verdict == "reject")

    def to_dict(self) -> dict:
        entries = [r.to_dict() for r in self.results]
        entries.extend(
            {
                "name": e["test"],
                "statistic": None,
                "p_value": None,
                "alpha": None,
                "verdict": "error",
                "detail": {"error": e["error"]},
            }
            for e in self.errors
        )
        return {
            "provenance": self.provenance,
            "config": self.config.to_dict(),
            "results": entries,
            "n_rejections": self.n_rejections,
            "n_errors": len(self.errors),
        }


def _values(sample) -> np.ndarray:
    return np.asarray(getattr(sample, "values", sample), dtype=np.float64)


def _tuples(values: np.ndarray, k: int, mode: str) -> np.ndarray:
    """View the sample as tuples of k successive values."""
    n = values.size
    if mode == "disjoint":
        t = n // k
        if t < 1:
            raise ValueError(f"sample too short for tuples of {k}")
        return values[: t * k].reshape(t, k)
    if mode == "overlapping":
        if n < k:
            raise ValueError(f"sample too short for tuples of {k}")
        return np.lib.stride_tricks.sliding_window_view(values, k)
    raise ValueError("mode must be 'disjoint' or 'overlapping'")


# ---------------------------------------------------------------------------
# permutation orderings

def rank_pattern(values) -> tuple[int, ...]:
    """Rank of each position within its tuple, 1 = smallest.

    Ties resolve by position: the earlier index receives the lower rank.
    (0.8, 0.1, 0.2, 0.05) -> (4, 2, 3, 1).
    """
    v = list(values)
    k = len(v)
    ranks = []
    for i, x in enumerate(v):
        r = 1
        for j, other in enumerate(v):
            if other < x or (other == x and j < i):
                r += 1
        ranks.append(r)
    return tuple(ranks)


def pattern_index(pattern) -> int:
    """Bijective index of a rank pattern in 0 .. k! - 1 (its Lehmer code).

    Each position contributes the count of later, smaller ranks weighted
    by the factorial of the positions remaining after it.
    """
    p = list(pattern)
    k = len(p)
    if sorted(p) != list(range(1, k + 1)):
        raise ValueError("pattern must be a permutation of 1..k")
    index = 0
    for i in range(k):
        smaller_later = sum(1 for j in range(i + 1, k) if p[j] < p[i])
        index += smaller_later * math.factorial(k - 1 - i)
    return index


def permutation_test(
    sample,
    k: int = 3,
    mode: str = "disjoint",
    alpha: float = DEFAULT_ALPHA,
) -> TestResult:
    """Chi-square test of the k! relative-ordering frequencies.

    Every tuple of k successive values is mapped to the index of its
    rank pattern; the index counts are tested against uniformity over
    the k! orderings.  Exact ties within a tuple are resolved toward the
    earlier index, counted, and flagged when they exceed 0.01% of tuples.
    """
    if not 2 <= k <= 8:
        raise ValueError("tuple length k must lie in [2, 8]")
    v = _values(sample)
    tup = _tuples(v, k, mode)
    t = tup.shape[0]
    kfact = math.factorial(k)
    expected = t / kfact
    if expected < 5.0:
        raise ValueError(
            f"{t} tuples over {kfact} orderings gives expected {expected:.2f} < 5"
        )
    # Lehmer digits straight from the values; exact ties fall on the
    # strict-less side, matching the earlier-index-ranks-lower rule.
    index = np.zeros(t, dtype=np.int64)
    tie_rows = np.zeros(t, dtype=bool)
    for i in range(k - 1):
        digit = np.zeros(t, dtype=np.int64)
        for j in range(i + 1, k):
            digit += tup[:, j] < tup[:, i]
            tie_rows |= tup[:, j] == tup[:, i]
        index += digit * math.factorial(k - 1 - i)
    ties = int(tie_rows.sum())
    counts = np.bincount(index, minlength=kfact)
    binned = BinnedCounts(counts, np.full(kfact, expected), kfact - 1)
    result = chi_square_gof(binned, alpha, name="permutation")
    result.detail.update(
        {"k": k, "mode": mode, "n_tuples": int(t), "tied_tuples": ties}
    )
    if ties > TIE_WARN_FRACTION * t:
        result.detail["tie_warning"] = True
        warnings.warn(
            f"permutation: {ties} of {t} tuples contain exact ties", stacklevel=2
        )
    return result


# ---------------------------------------------------------------------------
# serial test

def serial_test(
    sample,
    d: int = 8,
    l: int = 2,
    mode: str = "disjoint",
    alpha: float = DEFAULT_ALPHA,
) -> TestResult:
    """Chi-square test of l-tuples of d-ary digits over all d**l cells.

    Each value contributes the digit floor(x * d); a tuple's cell index
    reads its digits most significant first.  All cells enter the
    statistic, referred to chi-square with d**l - 1 degrees.
    """
    if d < 2:
        raise ValueError("digit base d must be >= 2")
    if l < 1:
        raise ValueError("tuple length l must be >= 1")
    v = _values(sample)
    tup = _tuples(v, l, mode)
    t = tup.shape[0]
    k = d**l
    lam = t / k
    if lam < 5.0:
        d_max = int(math.floor((t / 5.0) ** (1.0 / l)))
        raise ValueError(
            f"{t} tuples over {k} cells gives expected {lam:.2f} < 5; "
            f"the largest admissible base at this length is d={d_max}"
        )
    digits = np.minimum((tup * d).astype(np.int64), d - 1)
    cells = np.zeros(t, dtype=np.int64)
    for pos in range(l):
        cells = cells * d + digits[:, pos]
    counts = np.bincount(cells, minlength=k)
    binned = BinnedCounts(counts, np.full(k, lam), k - 1)
    result = chi_square_gof(binned, alpha, name="serial")
    result.detail.update(
        {"d": d, "l": l, "cells": int(k), "mode": mode, "n_tuples": int(t)}
    )
    return result


# ---------------------------------------------------------------------------
# birthday spacings

def _merge_bins(counts: np.ndarray, expected: np.ndarray, floor: float = 5.0):
    """Pool adjacent bins left to right until every pooled bin reaches floor."""
    pooled_c, pooled_e = [], []
    acc_c, acc_e = 0, 0.0
    for c, e in zip(counts, expected):
        acc_c += int(c)
        acc_e += float(e)
        if acc_e >= floor:
            pooled_c.append(acc_c)
            pooled_e.append(acc_e)
            acc_c, acc_e = 0, 0.0
    if acc_e > 0.0 or acc_c > 0:
        if pooled_c:
            pooled_c[-1] += acc_c
            pooled_e[-1] += acc_e
        else:
            pooled_c.append(acc_c)
            pooled_e.append(acc_e)
    return np.array(pooled_c, dtype=np.int64), np.array(pooled_e, dtype=np.float64)


def birthday_spacings_test(
    sample,
    n: int = 512,
    k: int = 2**24,
    alpha: float = DEFAULT_ALPHA,
) -> TestResult:
    """Marsaglia-style birthday spacings test.

    The sample is cut into disjoint blocks of n values, each value drawn
    into one of k cells.  Within a block the sorted cell numbers give
    n - 1 spacings; the per-block statistic Y counts duplicated spacing
    values, Y = (n - 1) - #distinct.  Y is approximately Poisson with
    mean n**3 / (4k); the histogram of Y over blocks is tested by
    chi-square with adjacent bins pooled to expected counts of 5.
    """
    v = _values(sample)
    blocks = v.size // n
    if blocks < 20:
        raise ValueError(
            f"only {blocks} disjoint blocks of {n}; need at least 20"
        )
    lam = n**3 / (4.0 * k)
    block_vals = v[: blocks * n].reshape(blocks, n)
    cells = np.minimum((block_vals * k).astype(np.int64), k - 1)
    cells.sort(axis=1)
    cell_collisions = (n - 1) - np.count_nonzero(np.diff(cells, axis=1), axis=1)
    spacings = np.diff(cells, axis=1)
    spacings.sort(axis=1)
    distinct = 1 + np.count_nonzero(np.diff(spacings, axis=1), axis=1)
    y = (n - 1) - distinct

    y_max = int(y.max())
    counts = np.bincount(y, minlength=y_max + 1)
    pmf = np.array([poisson_pmf(j, lam) for j in range(y_max + 1)])
    expected = blocks * pmf
    # close the support with the upper tail mass
    tail = blocks * max(1.0 - pmf.sum(), 0.0)
    counts = np.append(counts, 0)
    expected = np.append(expected, tail)
    pooled_c, pooled_e = _merge_bins(counts, expected)
    if pooled_c.size < 2:
        raise ValueError("too few blocks for a spacing histogram; increase the sample")
    binned = BinnedCounts(pooled_c, pooled_e, pooled_c.size - 1)
    result = chi_square_gof(binned, alpha, name="birthday-spacings")
    result.detail.update(
        {
            "n": int(n),
            "cells": int(k),
            "n_blocks": int(blocks),
            "poisson_mean": lam,
            "mean_duplicate_spacings": float(y.mean()),
            "mean_cell_collisions": float(cell_collisions.mean()),
            "histogram_bins": int(pooled_c.size),
        }
    )
    if not 0.5 <= lam <= 20.0:
        result.detail["poisson_mean_warning"] = (
            "mean outside [0.5, 20]; the Poisson approximation degrades"
        )
        warnings.warn(
            f"birthday-spacings: Poisson mean {lam:.3g} outside [0.5, 20]",
            stacklevel=2,
        )
    return result


# ---------------------------------------------------------------------------
# global uniformity composite

def global_uniformity(
    sample,
    alpha: float = DEFAULT_ALPHA,
    levene_groups: int = 10,
    gof_bins: int = 100,
) -> list[TestResult]:
    """Location, scale, spread and distributional-distance checks.

    Runs, in order: t test of the mean against 1/2, one-sample variance
    test against 1/12, Levene over contiguous blocks, Kolmogorov-Smirnov,
    equiprobable-bin chi-square, and Anderson-Darling.
    """
    v = _values(sample)
    n = v.size
    if n < 100:
        raise ValueError("global uniformity needs at least 100 observations")
    results = [
        t_test_mean(v, 0.5, alpha),
        variance_test(v, 1.0 / 12.0, alpha),
        levene_test(v, levene_groups, alpha),
        ks_test_uniform(v, alpha),
    ]
    bins = np.bincount(np.minimum((v * gof_bins).astype(np.int64), gof_bins - 1),
                       minlength=gof_bins)
    binned = BinnedCounts(bins, np.full(gof_bins, n / gof_bins), gof_bins - 1)
    results.append(chi_square_gof(binned, alpha, name="chi2-uniform"))
    results.append(anderson_darling_uniform(v, alpha))
    results[0].detail["empirical_mean"] = float(v.mean())
    results[1].detail["empirical_variance"] = float(v.var(ddof=1))
    return results


# ---------------------------------------------------------------------------
# the battery

def _run_uniformity(sample, config, alpha):
    return global_uniformity(sample, alpha, config.levene_groups, config.gof_bins)


def _run_permutation(sample, config, alpha):
    return permutation_test(sample, config.permutation_k, config.tuple_mode, alpha)


def _run_serial(sample, config, alpha):
    return serial_test(sample, config.serial_d, config.serial_l, config.tuple_mode, alpha)


def _run_birthday(sample, config, alpha):
    return birthday_spacings_test(sample, config.birthday_n, config.birthday_k, alpha)


TEST_REGISTRY = {
    "uniformity": _run_uniformity,
    "permutation": _run_permutation,
    "serial": _run_serial,
    "birthday": _run_birthday,
}

_RESULTS_PER_TEST = {"uniformity": 6}


def run_battery(sample, config: BatteryConfig | None = None) -> BatteryReport:
    """Run every enabled test family; per-family errors become entries.

    With ``bonferroni=True`` the working level is alpha divided by the
    number of component results the enabled families produce.
    """
    if config is None:
        config = BatteryConfig()
    alpha = config.alpha
    if config.bonferroni:
        planned = sum(_RESULTS_PER_TEST.get(t, 1) for t in config.tests)
        if planned:
            alpha = config.alpha / planned
    results: list[TestResult] = []
    errors: list[dict] = []
    for name in config.tests:
        runner = TEST_REGISTRY.get(name)
        if runner is None:
            errors.append({"test": name, "error": f"unknown test {name!r}"})
            continue
        try:
            out = runner(sample, config, alpha)
        except Exception as exc:
            errors.append({"test": name, "error": str(exc)})
            continue
        results.extend(out if isinstance(out, list) else [out])
    provenance = getattr(sample, "provenance", "external")
    return BatteryReport(results, errors, provenance, config)
