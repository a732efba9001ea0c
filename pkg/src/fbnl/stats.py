"""Goodness-of-fit and homogeneity tests for message counts.

Thin wrappers over :mod:`scipy.stats` that handle the unbounded support of
``K``: trailing symbols are pooled into one ``k >= k_max`` cell until every
expected cell count is at least ``min_expected``.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

from .rejection import geometric_pmf

ALPHA = 0.01
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class TestResult:
    statistic: float
    dof: int
    p_value: float
    alpha: float

    __test__ = False  # keep pytest from collecting this

    @property
    def passed(self) -> bool:
        return self.p_value >= self.alpha

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def geometric_fit(
    counts: Mapping[int, int],
    p: float,
    alpha: float = ALPHA,
    min_expected: float = MIN_EXPECTED,
) -> TestResult:
    """Chi-square test of observed ``K`` counts against ``geometric_pmf(p, .)``."""
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("no observations")
    # last cell is the tail k >= k_max with mass (1-p)**(k_max-1)
    k_max = 1
    while total * (1.0 - p) ** k_max >= min_expected:
        k_max += 1
    if k_max < 2:
        raise ValueError("too few observations for a chi-square test")
    probs = [geometric_pmf(p, k) for k in range(1, k_max)]
    probs.append((1.0 - p) ** (k_max - 1))
    observed = [counts.get(k, 0) for k in range(1, k_max)]
    observed.append(sum(n for k, n in counts.items() if k >= k_max))
    expected = total * np.asarray(probs)
    stat, pval = sps.chisquare(np.asarray(observed, dtype=float), expected)
    return TestResult(float(stat), len(observed) - 1, float(pval), alpha)


def homogeneity(
    samples: Sequence[Mapping[int, int]],
    alpha: float = ALPHA,
    min_expected: float = MIN_EXPECTED,
) -> TestResult:
    """Chi-square test that several count tables come from one distribution."""
    if len(samples) < 2:
        raise ValueError("homogeneity needs at least two samples")
    support = sorted({k for s in samples for k, n in s.items() if n > 0})
    table = np.array([[s.get(k, 0) for k in support] for s in samples], dtype=float)
    # pool from the right until the smallest expected cell is large enough
    while table.shape[1] > 2:
        col = table.sum(axis=0)
        row = table.sum(axis=1)
        if (np.outer(row, col[-1:]) / table.sum()).min() >= min_expected:
            break
        table[:, -2] += table[:, -1]
        table = table[:, :-1]
    res = sps.chi2_contingency(table, correction=False)
    return TestResult(float(res.statistic), int(res.dof), float(res.pvalue), alpha)


def ks_test(samples: np.ndarray, cdf, alpha: float = ALPHA) -> TestResult:
    """One-sample Kolmogorov-Smirnov test; ``dof`` is reported as the sample size."""
    res = sps.kstest(np.asarray(samples), cdf)
    return TestResult(float(res.statistic), int(np.size(samples)), float(res.pvalue), alpha)


def binned_chisquare(
    samples: np.ndarray,
    edges: np.ndarray,
    bin_probs: np.ndarray,
    alpha: float = ALPHA,
) -> TestResult:
    """Chi-square of a histogram against known bin masses (which must sum to one)."""
    observed, _ = np.histogram(samples, bins=edges)
    expected = np.size(samples) * np.asarray(bin_probs, dtype=float)
    expected *= observed.sum() / expected.sum()
    stat, pval = sps.chisquare(observed.astype(float), expected)
    return TestResult(float(stat), len(observed) - 1, float(pval), alpha)
