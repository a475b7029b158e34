"""Accuracy metrics and the analytic correct-rate bound.

Relative error is only defined for items that are actually present
(true frequency > 0); the reporting here excludes zero-frequency items
everywhere, and "correct" always means a relative error of exactly zero —
integer estimates make that a meaningful notion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, UndefinedMetricError

# CDF report thresholds; callers can add their own, inf is always included so
# the curve ends at 1.0.
DEFAULT_THRESHOLDS = (0.0001, 0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, math.inf)


def relative_error(estimate, true_freq) -> float:
    """|estimate - true| / true. Undefined at true == 0."""
    if true_freq == 0:
        raise UndefinedMetricError("relative error is undefined at true frequency 0")
    return abs(estimate - true_freq) / true_freq


@dataclass(frozen=True)
class AccuracyReport:
    """Per-item estimates and the summary statistics derived from them."""

    keys: np.ndarray
    true_freqs: np.ndarray
    estimates: np.ndarray
    relative_errors: np.ndarray
    are: float
    correct_fraction: float
    cdf: list  # (threshold, fraction), non-decreasing, ends at (inf, 1.0)

    @property
    def per_item(self):
        return list(
            zip(
                self.keys.tolist(),
                self.true_freqs.tolist(),
                self.estimates.tolist(),
                self.relative_errors.tolist(),
            )
        )


def cdf_points(relative_errors, extra_thresholds=()) -> list:
    """Fraction of items with relative error strictly below each threshold."""
    thresholds = sorted(set(DEFAULT_THRESHOLDS) | set(extra_thresholds))
    n = len(relative_errors)
    if n == 0:
        raise UndefinedMetricError("no items to build a CDF over")
    sorted_re = np.sort(relative_errors)
    points = []
    for thr in thresholds:
        below = int(np.searchsorted(sorted_re, thr, side="left"))
        points.append((float(thr), below / n))
    return points


def accuracy_report(query_many, oracle, extra_thresholds=()) -> AccuracyReport:
    """Evaluate a sketch's query function against exact counts.

    ``query_many`` maps a uint64 key array to integer estimates; ``oracle``
    is an ExactOracle (anything with ``distinct_items()`` works). Every
    distinct positive-count item is queried exactly once.
    """
    items = oracle.distinct_items()
    if not items:
        raise ConfigurationError("oracle holds no positive-count items")
    keys = np.array([k for k, _ in items], dtype=np.uint64)
    true = np.array([c for _, c in items], dtype=np.int64)
    est = np.asarray(query_many(keys), dtype=np.int64)
    rel = np.abs(est - true) / true
    return AccuracyReport(
        keys=keys,
        true_freqs=true,
        estimates=est,
        relative_errors=rel,
        are=float(rel.mean()),
        correct_fraction=float((rel == 0).mean()),
        cdf=cdf_points(rel, extra_thresholds),
    )


def correct_rate_bound(v: int, w: int, d: int) -> float:
    """Analytic lower bound on the fraction of exactly-answered queries for a
    min-of-d sketch whose counters track bucket maxima (the slim side under a
    perfect fat).

    For the item of frequency rank l (1 = smallest) among v distinct items,
    the chance that some array gives it a collision-free-maximum bucket is
    1 - (1 - (1 - 1/w)**(v-l))**d; the bound averages that over l. Evaluated
    through exp/log1p so large w does not cancel catastrophically. The bound
    is exact only when all item frequencies differ; ties only help, so
    empirical correct rates sit at or above it.
    """
    if v < 1 or w < 1 or d < 1:
        raise ConfigurationError("v, w, d must all be >= 1")
    exponent = v - np.arange(1, v + 1, dtype=np.float64)  # v - l
    inner = np.exp(exponent * math.log1p(-1.0 / w)) if w > 1 else np.where(exponent == 0, 1.0, 0.0)
    terms = 1.0 - (1.0 - inner) ** d
    return float(terms.mean())


def measure_alpha(sketch) -> float:
    """Mean per-array counter increments per insertion.

    Accepts anything carrying ``increment_counts`` and ``insertions_seen``
    (a slim subsketch, or a whole sketch exposing them, so a count-min sketch
    tallied the same way measures exactly 1.0).
    """
    tallied = getattr(sketch, "slim", sketch)
    if tallied.insertions_seen == 0:
        raise UndefinedMetricError("no insertions seen; the update rate is undefined")
    rates = tallied.increment_counts / tallied.insertions_seen
    return float(rates.mean())


def tail_violation_rate(report: AccuracyReport, epsilon: float, alpha: float, n: int) -> float:
    """Fraction of items whose estimate reaches true + epsilon * alpha * n."""
    threshold = report.true_freqs + epsilon * alpha * n
    return float((report.estimates >= threshold).mean())
