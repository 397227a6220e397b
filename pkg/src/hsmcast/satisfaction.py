"""Dissatisfaction metrics for multicast subgrouping.

A plan enables a subset of the rate levels reported by the users. Every user
is admitted at the fastest enabled rate not exceeding its own supported rate;
the gap between the two is the user's dissatisfaction in kbps. A user that
cannot be admitted at all (no enabled level at or below its own) counts as
infinitely dissatisfied, which makes outage dominate every comparison between
plans. Infinity is carried as math.inf, which already saturates through sums
and comparisons; reports expose an is_finite flag so callers never have to
probe the float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

NORMALIZERS = ("mean_supported", "max_supported")


def user_dissatisfaction(supported_kbps: float, admitted_kbps: float) -> float:
    """Rate a single user loses by joining the multicast stream.

    Infinite when the user is not admitted (zero rate) or would have to decode
    faster than it can (admitted above supported).
    """
    if admitted_kbps > 0.0 and supported_kbps >= admitted_kbps:
        return supported_kbps - admitted_kbps
    return math.inf


def admitted_rates(mask, rates_kbps) -> np.ndarray:
    """Per-level admitted rate: the fastest enabled rate at or below each level.

    Levels with no enabled level at or below them get 0.0 (outage).
    """
    m = np.asarray(mask, dtype=bool)
    r = np.asarray(rates_kbps, dtype=np.float64)
    if m.shape != r.shape:
        raise ValueError("mask length does not match the rate vector")
    stepped = np.maximum.accumulate(np.where(m, r, -np.inf))
    return np.where(np.isfinite(stepped), stepped, 0.0)


def admitted_rate(mask, level: int, rates_kbps) -> float:
    """Admitted rate for one 1-based level under the given activation mask."""
    r = np.asarray(rates_kbps, dtype=np.float64)
    if not 1 <= level <= r.size:
        raise ValueError(f"level {level} outside [1, {r.size}]")
    return float(admitted_rates(mask, r)[level - 1])


def codes_used(mask, codes) -> int:
    m = np.asarray(mask, dtype=bool)
    c = np.asarray(codes, dtype=np.int64)
    if m.shape != c.shape:
        raise ValueError("mask length does not match the code vector")
    return int(c[m].sum())


def level_counts(levels: Sequence[int], n_levels: int) -> np.ndarray:
    """Histogram of reported levels (1-based) onto a vector of length n_levels."""
    idx = np.asarray(levels, dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > n_levels):
        raise ValueError(f"reported levels must lie in [1, {n_levels}]")
    return np.bincount(idx - 1, minlength=n_levels).astype(np.int64)


@dataclass(frozen=True)
class DissatisfactionReport:
    """Group-level summary of one activation mask against one user population.

    per_user holds (user_id, dissatisfaction_kbps) pairs; users_per_level is
    the histogram of supported levels; normalized divides the mean by the
    population's mean (or maximum) supported rate and stays in [0, 1] whenever
    the mean is finite.
    """

    per_user: tuple
    users_per_level: tuple
    mean_kbps: float
    normalized: float
    codes_used: int
    is_finite: bool

    @property
    def num_users(self) -> int:
        return int(sum(self.users_per_level))


def _normalizer_value(kind: str, rates: np.ndarray, counts: np.ndarray) -> float:
    n = int(counts.sum())
    if n == 0:
        return 0.0
    if kind == "mean_supported":
        return float((rates * counts).sum() / n)
    if kind == "max_supported":
        return float(rates[counts > 0].max())
    raise ValueError(f"unknown normalizer {kind!r}; expected one of {NORMALIZERS}")


def group_report(
    levels: Sequence[int],
    mask,
    rates_kbps,
    codes,
    normalizer: str = "mean_supported",
    user_ids: Optional[Sequence[int]] = None,
) -> DissatisfactionReport:
    """Average per-user dissatisfaction of a plan, plus its code consumption.

    `levels[i]` is the supported (1-based) level of user i. The mean is over
    all users and infinite as soon as one user is left without an admissible
    stream. An empty population is rejected.
    """
    r = np.asarray(rates_kbps, dtype=np.float64)
    c = np.asarray(codes, dtype=np.int64)
    if r.shape != c.shape:
        raise ValueError("rates and codes must be equally sized")
    lv = list(levels)
    if not lv:
        raise ValueError("population is empty")
    counts = level_counts(lv, r.size)
    if user_ids is None:
        user_ids = range(len(lv))
    admitted = admitted_rates(mask, r)
    per_user = tuple(
        (int(uid), user_dissatisfaction(float(r[k - 1]), float(admitted[k - 1])))
        for uid, k in zip(user_ids, lv)
    )
    total = 0.0
    for _, w in per_user:
        total += w
    mean = total / len(per_user)
    norm_base = _normalizer_value(normalizer, r, counts)
    if mean == 0.0:
        normalized = 0.0
    elif norm_base > 0.0:
        normalized = mean / norm_base
    else:
        normalized = math.inf
    return DissatisfactionReport(
        per_user=per_user,
        users_per_level=tuple(int(x) for x in counts),
        mean_kbps=mean,
        normalized=normalized,
        codes_used=codes_used(mask, c),
        is_finite=math.isfinite(mean),
    )
