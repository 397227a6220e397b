"""Subgroup planning policies.

Three planners turn a snapshot of reported levels into an activation mask:

* single-group: one transmission at the lowest occupied level, so nobody is
  excluded and nobody gets more than the worst user can decode.
* group-based: the lowest occupied level plus the most populated occupied
  levels, trimmed greedily to the code budget.
* optimized: exact minimum of the group dissatisfaction under the code
  budget, via the dynamic program in the kernels package.

All planners keep the lowest occupied level covered, which is what makes every
returned plan outage-free.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels, satisfaction
from .cqi import CqiTable
from .errors import ConfigurationError, PlanningError


class Policy(enum.Enum):
    SINGLE_GROUP = "sg"
    GROUP_BASED = "gb"
    OPTIMIZED = "egb"

    @classmethod
    def from_token(cls, token: str) -> "Policy":
        for p in cls:
            if p.value == token:
                return p
        raise ConfigurationError(f"unknown policy {token!r}; expected one of "
                                 + ", ".join(p.value for p in cls))


@dataclass(frozen=True)
class GbParams:
    """Group-based planner knobs; num_subgroups counts the enabled levels."""

    num_subgroups: int = 2

    def __post_init__(self):
        if self.num_subgroups < 1:
            raise ConfigurationError("num_subgroups must be at least 1")


@dataclass(frozen=True)
class SubgroupLevel:
    level: int
    rate_kbps: float
    codes: int
    users: int


@dataclass(frozen=True)
class SubgroupPlan:
    """One policy's answer for one snapshot of reported levels."""

    policy: Policy
    active: tuple
    per_level: tuple
    assignment: tuple
    report: satisfaction.DissatisfactionReport

    @property
    def codes_used(self) -> int:
        return self.report.codes_used

    @property
    def enabled_levels(self) -> tuple:
        return tuple(sl.level for sl in self.per_level)


def _counts_from_levels(levels: Sequence[int], table: CqiTable) -> np.ndarray:
    if len(levels) == 0:
        raise ValueError("population is empty")
    return satisfaction.level_counts(levels, table.n_cqi)


def single_group_mask(counts) -> np.ndarray:
    """Enable only the lowest occupied level."""
    u = np.asarray(counts, dtype=np.int64)
    mask = np.zeros(u.size, dtype=bool)
    occ = np.flatnonzero(u)
    if occ.size == 0:
        raise ValueError("population is empty")
    mask[occ[0]] = True
    return mask


def group_based_mask(counts, codes, budget: int, num_subgroups: int = 2) -> np.ndarray:
    """Lowest occupied level plus the most populated ones, within the budget.

    Selection picks the lowest occupied level and then the num_subgroups - 1
    most populated occupied levels (ties to the lower level). While the
    selection exceeds the code budget, the least populated extra level is
    dropped (ties to the higher level); the lowest occupied level is never
    dropped. If that single level alone exceeds the budget it is replaced by
    the highest affordable level below it so coverage survives.
    """
    u = np.asarray(counts, dtype=np.int64)
    c = np.asarray(codes, dtype=np.int64)
    if u.shape != c.shape:
        raise ValueError("counts and codes must be equally sized")
    occ = np.flatnonzero(u)
    if occ.size == 0:
        raise ValueError("population is empty")
    kmin = int(occ[0])
    by_pop = sorted(occ.tolist(), key=lambda k: (-int(u[k]), k))
    # the lowest occupied level may itself be among the most populated, in
    # which case the plan simply has fewer levels
    picked = {kmin} | set(by_pop[: num_subgroups - 1])

    def used(sel):
        return int(sum(int(c[k]) for k in sel))

    # trim: least populated first, higher level first on ties
    while used(picked) > budget and len(picked) > 1:
        drop = min((k for k in picked if k != kmin), key=lambda k: (int(u[k]), -k))
        picked.discard(drop)
    if used(picked) > budget:
        affordable = [k for k in range(kmin + 1) if int(c[k]) <= budget]
        if not affordable:
            raise PlanningError(
                f"no level at or below {kmin + 1} fits a budget of {budget} codes"
            )
        picked = {affordable[-1]}
    mask = np.zeros(u.size, dtype=bool)
    mask[sorted(picked)] = True
    return mask


def optimized_mask(counts, rates, codes, budget: int) -> np.ndarray:
    """Exact minimum-dissatisfaction activation under the code budget."""
    if budget < 1:
        raise ConfigurationError("code budget must be at least 1")
    got = _kernels.solve_dp(rates, codes, counts, budget)
    if got is None:
        raise PlanningError(f"no outage-free activation fits a budget of {budget} codes")
    _, _, mask_bytes = got
    return np.frombuffer(mask_bytes, dtype=np.uint8).astype(bool)


def brute_force_mask(counts, rates, codes, budget: int) -> np.ndarray:
    """Exhaustive-search twin of optimized_mask; the verification oracle."""
    if budget < 1:
        raise ConfigurationError("code budget must be at least 1")
    got = _kernels.solve_bruteforce(rates, codes, counts, budget)
    if got is None:
        raise PlanningError(f"no outage-free activation fits a budget of {budget} codes")
    _, _, mask_bytes = got
    return np.frombuffer(mask_bytes, dtype=np.uint8).astype(bool)


def serving_levels(mask, levels: Sequence[int]) -> np.ndarray:
    """Per-user serving level (1-based) under a mask; 0 marks outage."""
    m = np.asarray(mask, dtype=bool)
    enabled = np.flatnonzero(m) + 1
    lv = np.asarray(levels, dtype=np.int64)
    if lv.size and (lv.min() < 1 or lv.max() > m.size):
        raise ValueError(f"reported levels must lie in [1, {m.size}]")
    if enabled.size == 0:
        return np.zeros(lv.size, dtype=np.int64)
    pos = np.searchsorted(enabled, lv, side="right") - 1
    out = np.where(pos >= 0, enabled[np.clip(pos, 0, None)], 0)
    return out.astype(np.int64)


def _assemble(policy: Policy, mask: np.ndarray, levels: Sequence[int],
              table: CqiTable, normalizer: str) -> SubgroupPlan:
    served = serving_levels(mask, levels)
    report = satisfaction.group_report(levels, mask, table.rates, table.codes,
                                       normalizer=normalizer)
    per_level = []
    for k in np.flatnonzero(mask) + 1:
        entry = table.lookup(int(k))
        per_level.append(SubgroupLevel(
            level=int(k),
            rate_kbps=entry.data_rate_kbps,
            codes=entry.num_codes,
            users=int(np.count_nonzero(served == k)),
        ))
    return SubgroupPlan(
        policy=policy,
        active=tuple(bool(b) for b in mask),
        per_level=tuple(per_level),
        assignment=tuple(int(s) for s in served),
        report=report,
    )


def single_group_plan(levels: Sequence[int], table: CqiTable,
                      normalizer: str = "mean_supported") -> SubgroupPlan:
    """Everyone in one subgroup at the lowest occupied level."""
    counts = _counts_from_levels(levels, table)
    mask = single_group_mask(counts)
    return _assemble(Policy.SINGLE_GROUP, mask, levels, table, normalizer)


def group_based_plan(levels: Sequence[int], table: CqiTable, budget: int,
                     params: Optional[GbParams] = None,
                     normalizer: str = "mean_supported") -> SubgroupPlan:
    """Population-driven subgroups trimmed to the code budget."""
    params = params or GbParams()
    counts = _counts_from_levels(levels, table)
    mask = group_based_mask(counts, table.codes, budget, params.num_subgroups)
    return _assemble(Policy.GROUP_BASED, mask, levels, table, normalizer)


def optimized_plan(levels: Sequence[int], table: CqiTable, budget: int,
                   normalizer: str = "mean_supported") -> SubgroupPlan:
    """Globally minimal group dissatisfaction under the code budget."""
    counts = _counts_from_levels(levels, table)
    mask = optimized_mask(counts, table.rates, table.codes, budget)
    return _assemble(Policy.OPTIMIZED, mask, levels, table, normalizer)


def brute_force_plan(levels: Sequence[int], table: CqiTable, budget: int,
                     normalizer: str = "mean_supported") -> SubgroupPlan:
    counts = _counts_from_levels(levels, table)
    mask = brute_force_mask(counts, table.rates, table.codes, budget)
    return _assemble(Policy.OPTIMIZED, mask, levels, table, normalizer)


def build_plan(policy: Policy, levels: Sequence[int], table: CqiTable, budget: int,
               params: Optional[GbParams] = None,
               normalizer: str = "mean_supported") -> SubgroupPlan:
    if policy is Policy.SINGLE_GROUP:
        return single_group_plan(levels, table, normalizer)
    if policy is Policy.GROUP_BASED:
        return group_based_plan(levels, table, budget, params, normalizer)
    return optimized_plan(levels, table, budget, normalizer)
