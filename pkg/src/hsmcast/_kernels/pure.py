"""Pure-Python subgroup-search kernels.

These are the fallback implementations of the hot planning kernels; the
compiled module `hsmcast._kernels._fast` exposes the same three functions with
identical semantics, including tie-breaking.

All kernels work on per-level aggregates for a table of n rate levels:

    rates[k]   supported data rate of level k (kbps), non-decreasing
    codes[k]   channelization codes consumed when level k is enabled
    counts[k]  number of users whose reported level is k

An activation mask enables a subset of levels. Each user is served at the
highest enabled rate at or below its level; a user with no enabled level at or
below its own is in outage and the mask's cost is infinite. The cost of a mask
is the summed dissatisfaction over users, i.e. sum_k counts[k] * (rates[k] -
served_rate_k), and the solvers minimise it subject to sum of enabled codes <=
budget.

All kernels require positive, non-decreasing rates; with that precondition the
served rate never exceeds the user's own rate and the subtraction above equals
the general dissatisfaction metric. Violations raise ValueError.

Tie-breaking is identical in both solvers: least cost, then fewest codes, then
the lexicographically smallest activation vector with the lowest level as the
most significant position (so a tie prefers leaving lower levels disabled).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"

# Exhaustive search is for desk-scale verification only.
BRUTE_FORCE_MAX_LEVELS = 25

_CHUNK = 1 << 16


def _as_arrays(rates, codes, counts):
    r = np.ascontiguousarray(rates, dtype=np.float64)
    c = np.ascontiguousarray(codes, dtype=np.int64)
    u = np.ascontiguousarray(counts, dtype=np.int64)
    if not (r.ndim == c.ndim == u.ndim == 1) or not (r.size == c.size == u.size):
        raise ValueError("rates, codes and counts must be 1-D and equally sized")
    if r.size and (r[0] <= 0.0 or np.any(np.diff(r) < 0.0)):
        raise ValueError("rates must be positive and non-decreasing")
    return r, c, u


def evaluate_mask(mask, rates, codes, counts):
    """Cost of one activation mask.

    Returns (total_dissatisfaction, codes_used); the total is the sum over
    users in kbps and is inf when any populated level has no enabled level at
    or below it.
    """
    r, c, u = _as_arrays(rates, codes, counts)
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    if m.shape != r.shape:
        raise ValueError("mask length does not match the level arrays")
    used = 0
    total = 0.0
    have = False
    cur = 0.0
    for k in range(r.size):
        if m[k]:
            used += int(c[k])
            if not have or r[k] > cur:
                cur = float(r[k])
            have = True
        if u[k]:
            if not have:
                total = np.inf
            else:
                total += int(u[k]) * (float(r[k]) - cur)
    return float(total), used


def solve_dp(rates, codes, counts, budget):
    """Exact minimum-cost activation via dynamic programming.

    Levels are processed in ascending order; between two consecutive enabled
    levels every user is served at the lower one, so the cost decomposes into
    per-segment sums and the state is (last enabled level, codes still
    available). Runs in O(n^2 * budget). Requires non-decreasing rates.

    Returns (total, codes_used, mask_bytes) or None when no activation with
    finite cost fits the budget.
    """
    r, c, u = _as_arrays(rates, codes, counts)
    n = r.size
    budget = int(budget)
    if budget < 0:
        budget = 0

    if int(u.sum()) == 0:
        return 0.0, 0, bytes(n)

    rl = r.tolist()
    cl = c.tolist()
    ul = u.tolist()
    kmin = next(k for k in range(n) if ul[k])

    # prefix sums of user counts and of count-weighted rates
    pc = [0] * (n + 1)
    pb = [0.0] * (n + 1)
    for k in range(n):
        pc[k + 1] = pc[k] + ul[k]
        pb[k + 1] = pb[k] + ul[k] * rl[k]

    # g*[j][rem]: best completion for levels > j given level j enabled and rem
    # codes left; cost covers all users at levels >= j.
    gcost = [[0.0] * (budget + 1) for _ in range(n)]
    gcodes = [[0] * (budget + 1) for _ in range(n)]
    gnext = [[-1] * (budget + 1) for _ in range(n)]

    for j in range(n - 1, -1, -1):
        rj = rl[j]
        tail = (pb[n] - pb[j]) - rj * (pc[n] - pc[j])
        seg = [0.0] * n
        for m in range(j + 1, n):
            seg[m] = (pb[m] - pb[j]) - rj * (pc[m] - pc[j])
        row_cost = gcost[j]
        row_codes = gcodes[j]
        row_next = gnext[j]
        for rem in range(budget + 1):
            best_cost = tail
            best_codes = 0
            best_next = -1
            # descending m keeps the lexicographic preference: at equal cost
            # and codes the option enabling the higher next level wins, and
            # stopping beats both.
            for m in range(n - 1, j, -1):
                cm = cl[m]
                if cm <= rem:
                    rem2 = rem - cm
                    cost = seg[m] + gcost[m][rem2]
                    codes2 = cm + gcodes[m][rem2]
                    if cost < best_cost or (cost == best_cost and codes2 < best_codes):
                        best_cost = cost
                        best_codes = codes2
                        best_next = m
            row_cost[rem] = best_cost
            row_codes[rem] = best_codes
            row_next[rem] = best_next

    # first enabled level: any j <= kmin that fits; larger j wins ties
    best = None
    for j in range(kmin, -1, -1):
        if cl[j] <= budget:
            rem = budget - cl[j]
            cand = (gcost[j][rem], cl[j] + gcodes[j][rem])
            if best is None or cand < (best[0], best[1]):
                best = (cand[0], cand[1], j)
    if best is None:
        return None

    mask = bytearray(n)
    j = best[2]
    rem = budget - cl[j]
    mask[j] = 1
    while True:
        nj = gnext[j][rem]
        if nj < 0:
            break
        rem -= cl[nj]
        mask[nj] = 1
        j = nj
    return float(best[0]), int(best[1]), bytes(mask)


def solve_bruteforce(rates, codes, counts, budget):
    """Exhaustive search over all 2^n activations; the verification oracle.

    Same return contract and tie-breaking as solve_dp. Refuses more than
    BRUTE_FORCE_MAX_LEVELS levels.
    """
    r, c, u = _as_arrays(rates, codes, counts)
    n = r.size
    if n > BRUTE_FORCE_MAX_LEVELS:
        raise ValueError(
            f"exhaustive search refused for {n} levels (limit {BRUTE_FORCE_MAX_LEVELS})"
        )
    budget = int(budget)
    occupied = u > 0
    shifts = np.arange(n, dtype=np.int64)
    # lexicographic key: level 1 is the most significant bit
    lexw = np.int64(1) << np.arange(n - 1, -1, -1, dtype=np.int64)

    best = None  # (total, codes_used, lexkey, mask_int)
    total_masks = 1 << n
    for lo in range(0, total_masks, _CHUNK):
        masks = np.arange(lo, min(lo + _CHUNK, total_masks), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        on = bits.astype(bool)
        served = np.maximum.accumulate(np.where(on, r, -np.inf), axis=1)
        outage = (~np.isfinite(served)) & occupied
        any_outage = outage.any(axis=1)
        served_safe = np.where(np.isfinite(served), served, r)
        total = ((r - served_safe) * u).sum(axis=1)
        total[any_outage] = np.inf
        used = bits @ c
        ok = np.flatnonzero((used <= budget) & ~any_outage)
        if ok.size == 0:
            continue
        lexkey = bits[ok] @ lexw
        order = np.lexsort((lexkey, used[ok], total[ok]))
        pick = ok[order[0]]
        cand = (float(total[pick]), int(used[pick]), int(lexkey[order[0]]), int(masks[pick]))
        if best is None or cand[:3] < best[:3]:
            best = cand

    if best is None:
        return None
    mask_int = best[3]
    mask = bytes((mask_int >> k) & 1 for k in range(n))
    return best[0], best[1], mask
