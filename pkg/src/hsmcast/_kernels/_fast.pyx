# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subgroup-search kernels.

Same API and semantics as hsmcast._kernels.pure, including tie-breaking:
least cost, then fewest codes, then the lexicographically smallest activation
vector with the lowest level as the most significant position.
"""

import numpy as np

from libc.math cimport INFINITY

BACKEND_NAME = "compiled"

BRUTE_FORCE_MAX_LEVELS = 25


cdef _coerce(rates, codes, counts):
    r = np.ascontiguousarray(rates, dtype=np.float64)
    c = np.ascontiguousarray(codes, dtype=np.int64)
    u = np.ascontiguousarray(counts, dtype=np.int64)
    if not (r.ndim == c.ndim == u.ndim == 1) or not (r.size == c.size == u.size):
        raise ValueError("rates, codes and counts must be 1-D and equally sized")
    if r.size and (r[0] <= 0.0 or np.any(np.diff(r) < 0.0)):
        raise ValueError("rates must be positive and non-decreasing")
    return r, c, u


def evaluate_mask(mask, rates, codes, counts):
    """Cost of one activation mask; see the pure backend for the contract."""
    r_, c_, u_ = _coerce(rates, codes, counts)
    m_ = np.ascontiguousarray(mask, dtype=np.uint8)
    if m_.shape != r_.shape:
        raise ValueError("mask length does not match the level arrays")
    cdef const double[::1] r = r_
    cdef const long long[::1] c = c_
    cdef const long long[::1] u = u_
    cdef const unsigned char[::1] m = m_
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t k
    cdef long long used = 0
    cdef double total = 0.0
    cdef double cur = 0.0
    cdef bint have = False
    for k in range(n):
        if m[k]:
            used += c[k]
            if not have or r[k] > cur:
                cur = r[k]
            have = True
        if u[k]:
            if not have:
                total = INFINITY
            else:
                total += u[k] * (r[k] - cur)
    return float(total), int(used)


def solve_dp(rates, codes, counts, budget):
    """Exact minimum-cost activation via dynamic programming.

    Returns (total, codes_used, mask_bytes) or None when no activation with
    finite cost fits the budget. Requires non-decreasing rates.
    """
    r_, c_, u_ = _coerce(rates, codes, counts)
    cdef long long B = int(budget)
    if B < 0:
        B = 0
    cdef const double[::1] r = r_
    cdef const long long[::1] c = c_
    cdef const long long[::1] u = u_
    cdef Py_ssize_t n = r.shape[0]
    cdef Py_ssize_t j, k, m
    cdef long long rem, rem2

    if int(u_.sum()) == 0:
        return 0.0, 0, bytes(n)

    cdef Py_ssize_t kmin = 0
    while u[kmin] == 0:
        kmin += 1

    pc_ = np.zeros(n + 1, dtype=np.int64)
    pb_ = np.zeros(n + 1, dtype=np.float64)
    cdef long long[::1] pc = pc_
    cdef double[::1] pb = pb_
    for k in range(n):
        pc[k + 1] = pc[k] + u[k]
        pb[k + 1] = pb[k] + u[k] * r[k]

    gcost_ = np.zeros((n, B + 1), dtype=np.float64)
    gcodes_ = np.zeros((n, B + 1), dtype=np.int64)
    gnext_ = np.full((n, B + 1), -1, dtype=np.int64)
    seg_ = np.zeros(n, dtype=np.float64)
    cdef double[:, ::1] gcost = gcost_
    cdef long long[:, ::1] gcodes = gcodes_
    cdef long long[:, ::1] gnext = gnext_
    cdef double[::1] seg = seg_

    cdef double rj, tail, best_cost, cost
    cdef long long best_codes, codes2, cm
    cdef Py_ssize_t best_next

    for j in range(n - 1, -1, -1):
        rj = r[j]
        tail = (pb[n] - pb[j]) - rj * (pc[n] - pc[j])
        for m in range(j + 1, n):
            seg[m] = (pb[m] - pb[j]) - rj * (pc[m] - pc[j])
        for rem in range(B + 1):
            best_cost = tail
            best_codes = 0
            best_next = -1
            # descending m: at equal cost and codes the higher next level is
            # the lexicographically smaller vector, and stopping beats both
            for m in range(n - 1, j, -1):
                cm = c[m]
                if cm <= rem:
                    rem2 = rem - cm
                    cost = seg[m] + gcost[m, rem2]
                    codes2 = cm + gcodes[m, rem2]
                    if cost < best_cost or (cost == best_cost and codes2 < best_codes):
                        best_cost = cost
                        best_codes = codes2
                        best_next = m
            gcost[j, rem] = best_cost
            gcodes[j, rem] = best_codes
            gnext[j, rem] = best_next

    cdef bint found = False
    cdef double top_cost = INFINITY
    cdef long long top_codes = 0
    cdef Py_ssize_t top_j = -1
    for j in range(kmin, -1, -1):
        if c[j] <= B:
            rem = B - c[j]
            cost = gcost[j, rem]
            codes2 = c[j] + gcodes[j, rem]
            if (not found) or cost < top_cost or (cost == top_cost and codes2 < top_codes):
                found = True
                top_cost = cost
                top_codes = codes2
                top_j = j
    if not found:
        return None

    mask = bytearray(n)
    j = top_j
    rem = B - c[j]
    mask[j] = 1
    cdef long long nj
    while True:
        nj = gnext[j, rem]
        if nj < 0:
            break
        rem -= c[nj]
        mask[nj] = 1
        j = <Py_ssize_t> nj
    return float(top_cost), int(top_codes), bytes(mask)


def solve_bruteforce(rates, codes, counts, budget):
    """Exhaustive search over all 2^n activations; the verification oracle."""
    r_, c_, u_ = _coerce(rates, codes, counts)
    cdef Py_ssize_t n = r_.size
    if n > BRUTE_FORCE_MAX_LEVELS:
        raise ValueError(
            f"exhaustive search refused for {n} levels (limit {BRUTE_FORCE_MAX_LEVELS})"
        )
    cdef long long B = int(budget)
    cdef const double[::1] r = r_
    cdef const long long[::1] c = c_
    cdef const long long[::1] u = u_

    cdef unsigned long long mask, best_mask = 0
    cdef unsigned long long total_masks = (<unsigned long long> 1) << n
    cdef bint found = False
    cdef double best_total = INFINITY
    cdef long long best_used = 0
    cdef unsigned long long best_lex = 0
    cdef double total, cur
    cdef long long used, lexshift
    cdef unsigned long long lex
    cdef Py_ssize_t k
    cdef bint have, bad

    for mask in range(total_masks):
        used = 0
        total = 0.0
        lex = 0
        cur = 0.0
        have = False
        bad = False
        for k in range(n):
            if (mask >> k) & 1:
                used += c[k]
                if used > B:
                    bad = True
                    break
                if not have or r[k] > cur:
                    cur = r[k]
                have = True
                lex |= (<unsigned long long> 1) << (n - 1 - k)
            if u[k]:
                if not have:
                    bad = True
                    break
                total += u[k] * (r[k] - cur)
        if bad:
            continue
        if (
            (not found)
            or total < best_total
            or (total == best_total and (used < best_used
                or (used == best_used and lex < best_lex)))
        ):
            found = True
            best_total = total
            best_used = used
            best_lex = lex
            best_mask = mask
    if not found:
        return None
    out = bytearray(n)
    for k in range(n):
        out[k] = (best_mask >> k) & 1
    return float(best_total), int(best_used), bytes(out)
