"""Timing comparison of the pure-Python and compiled planning kernels.

Generates random planning instances once, then times the exact optimizer and
the exhaustive search on each available backend and prints per-call medians
and the resulting speedup.
"""

import argparse
import statistics
import time

import numpy as np

from hsmcast.cqi import load_table
from hsmcast._kernels import pure

try:
    from hsmcast._kernels import _fast
except ImportError:
    _fast = None


def make_instances(rng, table, count, n_levels, max_users, budget_max):
    rates = table.rates[:n_levels]
    codes = table.codes[:n_levels]
    out = []
    for _ in range(count):
        users = int(rng.integers(1, max_users + 1))
        levels = rng.integers(0, n_levels, size=users)
        counts = np.bincount(levels, minlength=n_levels).astype(np.int64)
        budget = int(rng.integers(1, budget_max + 1))
        out.append((rates, codes, counts, budget))
    return out


def time_solver(solver, instances, repeats):
    best = []
    for _ in range(repeats):
        start = time.perf_counter()
        for rates, codes, counts, budget in instances:
            solver(rates, codes, counts, budget)
        best.append((time.perf_counter() - start) / len(instances))
    return statistics.median(best)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--instances", type=int, default=200)
    parser.add_argument("--levels", type=int, default=12,
                        help="table prefix length (exhaustive search is 2^levels)")
    parser.add_argument("--users", type=int, default=200)
    parser.add_argument("--budget", type=int, default=15)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    table = load_table()
    rng = np.random.default_rng(args.seed)
    instances = make_instances(rng, table, args.instances, args.levels,
                               args.users, args.budget)

    backends = [("pure", pure)]
    if _fast is not None:
        backends.append(("compiled", _fast))
    else:
        print("compiled backend not built; timing the fallback only")

    results = {}
    for name, mod in backends:
        for label, solver in (("optimizer", mod.solve_dp),
                              ("exhaustive", mod.solve_bruteforce)):
            per_call = time_solver(solver, instances, args.repeats)
            results[name, label] = per_call
            print(f"{name:>8} {label:<10} {per_call * 1e6:10.1f} us/instance")

    if _fast is not None:
        for label in ("optimizer", "exhaustive"):
            ratio = results["pure", label] / results["compiled", label]
            print(f"speedup {label}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
