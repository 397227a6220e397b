"""Planning kernels with a compiled fast path.

The compiled extension is optional; when it is missing (or when
HSMCAST_PURE_KERNELS is set to a non-empty value) the pure-Python
implementations are used. Both backends share one contract, down to
tie-breaking, and the test suite runs them against each other.
"""

import os

from . import pure

if os.environ.get("HSMCAST_PURE_KERNELS"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND_NAME
BRUTE_FORCE_MAX_LEVELS = pure.BRUTE_FORCE_MAX_LEVELS

evaluate_mask = _impl.evaluate_mask
solve_dp = _impl.solve_dp
solve_bruteforce = _impl.solve_bruteforce

__all__ = [
    "BACKEND",
    "BRUTE_FORCE_MAX_LEVELS",
    "evaluate_mask",
    "solve_bruteforce",
    "solve_dp",
    "pure",
]
