"""Selects the subset-DP backend: compiled kernel when safe, pure otherwise.

Set ``WSRPT_PURE=1`` to force the pure-Python implementation.  The kernel
runs on int64, so calls whose scaled cost bound could overflow are routed to
the pure backend, which uses unbounded ints.
"""

from __future__ import annotations

import os

from . import _purepy

_INT64_SAFE = 2**62


def _load_kernel():
    if os.environ.get("WSRPT_PURE") == "1":
        return None
    try:
        from . import _kernel  # compiled extension; optional

        return _kernel
    except ImportError:
        return None


_KERNEL = _load_kernel()


def backend_name() -> str:
    """Which subset-DP implementation import-time selection produced."""
    return "kernel" if _KERNEL is not None else "pure"


def subset_dp(
    releases: list[int], procs: list[int], weights: list[int], n: int
) -> tuple[int, tuple[int, ...]]:
    """Integer-scaled subset DP; see ``_purepy.subset_dp`` for the contract."""
    if _KERNEL is not None and n <= 20:
        horizon = max(releases) + sum(procs)
        bound = horizon * sum(weights)
        if 0 <= bound < _INT64_SAFE:
            return _KERNEL.subset_dp(list(releases), list(procs), list(weights), n)
    return _purepy.subset_dp(releases, procs, weights, n)
