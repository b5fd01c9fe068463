"""Time the compiled subset-DP kernel against the pure-Python fallback.

Both backends receive identical integer-scaled inputs and must return
identical results; the point of the comparison is the constant factor on
the 2^n-state sweep.  Run as a script:

    python3 benchmarks/bench_backends.py --sizes 12 14 16 --repeats 3
"""

from __future__ import annotations

import argparse
import time
from random import Random

from wsrpt import _purepy

try:
    from wsrpt import _kernel
except ImportError:
    _kernel = None


def _random_inputs(n: int, rng: Random) -> tuple[list[int], list[int], list[int]]:
    releases = [rng.randrange(0, 6 * n) for _ in range(n)]
    procs = [rng.randrange(1, 12) for _ in range(n)]
    weights = [rng.randrange(1, 12) for _ in range(n)]
    return releases, procs, weights


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[12, 14, 16, 18])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if _kernel is None:
        print("compiled kernel not importable; timing the pure backend only")
    rng = Random(args.seed)
    print(f"{'n':>4} {'pure (s)':>10} {'kernel (s)':>11} {'speedup':>8}")
    for n in args.sizes:
        inputs = _random_inputs(n, rng)
        call = (*inputs, n)
        pure_t = _time(_purepy.subset_dp, call, args.repeats)
        if _kernel is None:
            print(f"{n:>4} {pure_t:>10.4f} {'-':>11} {'-':>8}")
            continue
        kernel_t = _time(_kernel.subset_dp, (list(call[0]), list(call[1]), list(call[2]), n), args.repeats)
        pure_res = _purepy.subset_dp(*call)
        kernel_res = _kernel.subset_dp(list(call[0]), list(call[1]), list(call[2]), n)
        if pure_res != kernel_res:
            raise AssertionError(f"backends disagree at n={n}")
        print(f"{n:>4} {pure_t:>10.4f} {kernel_t:>11.4f} {pure_t / kernel_t:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
