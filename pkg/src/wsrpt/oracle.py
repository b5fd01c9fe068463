"""Exact optima for preemptive total weighted completion time.

Two independent routes to the optimum — a completion-order subset DP and a
slot-level time-indexed DP — deliberately kept separate so each can check
the other, plus the priority-list scheduler both build on, the
ratio-ordered schedule that realizes the optimum on generated equality
instances, and the closed form for two long jobs plus one homogeneous
burst.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import _backend
from .core import (
    Instance,
    Schedule,
    Slice,
    merge_slices,
    objective,
    to_rational,
)
from .simulator import BudgetExceeded

#: State cap for the time-indexed DP.
DEFAULT_STATE_BUDGET = 2_000_000

#: Hard job-count cap for the subset DP (2^n table).
MAX_BRUTEFORCE_JOBS = 16


@dataclass(frozen=True)
class OptimalResult:
    """An optimal (or structurally optimal) schedule with its objective."""

    schedule: Schedule
    objective: Fraction
    method: str

    def __post_init__(self):
        if self.method not in ("brute-force", "dp-timeindexed", "structured"):
            raise ValueError(f"unknown method tag: {self.method!r}")


def priority_schedule(instance: Instance, order) -> Schedule:
    """Preemptively run, at every instant, the earliest listed released job.

    ``order`` is a permutation of job ids, highest priority first.  The job
    at position k completes exactly when the total released work of the
    first k jobs runs out, which is what makes completion-order priority
    lists express every candidate optimum.
    """
    order = tuple(order)
    ids = sorted(j.id for j in instance.jobs)
    if sorted(order) != ids:
        raise ValueError("order must be a permutation of the instance's job ids")
    pos = {jid: k for k, jid in enumerate(order)}

    jobs = {j.id: j for j in instance.jobs}
    remaining = {j.id: j.processing for j in instance.jobs}
    releases = sorted(
        (t, sorted(g))
        for t, g in _group_by_release(instance).items()
    )
    heap: list[tuple[int, int]] = []
    raw: list[Slice] = []
    idx = 0
    now = releases[0][0]
    done = 0
    while done < len(ids):
        while idx < len(releases) and releases[idx][0] <= now:
            for jid in releases[idx][1]:
                heapq.heappush(heap, (pos[jid], jid))
            idx += 1
        if not heap:
            now = releases[idx][0]
            continue
        jid = heap[0][1]
        finish = now + remaining[jid]
        end = min(finish, releases[idx][0]) if idx < len(releases) else finish
        raw.append(Slice(jid, now, end))
        remaining[jid] -= end - now
        if remaining[jid] == 0:
            heapq.heappop(heap)
            done += 1
        now = end
    return Schedule(merge_slices(raw))


def _group_by_release(instance: Instance) -> dict[Fraction, list[int]]:
    groups: dict[Fraction, list[int]] = {}
    for j in instance.jobs:
        groups.setdefault(j.release, []).append(j.id)
    return groups


def _integer_scaled(instance: Instance):
    """Clear denominators: (releases, procs, weights as ints, scales)."""
    jobs = instance.jobs
    den_t = lcm(*(x.denominator for j in jobs for x in (j.release, j.processing)))
    den_w = lcm(*(j.weight.denominator for j in jobs))
    releases = [int(j.release * den_t) for j in jobs]
    procs = [int(j.processing * den_t) for j in jobs]
    weights = [int(j.weight * den_w) for j in jobs]
    return releases, procs, weights, den_t, den_w


def optimal_bruteforce(instance: Instance, max_n: int = 10) -> OptimalResult:
    """Exact preemptive optimum via the completion-order subset DP.

    Minimizes over all completion orders (equivalently, all n! priority
    lists) and returns the realizing priority schedule.  ``max_n`` guards
    runaway table sizes; the absolute cap is MAX_BRUTEFORCE_JOBS.
    """
    n = len(instance.jobs)
    if n > min(max_n, MAX_BRUTEFORCE_JOBS):
        raise ValueError(
            f"instance has {n} jobs; exact search is capped at "
            f"{min(max_n, MAX_BRUTEFORCE_JOBS)}"
        )
    releases, procs, weights, den_t, den_w = _integer_scaled(instance)
    cost, order_idx = _backend.subset_dp(releases, procs, weights, n)
    obj = Fraction(cost, den_t * den_w)
    order = tuple(instance.jobs[i].id for i in order_idx)
    return OptimalResult(priority_schedule(instance, order), obj, "brute-force")


def optimal_dp_timeindexed(
    instance: Instance,
    grid: Fraction | None = None,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> OptimalResult:
    """Exact preemptive optimum by slot-level dynamic programming.

    ``grid`` is the time step; every release and processing time must be a
    whole number of steps (omit it to use the finest grid the instance's
    denominators generate).  Some optimum preempts only at grid points, so
    the state (slot, per-job remaining slots) is complete; transitions run
    one available job for one slot, jobs identical in parameters and
    remaining work branch once, and a lone available job fast-forwards to
    its next event.  Exceeding ``state_budget`` distinct states raises
    BudgetExceeded.
    """
    jobs = instance.jobs
    n = len(jobs)
    if grid is None:
        den = lcm(*(x.denominator for j in jobs for x in (j.release, j.processing)))
        grid = Fraction(1, den)
    else:
        grid = to_rational(grid)
        if grid <= 0:
            raise ValueError("grid must be positive")
    releases = []
    procs = []
    for j in jobs:
        for datum, out in ((j.release, releases), (j.processing, procs)):
            scaled = datum / grid
            if scaled.denominator != 1:
                raise ValueError(
                    f"job {j.id}: {datum} is not a multiple of grid {grid}"
                )
            out.append(int(scaled))
    if sum(procs) > state_budget:
        raise BudgetExceeded(
            f"total work spans {sum(procs)} slots; budget is {state_budget}"
        )
    den_w = lcm(*(j.weight.denominator for j in jobs))
    weights = [int(j.weight * den_w) for j in jobs]
    klass = {i: (releases[i], procs[i], weights[i]) for i in range(n)}

    # action: ("idle", next_t) | ("run", i, slots) — "run" also covers the
    # single-slot branching case with slots=1.
    memo: dict[tuple[int, tuple[int, ...]], tuple[int, tuple]] = {}

    def solve(t: int, rem: tuple[int, ...]) -> int:
        if all(x == 0 for x in rem):
            return 0
        state = (t, rem)
        hit = memo.get(state)
        if hit is not None:
            return hit[0]
        if len(memo) >= state_budget:
            raise BudgetExceeded(
                f"time-indexed DP exceeded {state_budget} states"
            )

        available = [i for i in range(n) if rem[i] > 0 and releases[i] <= t]
        if not available:
            nxt = min(releases[i] for i in range(n) if rem[i] > 0)
            best, action = solve(nxt, rem), ("idle", nxt)
        elif len(available) == 1:
            i = available[0]
            upcoming = [releases[k] for k in range(n) if rem[k] > 0 and releases[k] > t]
            horizon = min(upcoming) if upcoming else t + rem[i]
            run = min(rem[i], horizon - t)
            rem2 = rem[:i] + (rem[i] - run,) + rem[i + 1 :]
            gained = weights[i] * (t + run) if rem2[i] == 0 else 0
            best, action = gained + solve(t + run, rem2), ("run", i, run)
        else:
            seen_classes = set()
            best, action = -1, ()
            for i in available:
                c = klass[i] + (rem[i],)
                if c in seen_classes:
                    continue
                seen_classes.add(c)
                rem2 = rem[:i] + (rem[i] - 1,) + rem[i + 1 :]
                gained = weights[i] * (t + 1) if rem2[i] == 0 else 0
                cand = gained + solve(t + 1, rem2)
                if best < 0 or cand < best:
                    best, action = cand, ("run", i, 1)
        memo[state] = (best, action)
        return best

    start = min(releases)
    cost = solve(start, tuple(procs))

    raw: list[Slice] = []
    t, rem = start, tuple(procs)
    while not all(x == 0 for x in rem):
        action = memo[(t, rem)][1]
        if action[0] == "idle":
            t = action[1]
        else:
            _, i, run = action
            raw.append(Slice(jobs[i].id, t * grid, (t + run) * grid))
            rem = rem[:i] + (rem[i] - run,) + rem[i + 1 :]
            t += run
    schedule = Schedule(merge_slices(raw))
    return OptimalResult(schedule, Fraction(cost, den_w) * grid, "dp-timeindexed")


def structured_optimal(instance: Instance) -> OptimalResult:
    """Optimal schedule of a generated instance by its intended structure.

    Priority order: descending static ratio (w/p), shorter first among
    ties, so small jobs complete at their release while they outrank the
    long job, later arrivals preempt earlier backlog, the ties left over
    are exchange-neutral, and each long job runs unpreempted at the end of
    its scope.  Only instances carrying a generator family tag are
    accepted; the order is not optimal for arbitrary instances.
    """
    if instance.tags.get("family") not in ("basic", "nested"):
        raise ValueError("instance was not produced by a generator (no family tag)")
    order = [
        j.id
        for j in sorted(
            instance.jobs,
            key=lambda j: (-j.ratio, j.processing, j.release, j.id),
        )
    ]
    schedule = priority_schedule(instance, order)
    return OptimalResult(schedule, objective(schedule, instance), "structured")


def closed_pair_optimal(
    p1,
    p2,
    small_release,
    small_ratio,
    small_total,
    pieces: int | None = None,
) -> Fraction:
    """Optimal objective for two long jobs (p = w, released at 0) plus one
    burst of ratio-``small_ratio`` jobs of total length ``small_total``
    released together at ``small_release``.

    Exact minimum of the two candidate completion orders (first long job
    first vs second first); the burst outranks whichever long job is still
    running when it arrives, so it runs at its release in the first order
    and right after the second long job in the other, and which order wins
    flips once the release passes (p1+p2)/2.  ``pieces`` gives the burst's
    job count for an exact finite sum; omitted, the continuum limit
    (midpoint l/2) is used.
    """
    p1, p2 = to_rational(p1), to_rational(p2)
    t_r, rho, l = (
        to_rational(small_release),
        to_rational(small_ratio),
        to_rational(small_total),
    )
    if not 0 < p1 < p2:
        raise ValueError("need 0 < p1 < p2")
    if not p1 <= t_r <= p2:
        raise ValueError("burst release must lie in [p1, p2]")
    if l < 0:
        raise ValueError("small_total must be nonnegative")
    if pieces is not None and (pieces < 1 or l == 0):
        raise ValueError("pieces requires a positive piece count and a nonzero burst")
    mid = Fraction(l, 2) if pieces is None else (l + Fraction(l, pieces)) / 2
    j1_first = p1 * p1 + rho * l * (t_r + mid) + p2 * (p1 + p2 + l)
    j2_first = p2 * p2 + rho * l * (p2 + mid) + p1 * (p2 + l + p1)
    return min(j1_first, j2_first)


def optimal_objective(instance: Instance, max_n: int = MAX_BRUTEFORCE_JOBS) -> Fraction:
    """Convenience wrapper: the subset-DP optimum's objective value."""
    return optimal_bruteforce(instance, max_n=max_n).objective


__all__ = [
    "OptimalResult",
    "priority_schedule",
    "optimal_bruteforce",
    "optimal_dp_timeindexed",
    "structured_optimal",
    "closed_pair_optimal",
    "optimal_objective",
    "objective",
    "BudgetExceeded",
]
