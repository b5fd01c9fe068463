"""Event-driven preemptive single-machine simulation with explicit tie-breaking.

Decision points occur only at job releases and completions: between events
the running job's priority can only improve relative to the waiting jobs
under every supported policy, so no preemption can trigger mid-slice.
Equality instances make *every* release a tie, which is why selection works
on exact rationals and ties are resolved by an explicit rule or script.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .core import (
    Instance,
    Job,
    Schedule,
    Slice,
    merge_slices,
    smith_ratio,
    to_rational,
)


class Policy(Enum):
    WSRPT = "wsrpt"
    WSPT_PREEMPTIVE = "wspt"
    SRPT = "srpt"


class TieRule(Enum):
    PREFER_RUNNING = "prefer-running"
    PREFER_NEW_LONGEST = "prefer-new-longest"
    PREFER_NEW_SHORTEST = "prefer-new-shortest"
    SCRIPTED = "scripted"
    EXHAUSTIVE_WORST = "exhaustive-worst"


#: Upper bound on tie-branch explorations for EXHAUSTIVE_WORST.
DEFAULT_BRANCH_BUDGET = 2**20


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive search outgrows its configured budget."""


def policy_key(policy: Policy, job: Job, remaining: Fraction) -> Fraction:
    """Priority key (larger runs) of a job with the given remaining work."""
    if policy is Policy.WSRPT:
        return job.weight / remaining
    if policy is Policy.WSPT_PREEMPTIVE:
        return job.weight / job.processing
    if policy is Policy.SRPT:
        return Fraction(1) / remaining
    raise ValueError(f"unknown policy {policy!r}")


def _release_groups(instance: Instance) -> list[tuple[Fraction, list[int]]]:
    groups: dict[Fraction, list[int]] = {}
    for j in instance.jobs:
        groups.setdefault(j.release, []).append(j.id)
    return sorted((t, sorted(ids)) for t, ids in groups.items())


def simulate(
    instance: Instance,
    policy: Policy = Policy.WSRPT,
    tie: TieRule = TieRule.PREFER_RUNNING,
    script: tuple[tuple[Fraction, int], ...] | None = None,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
) -> Schedule:
    """Run the policy over the instance and return the resulting schedule.

    ``tie`` picks among the jobs sharing the maximal policy key at a
    decision point.  SCRIPTED looks the event time up in ``script`` (or the
    instance's own tie_script); times without an entry fall back to the
    PREFER_RUNNING chain.  EXHAUSTIVE_WORST explores every tie branch and
    returns the worst (maximal-objective) schedule, breaking objective ties
    toward the lexicographically smallest slice list.
    """
    if tie is TieRule.EXHAUSTIVE_WORST:
        _, slices = _exhaustive_worst(instance, policy, branch_budget)
        return Schedule(slices)

    script_map: dict[Fraction, int] = {}
    if tie is TieRule.SCRIPTED:
        entries = script if script is not None else instance.tie_script
        if entries is None:
            raise ValueError("SCRIPTED tie rule needs a script")
        for t, choice in entries:
            script_map[to_rational(t)] = choice

    jobs = {j.id: j for j in instance.jobs}
    remaining = {j.id: j.processing for j in instance.jobs}
    releases = _release_groups(instance)
    n = len(jobs)

    # Lazy max-heap: entries (negated key, id, version).  Only the running
    # job's key can change between events, so entries go stale only when we
    # re-push that one job with a bumped version.
    heap: list[tuple[Fraction, int, int]] = []
    version: dict[int, int] = {}
    completed: set[int] = set()

    def push(jid: int) -> None:
        version[jid] = version.get(jid, 0) + 1
        key = policy_key(policy, jobs[jid], remaining[jid])
        heapq.heappush(heap, (-key, jid, version[jid]))

    def top() -> tuple[Fraction, int] | None:
        while heap:
            neg_key, jid, ver = heap[0]
            if jid in completed or version.get(jid) != ver:
                heapq.heappop(heap)
                continue
            return -neg_key, jid
        return None

    raw: list[Slice] = []
    idx = 0
    now = releases[0][0]
    running: int | None = None

    while len(completed) < n:
        new_ids: list[int] = []
        while idx < len(releases) and releases[idx][0] <= now:
            t, ids = releases[idx]
            for jid in ids:
                push(jid)
            if t == now:
                new_ids.extend(ids)
            idx += 1

        best = top()
        if best is None:
            # Idle: jump to the next release.
            now = releases[idx][0]
            running = None
            continue
        top_key, top_id = best

        chosen = _select(
            policy, tie, script_map, jobs, remaining,
            now, new_ids, running, top_key, top_id,
        )

        finish = now + remaining[chosen]
        end = min(finish, releases[idx][0]) if idx < len(releases) else finish
        raw.append(Slice(chosen, now, end))
        remaining[chosen] -= end - now
        now = end
        if remaining[chosen] == 0:
            completed.add(chosen)
            running = None
        else:
            running = chosen
            push(chosen)  # refresh the executed job's key

    return Schedule(merge_slices(raw))


def _select(policy, tie, script_map, jobs, remaining, now, new_ids, running,
            top_key, top_id) -> int:
    """Resolve one decision point; returns the job id to run."""

    def key_of(jid: int) -> Fraction:
        return policy_key(policy, jobs[jid], remaining[jid])

    if tie is TieRule.SCRIPTED and now in script_map:
        choice = script_map[now]
        if (
            choice not in remaining
            or remaining[choice] <= 0
            or jobs[choice].release > now
        ):
            raise ValueError(f"scripted choice {choice} at t={now} is not available")
        if key_of(choice) != top_key:
            raise ValueError(
                f"scripted choice {choice} at t={now} is not among the tied leaders"
            )
        return choice

    if tie in (TieRule.PREFER_NEW_LONGEST, TieRule.PREFER_NEW_SHORTEST):
        tied_new = [jid for jid in new_ids if key_of(jid) == top_key]
        if tied_new:
            longest = tie is TieRule.PREFER_NEW_LONGEST
            tied_new.sort(key=lambda jid: (-remaining[jid] if longest else remaining[jid], jid))
            return tied_new[0]
        # fall through to the running-job preference

    if running is not None and remaining[running] > 0 and key_of(running) == top_key:
        return running
    return top_id


def _exhaustive_worst(instance: Instance, policy: Policy, budget: int):
    """Explore every tie branch; return (objective, slices) of the worst run.

    States are deduplicated on (time, remaining-work vector): the future of
    a simulation depends on nothing else, so each state's worst continuation
    is computed once.
    """
    jobs = {j.id: j for j in instance.jobs}
    ids = sorted(jobs)
    releases = _release_groups(instance)
    memo: dict[tuple, tuple] = {}
    counter = [0]

    def explore(now: Fraction, rem: dict[int, Fraction], idx: int):
        state = (now, idx, tuple(rem[i] for i in ids))
        if state in memo:
            return memo[state]
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded(
                f"exhaustive tie search exceeded {budget} branch explorations"
            )

        available = [i for i in ids if rem[i] > 0 and jobs[i].release <= now]
        if not available:
            if idx >= len(releases):
                return Fraction(0), ()
            nxt = releases[idx][0]
            result = explore(nxt, rem, _advance(releases, idx, nxt))
            memo[state] = result
            return result

        best_key = max(policy_key(policy, jobs[i], rem[i]) for i in available)
        candidates = [
            i for i in available if policy_key(policy, jobs[i], rem[i]) == best_key
        ]

        best: tuple | None = None
        for choice in candidates:
            finish = now + rem[choice]
            nxt_release = releases[idx][0] if idx < len(releases) else None
            end = min(finish, nxt_release) if nxt_release is not None else finish
            rem2 = dict(rem)
            rem2[choice] = rem2[choice] - (end - now)
            gained = jobs[choice].weight * end if rem2[choice] == 0 else Fraction(0)
            idx2 = _advance(releases, idx, end)
            future_obj, future_slices = explore(end, rem2, idx2)
            obj = gained + future_obj
            slices = ((choice, now, end),) + future_slices
            if best is None or obj > best[0] or (obj == best[0] and slices < best[1]):
                best = (obj, slices)
        memo[state] = best
        return best

    def _advance(rel, idx, t):
        while idx < len(rel) and rel[idx][0] <= t:
            idx += 1
        return idx

    start = releases[0][0]
    rem0 = {j.id: j.processing for j in instance.jobs}
    obj, compact = explore(start, rem0, _advance(releases, 0, start))
    slices = merge_slices([Slice(j, s, e) for j, s, e in compact])
    return obj, slices


@dataclass
class EqualityReport:
    """Outcome of the equality-instance check."""

    passed: bool
    violations: list[tuple[Fraction, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def is_equality_instance(
    instance: Instance,
    tie: TieRule | None = None,
    script: tuple[tuple[Fraction, int], ...] | None = None,
) -> EqualityReport:
    """Check that every release ties the running job's current Smith ratio.

    Simulates WSRPT under the given tie rule (default: the instance's own
    script when present, else PREFER_RUNNING) and verifies exactly, at every
    release instant, that all newly submitted jobs share one Smith ratio and
    that it equals the interrupted job's current ratio when one is running.
    """
    if tie is None:
        tie = TieRule.SCRIPTED if instance.tie_script is not None else TieRule.PREFER_RUNNING
    sched = simulate(instance, Policy.WSRPT, tie, script=script)
    jobs = {j.id: j for j in instance.jobs}

    # One forward walk over slices and release instants in parallel; the
    # slice covering (t - eps, t] identifies the interrupted job.
    slices = sched.slices
    executed: dict[int, Fraction] = {}
    k = 0
    violations: list[tuple[Fraction, str]] = []
    for t, ids in _release_groups(instance):
        while k < len(slices) and slices[k].end < t:
            s = slices[k]
            executed[s.job] = executed.get(s.job, Fraction(0)) + s.length
            k += 1
        ratios = {jobs[i].ratio for i in ids}
        if len(ratios) > 1:
            violations.append(
                (t, f"co-released jobs {ids} have distinct ratios")
            )
            continue
        (released_ratio,) = ratios
        if not (k < len(slices) and slices[k].start < t <= slices[k].end):
            continue  # machine idle just before t: co-released check only
        run = slices[k].job
        done = executed.get(run, Fraction(0)) + (t - slices[k].start)
        rem = jobs[run].processing - done
        if rem <= 0:
            continue
        current = smith_ratio(jobs[run], rem)
        if current != released_ratio:
            violations.append(
                (t, f"jobs {ids} (ratio {released_ratio}) vs running job "
                    f"{run} (ratio {current})")
            )
    return EqualityReport(passed=not violations, violations=violations)


@dataclass
class Segment:
    """A nested interval of a WSRPT schedule with no partial execution."""

    start: Fraction
    end: Fraction
    members: tuple[int, ...]
    depth: int = 0
    children: list["Segment"] = field(default_factory=list)


def segments(schedule: Schedule, instance: Instance) -> list[Segment]:
    """Decompose a WSRPT schedule into its nested segment forest.

    A segment opens at a release where some job starts exactly at its
    submission time, together with its co-released equal-ratio jobs; it
    closes at the first later slice of a job with a smaller static ratio or
    with an equal ratio outside the opening set, else at the makespan.
    """
    jobs = {j.id: j for j in instance.jobs}
    first_start: dict[int, Fraction] = {}
    span: dict[int, tuple[Fraction, Fraction]] = {}
    for s in schedule.slices:
        first_start.setdefault(s.job, s.start)
        lo, hi = span.get(s.job, (s.start, s.end))
        span[s.job] = (min(lo, s.start), max(hi, s.end))

    by_release: dict[Fraction, list[Job]] = {}
    for j in instance.jobs:
        by_release.setdefault(j.release, []).append(j)

    openings: dict[Fraction, set[int]] = {}
    for j in instance.jobs:
        if first_start.get(j.id) == j.release:
            openings.setdefault(j.release, set()).update(
                other.id
                for other in by_release[j.release]
                if other.ratio == j.ratio
            )

    makespan = schedule.makespan
    raw: list[Segment] = []
    for t in sorted(openings):
        opening = openings[t]
        seg_ratio = jobs[next(iter(opening))].ratio
        end = makespan
        for s in schedule.slices:
            if s.start <= t:
                continue
            r = jobs[s.job].ratio
            if r < seg_ratio or (r == seg_ratio and s.job not in opening):
                end = s.start
                break
        members = tuple(
            sorted(
                jid
                for jid, (lo, hi) in span.items()
                if t <= lo and hi <= end
            )
        )
        raw.append(Segment(t, end, members))

    # Build the forest: sort by (start asc, end desc) and nest by containment.
    raw.sort(key=lambda seg: (seg.start, -seg.end))
    roots: list[Segment] = []
    stack: list[Segment] = []
    for seg in raw:
        while stack and not (stack[-1].start <= seg.start and seg.end <= stack[-1].end):
            stack.pop()
        if stack:
            seg.depth = stack[-1].depth + 1
            stack[-1].children.append(seg)
        else:
            roots.append(seg)
        stack.append(seg)
    return roots


def split_job(instance: Instance, job_id: int, q: int) -> Instance:
    """Replace one job by q identical fragments (p/q, w/q, same release).

    Ids are reassigned densely in the original job order, fragments taking
    the split job's position.  Tie-script entries are remapped; an entry
    naming the split job now names its first fragment.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if all(j.id != job_id for j in instance.jobs):
        raise KeyError(f"no job with id {job_id}")

    new_jobs: list[Job] = []
    id_map: dict[int, int] = {}
    for j in instance.jobs:
        if j.id == job_id:
            id_map[j.id] = len(new_jobs)
            for _ in range(q):
                new_jobs.append(
                    Job(len(new_jobs), j.release, j.processing / q, j.weight / q)
                )
        else:
            id_map[j.id] = len(new_jobs)
            new_jobs.append(Job(len(new_jobs), j.release, j.processing, j.weight))

    script = None
    if instance.tie_script is not None:
        script = tuple((t, id_map[c]) for t, c in instance.tie_script)
    return Instance(tuple(new_jobs), tie_script=script, tags=dict(instance.tags))
