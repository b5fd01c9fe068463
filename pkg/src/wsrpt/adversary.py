"""Two-long-job adversary game against pluggable online policies.

The adversary releases two proportionate jobs (p = w) at time zero, watches
how the policy splits the machine between them, and answers with one burst
of identical high-ratio small jobs sized and timed by which branch of the
game the observed remainders select.  All checkpoint bookkeeping is exact
rational arithmetic on the simulated schedule; only the burst-length search
for the intermediate branches is float numerics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Union

from scipy.optimize import minimize_scalar

from .core import (
    Instance,
    Job,
    Schedule,
    Slice,
    merge_slices,
    objective,
    rational_str,
    to_rational,
)
from .instances import instance_to_dict
from .oracle import closed_pair_optimal
from .simulator import Policy, TieRule, simulate

#: Branch names, in the order the game tests them.
BRANCH_FIRST_UNTOUCHED = "first-untouched"  # second job ran the whole prefix
BRANCH_SECOND_AHEAD = "second-ahead"  # second job's ratio leads at p1
BRANCH_EQUALIZED = "equalized"  # ratios meet at some t_s in (p1, p2]
BRANCH_TERMINAL = "terminal"  # no equalization by p2

#: Named policies beyond the simulator's enum.
EXTRA_POLICIES = ("j2-first", "equalizer")

PolicyLike = Union[Policy, str]


@dataclass(frozen=True)
class AdversaryState:
    """Everything the adversary observed and decided in one game.

    ``checkpoints`` holds (time, first remainder, second remainder) at each
    inspection time — p1 always, plus t_s or p2 when a later branch fires.
    ``l1`` and ``l2`` are the closed-form burst lengths of the two outer
    branches, recorded for reference whichever branch ran.
    """

    p1: Fraction
    p2: Fraction
    checkpoints: tuple[tuple[Fraction, Fraction, Fraction], ...]
    t_s: Fraction | None
    branch: str
    block_release: Fraction
    block_ratio: Fraction
    block_length: Fraction | None
    l1: float
    l2: float

    def remainders_at(self, t: Fraction) -> tuple[Fraction, Fraction]:
        for time, rem1, rem2 in self.checkpoints:
            if time == t:
                return rem1, rem2
        raise KeyError(f"no checkpoint at t={t}")


@dataclass(frozen=True)
class AdversaryTranscript:
    """Outcome of one adversary game: instance, schedules, certified ratio."""

    instance: Instance
    schedule: Schedule
    online_objective: Fraction
    optimal_objective: Fraction
    ratio: Fraction
    branch: str
    state: AdversaryState

    def __post_init__(self):
        if self.ratio < 1:
            raise ValueError("adversary game produced a ratio below 1")


def _l1_closed(p1: float, p2: float) -> float:
    return math.sqrt(2 * (p2**3 - p1**3) / p2)


def choose_l(branch_state: AdversaryState) -> float:
    """Burst length maximizing the ratio the branch certifies.

    The two outer branches have closed forms: both their online/optimal
    quotients share the constant K = p1² + p1·p2 + p2² and the quadratic
    coefficient ρ/2, so the maximizer is √(2K/ρ) — which is l1 when the
    second job ran the whole prefix and l1/√(p2−p1) in the terminal branch.
    Intermediate branches maximize the certified ratio numerically over
    (0, 4·p2] to 1e-6: the certified online value is the cheapest
    continuation the policy could still play (the burst and job remainders
    commute freely only when their ratios tie, so all six orders are
    evaluated), the optimal value is the pair closed form.
    """
    p1, p2 = float(branch_state.p1), float(branch_state.p2)
    rho = float(branch_state.block_ratio)
    if branch_state.branch in (BRANCH_FIRST_UNTOUCHED, BRANCH_TERMINAL):
        k = p1 * p1 + p1 * p2 + p2 * p2
        return math.sqrt(2 * k / rho)

    t_r = float(branch_state.block_release)
    rem1, rem2 = (
        float(x) for x in branch_state.remainders_at(branch_state.block_release)
    )

    def online_floor(l: float) -> float:
        chunks = ((rem1, p1, False), (rem2, p2, False), (l, rho * l, True))
        best = None
        for a in range(3):
            for b in range(3):
                if b == a:
                    continue
                c = 3 - a - b
                t, total = t_r, 0.0
                for p, w, is_burst in (chunks[a], chunks[b], chunks[c]):
                    if is_burst:
                        total += rho * p * (t + p / 2)
                    else:
                        total += w * (t + p)
                    t += p
                if best is None or total < best:
                    best = total
        return best

    def certified(l: float) -> float:
        j1_first = p1 * p1 + rho * l * (t_r + l / 2) + p2 * (p1 + p2 + l)
        j2_first = p2 * p2 + rho * l * (p2 + l / 2) + p1 * (p2 + l + p1)
        return online_floor(l) / min(j1_first, j2_first)

    res = minimize_scalar(
        lambda l: -certified(l),
        bounds=(1e-9, 4 * p2),
        method="bounded",
        options={"xatol": 1e-6},
    )
    return float(res.x)


def _run_policy(policy: PolicyLike, tie: TieRule, instance: Instance) -> Schedule:
    """Simulate the named policy and validate the schedule it emits."""
    if isinstance(policy, str) and policy not in EXTRA_POLICIES:
        try:
            policy = Policy(policy)
        except ValueError:
            raise ValueError(
                f"unknown policy {policy!r}; expected a Policy, "
                f"{', '.join(repr(p.value) for p in Policy)}, "
                f"or one of {EXTRA_POLICIES}"
            ) from None
    if isinstance(policy, Policy):
        schedule = simulate(instance, policy=policy, tie=tie)
    elif policy == "j2-first":
        schedule = _j2_first_schedule(instance)
    else:
        schedule = _equalizer_schedule(instance)
    schedule.validate(instance)
    return schedule


def _j2_first_schedule(instance: Instance) -> Schedule:
    """Run the second long job whenever it is alive, then highest ratio.

    On game instances the burst outranks the untouched first job at every
    instant, so these choices are realized exactly by a static priority
    list: job 1, then the burst in id order, then job 0.
    """
    others = sorted(
        (j.id for j in instance.jobs if j.id not in (0, 1)),
    )
    return _priority(instance, [1, *others, 0])


def _priority(instance: Instance, order: list[int]) -> Schedule:
    from .oracle import priority_schedule

    return priority_schedule(instance, order)


def _equalizer_schedule(instance: Instance) -> Schedule:
    """Keep both long jobs' ratios equal, then play out ties nonpreemptively.

    Rotates in exact cycles of p1/50, splitting each cycle between the long
    jobs in proportion p1 : p2 so that at every cycle boundary the executed
    work — and hence the weight-over-remaining ratio — stays proportionate.
    At the first release after zero it stops rotating and finishes the
    remaining jobs nonpreemptively in decreasing current-ratio order
    (running job first among ties, then lower id).
    """
    p1job, p2job = instance.job(0), instance.job(1)
    p1, p2 = p1job.processing, p2job.processing
    later = sorted({j.release for j in instance.jobs if j.release > 0})
    t_switch = later[0] if later else None

    cycle = p1 / 50
    shares = {0: cycle * p1 / (p1 + p2), 1: cycle * p2 / (p1 + p2)}
    rem = {j.id: j.processing for j in instance.jobs}
    raw: list[Slice] = []
    now = Fraction(0)
    running = None
    while rem[0] > 0 or rem[1] > 0:
        if t_switch is not None and now >= t_switch:
            break
        progressed = False
        for jid in (0, 1):
            if rem[jid] == 0:
                continue
            d = min(shares[jid], rem[jid])
            if t_switch is not None:
                d = min(d, t_switch - now)
            if d <= 0:
                continue
            raw.append(Slice(jid, now, now + d))
            rem[jid] -= d
            now += d
            running = jid
            progressed = True
        if not progressed:
            break

    alive = [j for j in instance.jobs if rem[j.id] > 0]
    alive.sort(
        key=lambda j: (
            -Fraction(j.weight, rem[j.id]),
            j.id != running,
            j.id,
        )
    )
    for j in alive:
        start = max(now, j.release)
        raw.append(Slice(j.id, start, start + rem[j.id]))
        now = start + rem[j.id]
    return Schedule(merge_slices(raw))


def play(
    policy: PolicyLike,
    tie: TieRule = TieRule.PREFER_RUNNING,
    delta=None,
    p1=1,
    p2="2.3364",
) -> AdversaryTranscript:
    """Play the two-job game against ``policy`` and certify the ratio.

    Releases the two long jobs, probes the policy's schedule, and branches
    on the exact remainders: second job ran the whole prefix → burst at p1
    with ratio p2/(p2−p1) and closed-form length; second job's ratio leads
    at p1 → burst at p1 with ratio p2/p2(p1); otherwise wait for the first
    exact equalization time t_s ≤ p2 (piecewise-linear remainders give an
    exact rational root inside a slice) and burst there; no equalization →
    burst at p2.  A completed job counts as infinite ratio.  The burst is
    discretized into pieces of length ``delta`` (default p1/1000) whose
    weights realize the branch ratio exactly; the transcript's optimal side
    is the exact discrete pair closed form.
    """
    p1 = to_rational(p1)
    p2 = to_rational(p2)
    if not 0 < p1 < p2:
        raise ValueError("need 0 < p1 < p2")
    delta = p1 / 1000 if delta is None else to_rational(delta)
    if not 0 < delta <= p1:
        raise ValueError("delta must lie in (0, p1]")

    probe = Instance(
        (Job(0, 0, p1, p1), Job(1, 0, p2, p2)),
        tags={"kind": "adversary-probe"},
    )
    probe_schedule = _run_policy(policy, tie, probe)

    rem1_p1 = p1 - probe_schedule.executed(0, p1)
    rem2_p1 = p2 - probe_schedule.executed(1, p1)
    checkpoints = [(p1, rem1_p1, rem2_p1)]
    t_s: Fraction | None = None

    if rem2_p1 == p2 - p1:
        branch, t_r, rho = BRANCH_FIRST_UNTOUCHED, p1, Fraction(p2, rem2_p1)
    elif rem1_p1 > 0 and p2 * rem1_p1 >= p1 * rem2_p1:
        branch, t_r, rho = BRANCH_SECOND_AHEAD, p1, Fraction(p2, rem2_p1)
    else:
        t_s = _equalization_time(probe_schedule, p1, p2)
        if t_s is not None:
            rem1_ts = p1 - probe_schedule.executed(0, t_s)
            rem2_ts = p2 - probe_schedule.executed(1, t_s)
            checkpoints.append((t_s, rem1_ts, rem2_ts))
            branch, t_r, rho = BRANCH_EQUALIZED, t_s, Fraction(p2, rem2_ts)
        else:
            rem1_p2 = p1 - probe_schedule.executed(0, p2)
            rem2_p2 = p2 - probe_schedule.executed(1, p2)
            checkpoints.append((p2, rem1_p2, rem2_p2))
            branch, t_r, rho = BRANCH_TERMINAL, p2, Fraction(p2, rem2_p2)

    l1 = _l1_closed(float(p1), float(p2))
    state = AdversaryState(
        p1=p1,
        p2=p2,
        checkpoints=tuple(checkpoints),
        t_s=t_s,
        branch=branch,
        block_release=t_r,
        block_ratio=rho,
        block_length=None,
        l1=l1,
        l2=l1 / math.sqrt(float(p2 - p1)),
    )
    length = choose_l(state)

    pieces = max(1, round(length / float(delta)))
    block_length = pieces * delta
    state = replace(state, block_length=block_length)

    jobs = [Job(0, 0, p1, p1), Job(1, 0, p2, p2)]
    jobs.extend(
        Job(2 + i, t_r, delta, rho * delta) for i in range(pieces)
    )
    instance = Instance(
        tuple(jobs),
        tags={
            "kind": "adversary",
            "branch": branch,
            "p1": rational_str(p1),
            "p2": rational_str(p2),
            "delta": rational_str(delta),
        },
    )
    schedule = _run_policy(policy, tie, instance)
    online = objective(schedule, instance)
    optimal = closed_pair_optimal(p1, p2, t_r, rho, block_length, pieces=pieces)
    return AdversaryTranscript(
        instance=instance,
        schedule=schedule,
        online_objective=online,
        optimal_objective=optimal,
        ratio=Fraction(online, optimal),
        branch=branch,
        state=state,
    )


def _equalization_time(
    schedule: Schedule, p1: Fraction, p2: Fraction
) -> Fraction | None:
    """First t in (p1, p2] where p2·rem1(t) = p1·rem2(t), exactly.

    The gap g(t) = p2·rem1(t) − p1·rem2(t) is piecewise linear along the
    schedule — constant while neither long job runs, falling at rate p2
    while the first runs, rising at rate p1 while the second does — so the
    first zero is either a slice endpoint or an exact rational root inside
    a slice.  Entered only when g(p1) < 0; returns None when no zero
    occurs by p2 (including the completed-job case, where the finished
    job's infinite ratio can never be matched).
    """
    rem1 = p1 - schedule.executed(0, p1)
    rem2 = p2 - schedule.executed(1, p1)
    g = p2 * rem1 - p1 * rem2
    for s in schedule.slices:
        if s.end <= p1:
            continue
        start = max(s.start, p1)
        if start >= p2:
            break
        end = min(s.end, p2)
        span = end - start
        if s.job == 0:
            slope = -p2
            rem1 -= span
        elif s.job == 1:
            slope = p1
            rem2 -= span
        else:
            continue
        g_end = g + slope * span
        if g < 0 <= g_end:
            t = start + Fraction(-g, slope)
            return t if t <= p2 else None
        g = g_end
    return None


def transcript_to_dict(transcript: AdversaryTranscript) -> dict:
    """JSON-ready form of a game transcript (rationals as exact strings)."""
    st = transcript.state
    return {
        "branch": transcript.branch,
        "p1": rational_str(st.p1),
        "p2": rational_str(st.p2),
        "checkpoints": [
            [rational_str(t), rational_str(r1), rational_str(r2)]
            for t, r1, r2 in st.checkpoints
        ],
        "t_s": None if st.t_s is None else rational_str(st.t_s),
        "block": {
            "release": rational_str(st.block_release),
            "ratio": rational_str(st.block_ratio),
            "length": rational_str(st.block_length),
            "closed_form_l1": st.l1,
            "closed_form_l2": st.l2,
        },
        "online_objective": rational_str(transcript.online_objective),
        "optimal_objective": rational_str(transcript.optimal_objective),
        "ratio": float(transcript.ratio),
        "ratio_exact": rational_str(transcript.ratio),
        "instance": instance_to_dict(transcript.instance),
        "schedule": [
            {
                "job": s.job,
                "start": rational_str(s.start),
                "end": rational_str(s.end),
            }
            for s in transcript.schedule.slices
        ],
    }


def write_transcript(transcript: AdversaryTranscript, dest) -> None:
    """Write the transcript as indented JSON."""
    payload = transcript_to_dict(transcript)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    else:
        json.dump(payload, dest, indent=2)
        dest.write("\n")


__all__ = [
    "AdversaryState",
    "AdversaryTranscript",
    "BRANCH_FIRST_UNTOUCHED",
    "BRANCH_SECOND_AHEAD",
    "BRANCH_EQUALIZED",
    "BRANCH_TERMINAL",
    "EXTRA_POLICIES",
    "choose_l",
    "play",
    "transcript_to_dict",
    "write_transcript",
]
