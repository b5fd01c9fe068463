"""Domain types and exact numerics shared by the whole package.

Times and weights are arbitrary-precision rationals (`fractions.Fraction`)
end-to-end in simulation and oracle code: the constructed instances tie
Smith ratios *exactly* at every release, and floats would silently break
those ties.  Floating point is reserved for the analysis module, which
works with closed forms and quadrature under stated tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[Fraction, int, str]


def to_rational(value: Rational) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Accepts Fractions, ints, and strings in decimal ("0.8157") or
    "num/den" ("5307/10000") form.  Binary floats are rejected: their
    exact values are almost never what the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational numeral: {value!r}") from exc
    raise ValueError(f"refusing inexact value {value!r}; pass a string or Fraction")


def rational_str(value: Fraction) -> str:
    """Render a Fraction as "num/den" (or plain "num" for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Job:
    """One job: release date r, processing time p, weight w."""

    id: int
    release: Fraction
    processing: Fraction
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "release", to_rational(self.release))
        object.__setattr__(self, "processing", to_rational(self.processing))
        object.__setattr__(self, "weight", to_rational(self.weight))
        if self.processing <= 0:
            raise ValueError(f"job {self.id}: processing must be > 0")
        if self.release < 0:
            raise ValueError(f"job {self.id}: release must be >= 0")
        if self.weight < 0:
            raise ValueError(f"job {self.id}: weight must be >= 0")

    @property
    def ratio(self) -> Fraction:
        """Static weight-over-processing ratio w/p (never updated)."""
        return self.weight / self.processing


def smith_ratio(job: Job, remaining: Fraction) -> Fraction:
    """Weight over *remaining* processing time, exact.

    The dynamic priority of a partially executed job; equals ``job.ratio``
    when the job has not run yet.
    """
    remaining = to_rational(remaining)
    if remaining <= 0:
        raise ValueError(f"job {job.id}: remaining must be > 0, got {remaining}")
    if remaining > job.processing:
        raise ValueError(f"job {job.id}: remaining {remaining} exceeds processing")
    return job.weight / remaining


@dataclass(frozen=True)
class Instance:
    """An ordered collection of jobs with unique ids.

    ``tie_script`` optionally names the tie winner at given event times
    (see simulator.TieScript); ``tags`` carries generator metadata such as
    snapped parameter values.
    """

    jobs: tuple[Job, ...]
    tie_script: tuple[tuple[Fraction, int], ...] | None = None
    tags: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.jobs:
            raise ValueError("instance must contain at least one job")
        ids = [j.id for j in self.jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("job ids must be unique")
        if self.tie_script is not None:
            script = tuple(
                (to_rational(t), int(choice)) for t, choice in self.tie_script
            )
            object.__setattr__(self, "tie_script", script)

    def job(self, job_id: int) -> Job:
        for j in self.jobs:
            if j.id == job_id:
                return j
        raise KeyError(f"no job with id {job_id}")

    @property
    def min_release(self) -> Fraction:
        return min(j.release for j in self.jobs)

    def total_work(self) -> Fraction:
        return sum((j.processing for j in self.jobs), Fraction(0))

    def total_weight(self) -> Fraction:
        return sum((j.weight for j in self.jobs), Fraction(0))


def normalize_releases(instance: Instance) -> Instance:
    """Shift all releases so the earliest becomes 0."""
    shift = instance.min_release
    if shift == 0:
        return instance
    jobs = tuple(
        Job(j.id, j.release - shift, j.processing, j.weight) for j in instance.jobs
    )
    script = None
    if instance.tie_script is not None:
        script = tuple((t - shift, c) for t, c in instance.tie_script)
    return Instance(jobs, tie_script=script, tags=dict(instance.tags))


@dataclass(frozen=True)
class Slice:
    """A maximal interval [start, end) during which one job executes."""

    job: int
    start: Fraction
    end: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", to_rational(self.start))
        object.__setattr__(self, "end", to_rational(self.end))
        if self.start >= self.end:
            raise ValueError(f"slice for job {self.job}: start must precede end")

    @property
    def length(self) -> Fraction:
        return self.end - self.start


class Schedule:
    """Ordered, disjoint execution slices on one machine."""

    def __init__(self, slices: Iterable[Slice]):
        self.slices = tuple(slices)
        self._completions: dict[int, Fraction] = {}
        for s in self.slices:
            self._completions[s.job] = s.end

    def completion(self, job_id: int) -> Fraction:
        """End of the job's last slice."""
        try:
            return self._completions[job_id]
        except KeyError:
            raise KeyError(f"job {job_id} never executes in this schedule") from None

    def completions(self) -> dict[int, Fraction]:
        return dict(self._completions)

    def executed(self, job_id: int, t: Fraction) -> Fraction:
        """Work done on the job strictly before time t."""
        t = to_rational(t)
        done = Fraction(0)
        for s in self.slices:
            if s.job != job_id or s.start >= t:
                continue
            done += min(s.end, t) - s.start
        return done

    def remaining(self, job: Job, t: Fraction) -> Fraction:
        """Remaining processing time p_j(t)."""
        return job.processing - self.executed(job.id, t)

    @property
    def makespan(self) -> Fraction:
        return max(s.end for s in self.slices)

    def __len__(self) -> int:
        return len(self.slices)

    def __iter__(self):
        return iter(self.slices)

    def __eq__(self, other):
        return isinstance(other, Schedule) and self.slices == other.slices

    def __hash__(self):
        return hash(self.slices)

    def validate(self, instance: Instance) -> None:
        """Check feasibility against an instance; raise ValueError if broken.

        Slices must be sorted and disjoint, start at or after the job's
        release, and each job's slice lengths must sum to exactly its
        processing time.
        """
        if not self.slices:
            raise ValueError("schedule has no slices")
        jobs = {j.id: j for j in instance.jobs}
        prev_end: Fraction | None = None
        total: dict[int, Fraction] = {jid: Fraction(0) for jid in jobs}
        for s in self.slices:
            if s.job not in jobs:
                raise ValueError(f"slice references unknown job {s.job}")
            if prev_end is not None and s.start < prev_end:
                raise ValueError(f"overlapping slices at {s.start}")
            if s.start < jobs[s.job].release:
                raise ValueError(f"job {s.job} runs before its release")
            total[s.job] += s.length
            prev_end = s.end
        for jid, job in jobs.items():
            if total[jid] != job.processing:
                raise ValueError(
                    f"job {jid} executes {total[jid]} of {job.processing}"
                )


def objective(schedule: Schedule, instance: Instance) -> Fraction:
    """Total weighted completion time Σ w_j·C_j, exact."""
    sched_jobs = set(schedule.completions())
    inst_jobs = {j.id for j in instance.jobs}
    if sched_jobs != inst_jobs:
        raise ValueError(
            f"schedule covers jobs {sorted(sched_jobs)} but instance has {sorted(inst_jobs)}"
        )
    return sum(
        (j.weight * schedule.completion(j.id) for j in instance.jobs), Fraction(0)
    )


def merge_slices(raw: Sequence[Slice]) -> list[Slice]:
    """Fuse adjacent slices of the same job into maximal runs."""
    merged: list[Slice] = []
    for s in raw:
        if merged and merged[-1].job == s.job and merged[-1].end == s.start:
            merged[-1] = Slice(s.job, merged[-1].start, s.end)
        else:
            merged.append(s)
    return merged
