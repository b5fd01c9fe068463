"""Instance construction: adversarial equality families, random draws, JSON I/O.

The constructed families discretize the continuum worst cases for the
weighted shortest-remaining-processing-time rule.  Every release in them
ties the running job's current weight-to-remaining ratio exactly (weights
use the left grid endpoint, the running long job has burned exactly that
much work), so each instance carries the tie script that realizes the
adversarial resolution of those ties.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from pathlib import Path
from random import Random
from typing import IO, Union

from .core import Instance, Job, rational_str, to_rational

_ONE = Fraction(1)


@dataclass(frozen=True)
class ScenarioParams:
    """Continuum parameters of the single-segment adversarial family.

    ``y``: last small-job release; ``v``: end of the unit-density prefix
    (``v == y`` means no ramp of heavier releases); ``z``: work released in
    a lump at ``y``; ``delta``: discretization step.
    """

    y: Fraction
    v: Fraction
    z: Fraction = Fraction(0)
    delta: Fraction = Fraction(1, 100)

    def __post_init__(self):
        for name in ("y", "v", "z", "delta"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if not 0 < self.y < 1:
            raise ValueError("y must lie in (0, 1)")
        if not 0 <= self.v <= self.y:
            raise ValueError("v must lie in [0, y]")
        if self.z < 0:
            raise ValueError("z must be nonnegative")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


@dataclass(frozen=True)
class NestedParams:
    """A second adversarial segment opened inside a truncated outer one.

    The outer family is cut off at ``r_s`` (its releases after the inner
    segment opens are dropped), where a job of length ``p_s`` and weight
    ``p_s / (1 - r_s)`` arrives and hosts the inner family, scaled by
    ``p_s`` in time and ``p_s / (1 - r_s)`` in weight.
    """

    outer: ScenarioParams
    r_s: Fraction
    p_s: Fraction
    inner: ScenarioParams

    def __post_init__(self):
        object.__setattr__(self, "r_s", to_rational(self.r_s))
        object.__setattr__(self, "p_s", to_rational(self.p_s))
        if not 0 < self.r_s < 1:
            raise ValueError("r_s must lie in (0, 1)")
        if self.r_s > self.outer.v:
            raise ValueError("the outer unit-density prefix must reach r_s")
        if self.p_s <= 0:
            raise ValueError("p_s must be positive")

    @property
    def small_weight(self) -> Fraction:
        return self.p_s / (_ONE - self.r_s)


def _snap_steps(value: Fraction, delta: Fraction) -> int:
    """Nearest grid multiple (round half up), as a step count."""
    num = value / delta
    return int((num + Fraction(1, 2)).__floor__())


def _segment_length(params: ScenarioParams) -> Fraction:
    """Continuum length of the busy segment a scenario produces.

    Long job (1) plus floor work (v), wall work at density (1+z)/(1-y)
    over [v, y), plus the block (z).
    """
    y, v, z = params.y, params.v, params.z
    return _ONE + v + (_ONE + z) * (y - v) / (_ONE - y) + z


def _small_pieces(
    m_steps: int, n_steps: int, z: Fraction, delta: Fraction
) -> list[tuple[Fraction, Fraction, Fraction]]:
    """(release, processing, weight) of the family's small jobs, in order.

    Unit-density floor pieces sit at the left endpoints 0..(n-1)·delta; the
    ramp on (v, y] carries density (1+z)/(1-y) per unit release, split into
    equal pieces no longer than delta; the lump at y is z split likewise.
    Weights use the release point, so each piece's ratio is exactly
    1/(1 - release) — the running long job's current ratio.
    """
    pieces: list[tuple[Fraction, Fraction, Fraction]] = []
    y = m_steps * delta
    for i in range(n_steps):
        x = i * delta
        pieces.append((x, delta, delta / (_ONE - x)))
    if m_steps > n_steps:
        density = (_ONE + z) / (_ONE - y)
        k = ceil(density)
        piece_p = delta * density / k
        for i in range(n_steps, m_steps):
            x = i * delta
            w = piece_p / (_ONE - x)
            pieces.extend((x, piece_p, w) for _ in range(k))
    if z > 0:
        kb = ceil(z / delta)
        piece_p = z / kb
        w = piece_p / (_ONE - y)
        pieces.extend((y, piece_p, w) for _ in range(kb))
    return pieces


def gen_basic(params: ScenarioParams) -> Instance:
    """One long job plus the discretized small-job family tied to it.

    The long job (id 0, p = w = 1) is released at 0 and, per the emitted tie
    script, wins every tie until it completes at time 1; everything after
    that is forced by strict ratio comparisons.  ``y`` and ``v`` snap to the
    nearest grid multiple; ``tags["snapped"]`` records whether they moved.
    """
    delta = params.delta
    m_steps = _snap_steps(params.y, delta)
    n_steps = _snap_steps(params.v, delta)
    if m_steps < 1:
        raise ValueError("y snaps below one grid step")
    if m_steps * delta >= 1:
        raise ValueError("y snaps to 1 or beyond; refine delta or lower y")
    n_steps = min(n_steps, m_steps)
    y_eff = m_steps * delta
    v_eff = n_steps * delta

    jobs = [Job(0, 0, 1, 1)]
    pieces = _small_pieces(m_steps, n_steps, params.z, delta)
    for rel, proc, weight in pieces:
        jobs.append(Job(len(jobs), rel, proc, weight))

    release_times = sorted({rel for rel, _, _ in pieces} | {Fraction(0)})
    script = tuple((t, 0) for t in release_times)

    tags = {
        "family": "basic",
        "y": rational_str(params.y),
        "v": rational_str(params.v),
        "z": rational_str(params.z),
        "delta": rational_str(delta),
        "y_effective": rational_str(y_eff),
        "v_effective": rational_str(v_eff),
        "snapped": y_eff != params.y or v_eff != params.v,
    }
    return Instance(tuple(jobs), tie_script=script, tags=tags)


def gen_nested(params: NestedParams) -> Instance:
    """Truncated outer family hosting a scaled inner family at ``r_s``.

    The outer long job (id 0) wins its ties until the inner segment opens;
    the segment-opening job wins the tie at ``r_s`` and every inner release
    while it runs; the script's final entries let the inner pieces whose
    ratio equals the outer long job's frozen ratio finish before it resumes.
    """
    delta_o = params.outer.delta
    r_steps = _snap_steps(params.r_s, delta_o)
    if r_steps < 1:
        raise ValueError("r_s snaps below one outer grid step")
    r_eff = r_steps * delta_o
    if r_eff >= 1:
        raise ValueError("r_s snaps to 1 or beyond")
    if r_eff > params.outer.v:
        raise ValueError("r_s must lie in the outer floor region (r_s <= v)")
    p_s = params.p_s
    w_s = p_s / (_ONE - r_eff)

    # Truncating the outer family at r_s is only harmless when the inner
    # segment outlasts the dropped outer releases: r_s + p_s*L >= y(1-v)/(1-y).
    outer_y, outer_v = params.outer.y, params.outer.v
    inner_l = _segment_length(params.inner)
    horizon = outer_y * (_ONE - outer_v) / (_ONE - outer_y)
    if r_eff + p_s * inner_l < horizon:
        raise ValueError(
            "inner segment too short to cover the truncated outer releases: "
            f"r_s + p_s*L = {float(r_eff + p_s * inner_l):.4f} < "
            f"{float(horizon):.4f} = y(1-v)/(1-y)"
        )

    jobs = [Job(0, 0, 1, 1)]
    script: list[tuple[Fraction, int]] = []
    for i in range(r_steps):
        x = i * delta_o
        jobs.append(Job(len(jobs), x, delta_o, delta_o / (_ONE - x)))
        script.append((x, 0))

    small_id = len(jobs)
    jobs.append(Job(small_id, r_eff, p_s, w_s))
    script.append((r_eff, small_id))

    inner = params.inner
    mi = _snap_steps(inner.y, inner.delta)
    ni = _snap_steps(inner.v, inner.delta)
    if mi < 1 or mi * inner.delta >= 1:
        raise ValueError("inner y snaps outside (0, 1)")
    ni = min(ni, mi)
    inner_pieces = _small_pieces(mi, ni, inner.z, inner.delta)

    resume_ratio_ids: list[tuple[Fraction, int]] = []  # (processing, id)
    for rel, proc, weight in inner_pieces:
        jid = len(jobs)
        jobs.append(Job(jid, r_eff + p_s * rel, p_s * proc, w_s * weight))
        if rel == 0:
            resume_ratio_ids.append((p_s * proc, jid))
    for rel in sorted({rel for rel, _, _ in inner_pieces if rel > 0}):
        script.append((r_eff + p_s * rel, small_id))

    # Pieces released with the segment opener share the outer long job's
    # frozen ratio; they run back to back at the segment's very end, each
    # chosen by script over the long job at the preceding completion.
    inner_total = p_s * (_ONE + sum(p for _, p, _ in inner_pieces))
    t = r_eff + inner_total - sum(p for p, _ in resume_ratio_ids)
    for proc, jid in resume_ratio_ids:
        script.append((t, jid))
        t += proc

    script_times = [s[0] for s in script]
    assert len(set(script_times)) == len(script_times)

    tags = {
        "family": "nested",
        "r_s": rational_str(params.r_s),
        "r_s_effective": rational_str(r_eff),
        "p_s": rational_str(p_s),
        "small_weight": rational_str(w_s),
        "outer_delta": rational_str(delta_o),
        "inner_y": rational_str(inner.y),
        "inner_v": rational_str(inner.v),
        "inner_z": rational_str(inner.z),
        "inner_delta": rational_str(inner.delta),
        "inner_length": rational_str(inner_total / p_s),
        "snapped": r_eff != params.r_s,
    }
    return Instance(tuple(jobs), tie_script=tuple(script), tags=tags)


RANDOM_KINDS = ("general", "unit-weight", "zero-release")


def gen_random(rng: Random, n: int, kind: str = "general") -> Instance:
    """n jobs with half-integer data: p, w in {1/2..3}, r in {0..3}.

    ``unit-weight`` forces w = 1, ``zero-release`` forces r = 0; both are
    classes where the policy is exactly optimal, which the fuzz loop checks.
    """
    if kind not in RANDOM_KINDS:
        raise ValueError(f"kind must be one of {RANDOM_KINDS}")
    if n < 1:
        raise ValueError("n must be positive")
    jobs = []
    for i in range(n):
        release = Fraction(0) if kind == "zero-release" else Fraction(rng.randint(0, 6), 2)
        processing = Fraction(rng.randint(1, 6), 2)
        weight = Fraction(1) if kind == "unit-weight" else Fraction(rng.randint(1, 6), 2)
        jobs.append(Job(i, release, processing, weight))
    return Instance(tuple(jobs), tags={"family": "random", "kind": kind})


PathOrFile = Union[str, Path, IO[str]]


def instance_to_dict(instance: Instance) -> dict:
    """JSON-ready form with rationals rendered as exact num/den strings."""
    payload = {
        "jobs": [
            {
                "id": j.id,
                "r": rational_str(j.release),
                "p": rational_str(j.processing),
                "w": rational_str(j.weight),
            }
            for j in instance.jobs
        ],
    }
    if instance.tie_script is not None:
        payload["tie_script"] = [
            {"t": rational_str(t), "choice": c} for t, c in instance.tie_script
        ]
    if instance.tags:
        payload["tags"] = dict(instance.tags)
    return payload


def instance_from_dict(payload: dict) -> Instance:
    """Inverse of instance_to_dict."""
    jobs = tuple(
        Job(
            rec["id"],
            to_rational(rec["r"]),
            to_rational(rec["p"]),
            to_rational(rec["w"]),
        )
        for rec in payload["jobs"]
    )
    script = payload.get("tie_script")
    tie_script = (
        None
        if script is None
        else tuple((to_rational(e["t"]), int(e["choice"])) for e in script)
    )
    return Instance(jobs, tie_script=tie_script, tags=payload.get("tags", {}))


def write_instance(instance: Instance, dest: PathOrFile) -> None:
    """Serialize to JSON with rationals rendered as exact num/den strings."""
    payload = instance_to_dict(instance)
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
            f.write("\n")
    else:
        json.dump(payload, dest, indent=2)
        dest.write("\n")


def read_instance(src: PathOrFile) -> Instance:
    """Inverse of write_instance."""
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as f:
            payload = json.load(f)
    else:
        payload = json.load(src)
    return instance_from_dict(payload)
