"""Randomized envelope check: worst simulated-over-optimal ratio never
exceeds the analytic competitive ratio.

Every trial draws a small random instance, simulates the policy under its
worst tie-breaking, divides by the brute-force optimum (both exact
rationals), and checks the quotient against the 1.2259 envelope.  The two
structured classes — unit weights and common release — must come out at
exactly 1.  Trials can run across a process pool; the report is merged by
a deterministic max-reduction keyed by (ratio, instance hash), so the
outcome is independent of worker scheduling.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from random import Random

from .core import Instance, objective, rational_str
from .instances import RANDOM_KINDS, gen_random, instance_to_dict, write_instance
from .oracle import optimal_objective
from .simulator import BudgetExceeded, Policy, TieRule, simulate

#: Analytic competitive ratio; no ratio may exceed it (plus float slack).
ENVELOPE = Fraction(12259, 10000)
ENVELOPE_SLACK = Fraction(1, 10**6)


class EnvelopeBreach(AssertionError):
    """A simulated/optimal ratio exceeded the analytic envelope."""

    def __init__(self, instance: Instance, ratio: Fraction):
        super().__init__(
            f"ratio {float(ratio):.9f} exceeds envelope {float(ENVELOPE)}"
        )
        self.instance = instance
        self.ratio = ratio


@dataclass(frozen=True)
class ClassStats:
    """Per-class tallies: trial count, oracle skips, worst exact ratio."""

    trials: int
    skipped: int
    worst_ratio: Fraction
    at_optimum: int


@dataclass(frozen=True)
class FuzzReport:
    """Outcome of a fuzz run; ``classes`` keys are the instance kinds."""

    trials: int
    seed: int
    worst_ratio: Fraction
    certificate_path: str | None
    classes: dict[str, ClassStats]

    def __post_init__(self):
        if self.worst_ratio < 1 - Fraction(1, 10**12):
            raise ValueError("worst ratio fell below 1")


def instance_digest(instance: Instance) -> str:
    """Stable content hash of an instance (used for tie-free reduction)."""
    payload = json.dumps(instance_to_dict(instance), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def evaluate_instance(instance: Instance) -> Fraction | None:
    """Worst-tie simulated objective over the brute-force optimum.

    Returns None when either side blows its search budget; such trials are
    counted but not scored.
    """
    try:
        schedule = simulate(
            instance, policy=Policy.WSRPT, tie=TieRule.EXHAUSTIVE_WORST
        )
        best = optimal_objective(instance)
    except BudgetExceeded:
        return None
    return Fraction(objective(schedule, instance), best)


def _trial_instances(trials: int, n_max: int, seed: int) -> list[Instance]:
    rng = Random(seed)
    out = []
    for i in range(trials):
        kind = RANDOM_KINDS[i % len(RANDOM_KINDS)]
        n = rng.randint(2, n_max)
        out.append(gen_random(rng, n, kind))
    return out


def fuzz(
    trials: int,
    n_max: int = 7,
    seed: int = 0,
    out_dir=None,
    workers: int | None = None,
) -> FuzzReport:
    """Run ``trials`` random instances and report the worst ratio found.

    Instances cycle through the three kinds and are fully determined by
    ``seed``, so reruns reproduce the same trials.  ``workers`` > 1 spreads
    evaluation over a process pool (default: serial).  The worst
    general-class instance is written to ``out_dir`` (or the directory in
    the WSRPT_OUT_DIR environment variable) as a replayable certificate
    carrying its expected ratio in a tag.  Raises EnvelopeBreach if any
    ratio exceeds 1.2259 + 1e-6, and AssertionError if a structured-class
    ratio departs from exactly 1.
    """
    if n_max > 8:
        raise ValueError("n_max must be at most 8 (brute-force oracle bound)")
    if trials < 1:
        raise ValueError("trials must be positive")

    instances = _trial_instances(trials, n_max, seed)
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            ratios = list(
                pool.map(evaluate_instance, instances, chunksize=64)
            )
    else:
        ratios = [evaluate_instance(inst) for inst in instances]

    counts = {kind: 0 for kind in RANDOM_KINDS}
    skipped = {kind: 0 for kind in RANDOM_KINDS}
    at_optimum = {kind: 0 for kind in RANDOM_KINDS}
    worst: dict[str, tuple[Fraction, str, Instance] | None] = {
        kind: None for kind in RANDOM_KINDS
    }
    for instance, ratio in zip(instances, ratios):
        kind = instance.tags["kind"]
        counts[kind] += 1
        if ratio is None:
            skipped[kind] += 1
            continue
        if ratio > ENVELOPE + ENVELOPE_SLACK:
            raise EnvelopeBreach(instance, ratio)
        if kind in ("unit-weight", "zero-release") and ratio != 1:
            raise AssertionError(
                f"{kind} instance simulated at ratio {ratio} != 1"
            )
        if ratio == 1:
            at_optimum[kind] += 1
        key = (ratio, instance_digest(instance))
        if worst[kind] is None or key > (worst[kind][0], worst[kind][1]):
            worst[kind] = (ratio, key[1], instance)

    classes = {
        kind: ClassStats(
            trials=counts[kind],
            skipped=skipped[kind],
            worst_ratio=worst[kind][0] if worst[kind] else Fraction(1),
            at_optimum=at_optimum[kind],
        )
        for kind in RANDOM_KINDS
    }
    overall = max(stats.worst_ratio for stats in classes.values())

    certificate_path = None
    if worst["general"] is not None:
        out_dir = out_dir if out_dir is not None else os.environ.get("WSRPT_OUT_DIR")
        if out_dir is not None:
            ratio, _, instance = worst["general"]
            tagged = Instance(
                instance.jobs,
                tie_script=instance.tie_script,
                tags={**instance.tags, "fuzz_ratio": rational_str(ratio)},
            )
            path = Path(out_dir) / f"fuzz_certificate_seed{seed}.json"
            write_instance(tagged, path)
            certificate_path = str(path)

    return FuzzReport(
        trials=trials,
        seed=seed,
        worst_ratio=overall,
        certificate_path=certificate_path,
        classes=classes,
    )


def replay_certificate(path) -> tuple[Fraction, Fraction]:
    """Re-evaluate a certificate; returns (expected, recomputed) ratios."""
    from .instances import read_instance

    instance = read_instance(path)
    expected = Fraction(instance.tags["fuzz_ratio"])
    recomputed = evaluate_instance(instance)
    if recomputed is None:
        raise BudgetExceeded("certificate replay exceeded the oracle budget")
    return expected, recomputed


__all__ = [
    "ENVELOPE",
    "ClassStats",
    "EnvelopeBreach",
    "FuzzReport",
    "evaluate_instance",
    "fuzz",
    "instance_digest",
    "replay_certificate",
]
