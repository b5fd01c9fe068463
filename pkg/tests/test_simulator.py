"""Policy simulation: spec'd schedules, tie rules, equality instances,
segments, and the splitting transformation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings

from wsrpt.core import Instance, Job, Schedule, objective
from wsrpt.instances import ScenarioParams, gen_basic
from wsrpt.oracle import optimal_objective
from wsrpt.simulator import (
    Policy,
    TieRule,
    is_equality_instance,
    segments,
    simulate,
    split_job,
)

from conftest import small_instances


def _two_long_jobs():
    return Instance((Job(0, 0, 1, 1), Job(1, 0, 2, 2)))


class TestSimulate:
    def test_single_job(self):
        inst = Instance((Job(0, 0, 1, 1),))
        sched = simulate(inst)
        assert objective(sched, inst) == 1
        assert sched.makespan == 1

    def test_completion_processed_before_release(self):
        # J0 completes exactly when J1 arrives; no artificial tie.
        inst = Instance((Job(0, 0, 1, 1), Job(1, 1, 1, 1)))
        sched = simulate(inst)
        assert sched.completion(0) == 1
        assert sched.completion(1) == 2

    def test_preemption_on_higher_ratio_release(self):
        inst = Instance((Job(0, 0, 2, 1), Job(1, 1, 1, 9)))
        sched = simulate(inst)
        assert sched.completion(1) == 2
        assert sched.completion(0) == 3

    def test_wsrpt_key_uses_remaining(self):
        # After J0 runs [0, 3/2) its Smith ratio is 1/(1/2) = 2, so the
        # static-ratio-3/2 arrival does not preempt under WSRPT but does
        # win under static WSPT.
        inst = Instance((Job(0, 0, 2, 1), Job(1, Fraction(3, 2), 1, Fraction(3, 2))))
        wsrpt = simulate(inst, policy=Policy.WSRPT)
        wspt = simulate(inst, policy=Policy.WSPT_PREEMPTIVE)
        assert wsrpt.completion(0) == 2
        assert wspt.completion(0) == 3

    def test_deterministic(self):
        inst = _two_long_jobs()
        assert simulate(inst).slices == simulate(inst).slices

    def test_no_idle_while_work_pending(self):
        inst = Instance((Job(0, 0, 1, 1), Job(1, 5, 1, 1)))
        sched = simulate(inst)
        assert sched.slices[0].end == 1
        assert sched.slices[1].start == 5  # idle gap only while nothing released

    @given(small_instances())
    @settings(max_examples=60)
    def test_schedules_validate(self, instance):
        for policy in Policy:
            simulate(instance, policy=policy).validate(instance)

    @given(small_instances())
    @settings(max_examples=60)
    def test_unit_weight_wsrpt_matches_srpt(self, instance):
        unit = Instance(
            tuple(Job(j.id, j.release, j.processing, 1) for j in instance.jobs)
        )
        a = objective(simulate(unit, policy=Policy.WSRPT), unit)
        b = objective(simulate(unit, policy=Policy.SRPT), unit)
        assert a == b

    @given(small_instances())
    @settings(max_examples=60)
    def test_zero_release_is_wspt_order_no_preemption(self, instance):
        flat = Instance(
            tuple(Job(j.id, 0, j.processing, j.weight) for j in instance.jobs)
        )
        sched = simulate(flat, policy=Policy.WSRPT)
        # nonpreemptive: one slice per job, in nonincreasing static ratio
        assert len(sched.slices) == len(flat.jobs)
        ratios = [flat.job(s.job).ratio for s in sched.slices]
        assert all(a >= b for a, b in zip(ratios, ratios[1:]))
        assert objective(sched, flat) == optimal_objective(flat)


class TestTieRules:
    def test_scripted_requires_script(self):
        inst = _two_long_jobs()
        with pytest.raises(ValueError):
            simulate(inst, tie=TieRule.SCRIPTED)

    def test_scripted_choice_honored(self):
        inst = _two_long_jobs()  # equal ratios at t=0
        first = simulate(inst, tie=TieRule.SCRIPTED, script=((Fraction(0), 0),))
        second = simulate(inst, tie=TieRule.SCRIPTED, script=((Fraction(0), 1),))
        assert first.slices[0].job == 0
        assert second.slices[0].job == 1

    def test_prefer_new_longest_vs_shortest(self):
        inst = _two_long_jobs()
        longest = simulate(inst, tie=TieRule.PREFER_NEW_LONGEST)
        shortest = simulate(inst, tie=TieRule.PREFER_NEW_SHORTEST)
        assert longest.slices[0].job == 1
        assert shortest.slices[0].job == 0

    @given(small_instances(max_jobs=4))
    @settings(max_examples=40, deadline=None)
    def test_exhaustive_worst_dominates_fixed_rules(self, instance):
        worst = objective(
            simulate(instance, tie=TieRule.EXHAUSTIVE_WORST), instance
        )
        for tie in (
            TieRule.PREFER_RUNNING,
            TieRule.PREFER_NEW_LONGEST,
            TieRule.PREFER_NEW_SHORTEST,
        ):
            assert worst >= objective(simulate(instance, tie=tie), instance)


class TestEqualityInstance:
    def test_single_job_passes(self):
        report = is_equality_instance(Instance((Job(0, 0, 1, 1),)))
        assert report.passed

    def test_hand_violation(self):
        # at t=1/2 the running job's Smith ratio is 1/(1/2) = 2, arrival's is 1
        inst = Instance(
            (Job(0, 0, 1, 1), Job(1, Fraction(1, 2), Fraction(1, 10), Fraction(1, 10)))
        )
        report = is_equality_instance(inst)
        assert not report.passed
        assert report.violations[0][0] == Fraction(1, 2)

    def test_generated_family_passes(self):
        params = ScenarioParams(
            y=Fraction(1, 2), v=Fraction(3, 10), delta=Fraction(1, 20)
        )
        assert is_equality_instance(gen_basic(params)).passed


class TestSegments:
    def test_single_job_single_segment(self):
        inst = Instance((Job(0, 0, 1, 1),))
        forest = segments(simulate(inst), inst)
        assert len(forest) == 1
        assert (forest[0].start, forest[0].end) == (0, 1)
        assert forest[0].members == (0,)

    def test_basic_family_one_segment(self):
        params = ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 2), delta=Fraction(1, 10))
        inst = gen_basic(params)
        sched = simulate(inst, tie=TieRule.SCRIPTED)
        forest = segments(sched, inst)
        assert len(forest) == 1
        assert forest[0].members == tuple(j.id for j in inst.jobs)
        assert forest[0].depth == 0
        assert forest[0].end == sched.makespan

    def test_nested_family_two_segments(self):
        from wsrpt.instances import NestedParams, gen_nested

        outer = ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 2), delta=Fraction(1, 10))
        inner = ScenarioParams(y=Fraction(2, 5), v=Fraction(2, 5), delta=Fraction(1, 10))
        inst = gen_nested(
            NestedParams(outer=outer, r_s=Fraction(3, 10), p_s=Fraction(5), inner=inner)
        )
        sched = simulate(inst, tie=TieRule.SCRIPTED)
        forest = segments(sched, inst)
        assert len(forest) == 1
        assert len(forest[0].children) == 1
        child = forest[0].children[0]
        assert child.depth == 1
        assert forest[0].start < child.start < child.end <= forest[0].end


class TestSplitJob:
    def test_identity_at_q_one(self):
        inst = _two_long_jobs()
        again = split_job(inst, 0, 1)
        assert [(j.release, j.processing, j.weight) for j in again.jobs] == [
            (j.release, j.processing, j.weight) for j in inst.jobs
        ]

    def test_fragments_exact(self):
        inst = Instance((Job(0, 0, 1, 1),))
        halves = split_job(inst, 0, 2)
        assert len(halves.jobs) == 2
        for j in halves.jobs:
            assert (j.processing, j.weight) == (Fraction(1, 2), Fraction(1, 2))

    def test_isolated_job_objective_drop(self):
        # splitting an isolated job into q pieces saves w*p*(q-1)/(2q), exactly
        inst = Instance((Job(0, 0, Fraction(3, 2), Fraction(5, 4)),))
        base = objective(simulate(inst), inst)
        for q in (1, 2, 3, 8):
            split = split_job(inst, 0, q)
            value = objective(simulate(split), split)
            drop = Fraction(5, 4) * Fraction(3, 2) * (q - 1) / (2 * q)
            assert base - value == drop

    def test_ratio_monotone_on_two_long_jobs(self):
        inst = _two_long_jobs()
        prev = None
        for q in (1, 2, 4, 8):
            split = split_job(inst, 1, q)
            worst = objective(
                simulate(split, tie=TieRule.EXHAUSTIVE_WORST), split
            )
            ratio = Fraction(worst, optimal_objective(split))
            if prev is not None:
                assert ratio >= prev
            prev = ratio

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            split_job(_two_long_jobs(), 9, 2)
