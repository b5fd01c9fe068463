"""Optimality oracles: permutation brute force, time-indexed DP,
structure-aware fast path, and the two-long-job closed form."""

import math
from fractions import Fraction
from random import Random

import pytest
from hypothesis import given, settings

from wsrpt.core import Instance, Job, objective
from wsrpt.instances import ScenarioParams, gen_basic, gen_random
from wsrpt.oracle import (
    closed_pair_optimal,
    optimal_bruteforce,
    optimal_dp_timeindexed,
    priority_schedule,
    structured_optimal,
)
from wsrpt.simulator import Policy, TieRule, simulate

from conftest import small_instances


class TestPrioritySchedule:
    def test_single_job(self):
        inst = Instance((Job(0, 0, 1, 1),))
        sched = priority_schedule(inst, [0])
        assert sched.slices[0].start == 0 and sched.slices[0].end == 1

    def test_hand_trace_with_preemption(self):
        inst = Instance((Job(0, 0, 2, 1), Job(1, 1, 1, 9)))
        sched = priority_schedule(inst, [1, 0])
        assert [(s.job, s.start, s.end) for s in sched.slices] == [
            (0, 0, 1),
            (1, 1, 2),
            (0, 2, 3),
        ]

    def test_identity_order_zero_release(self):
        inst = Instance((Job(0, 0, 2, 1), Job(1, 0, 1, 1), Job(2, 0, 3, 1)))
        sched = priority_schedule(inst, [0, 1, 2])
        assert [s.job for s in sched.slices] == [0, 1, 2]

    @given(small_instances())
    @settings(max_examples=40)
    def test_wspt_order_matches_wspt_policy_at_zero_release(self, instance):
        flat = Instance(
            tuple(Job(j.id, 0, j.processing, j.weight) for j in instance.jobs)
        )
        order = sorted(flat.jobs, key=lambda j: (-j.ratio, j.id))
        by_order = priority_schedule(flat, [j.id for j in order])
        policy = simulate(flat, policy=Policy.WSPT_PREEMPTIVE)
        assert objective(by_order, flat) == objective(policy, flat)


class TestBruteforce:
    def test_rejects_oversized(self):
        jobs = tuple(Job(i, 0, 1, 1) for i in range(5))
        with pytest.raises(ValueError):
            optimal_bruteforce(Instance(jobs), max_n=4)

    def test_method_tag_and_consistency(self):
        inst = Instance((Job(0, 0, 2, 1), Job(1, 1, 1, 9)))
        result = optimal_bruteforce(inst)
        assert result.method == "brute-force"
        assert objective(result.schedule, inst) == result.objective

    @given(small_instances())
    @settings(max_examples=60, deadline=None)
    def test_lower_bounds_every_policy(self, instance):
        best = optimal_bruteforce(instance).objective
        for policy in Policy:
            assert best <= objective(simulate(instance, policy=policy), instance)

    @given(small_instances())
    @settings(max_examples=40, deadline=None)
    def test_unit_weight_equals_srpt(self, instance):
        unit = Instance(
            tuple(Job(j.id, j.release, j.processing, 1) for j in instance.jobs)
        )
        srpt = objective(simulate(unit, policy=Policy.SRPT), unit)
        assert optimal_bruteforce(unit).objective == srpt


class TestTimeIndexedDP:
    def test_single_job_matches_brute(self):
        inst = Instance((Job(0, 0, 3, 2),))
        assert (
            optimal_dp_timeindexed(inst).objective
            == optimal_bruteforce(inst).objective
        )

    def test_two_job_hand_instance(self):
        inst = Instance((Job(0, 0, 2, 1), Job(1, 1, 1, 9)))
        result = optimal_dp_timeindexed(inst, grid=Fraction(1))
        assert result.method == "dp-timeindexed"
        assert result.objective == optimal_bruteforce(inst).objective
        assert objective(result.schedule, inst) == result.objective

    def test_misaligned_grid_rejected(self):
        inst = Instance((Job(0, 0, Fraction(1, 3), 1),))
        with pytest.raises(ValueError):
            optimal_dp_timeindexed(inst, grid=Fraction(1, 2))

    def test_budget_guard(self):
        from wsrpt.simulator import BudgetExceeded

        inst = Instance((Job(0, 0, 10**7, 1),))
        with pytest.raises(BudgetExceeded):
            optimal_dp_timeindexed(inst, grid=Fraction(1))

    def test_agrees_with_brute_on_seeded_instances(self):
        # the acceptance module runs the full hundred; spot-check here
        rng = Random(2024)
        for _ in range(25):
            inst = gen_random(rng, rng.randint(2, 6))
            assert (
                optimal_dp_timeindexed(inst).objective
                == optimal_bruteforce(inst).objective
            )


class TestStructuredOptimal:
    def test_requires_generated_instance(self):
        with pytest.raises(ValueError):
            structured_optimal(Instance((Job(0, 0, 1, 1),)))

    def test_coarse_basic_equals_bruteforce(self):
        params = ScenarioParams(y=Fraction(2, 5), v=Fraction(2, 5), delta=Fraction(1, 5))
        inst = gen_basic(params)
        assert len(inst.jobs) <= 8
        result = structured_optimal(inst)
        assert result.method == "structured"
        assert result.objective == optimal_bruteforce(inst).objective
        assert objective(result.schedule, inst) == result.objective

    def test_floor_only_objective_near_closed_form(self):
        # C* for the floor-only family at y=0.10 approaches 1.1054 as the
        # step shrinks; at delta=1e-3 the gap is O(delta).
        params = ScenarioParams(y=Fraction(1, 10), v=Fraction(1, 10), delta=Fraction(1, 1000))
        inst = gen_basic(params)
        assert abs(float(structured_optimal(inst).objective) - 1.1054) < 5e-3


class TestClosedPairOptimal:
    def test_zero_length_block(self):
        assert closed_pair_optimal(1, 2, 1, 2, 0) == 1 + 2 * 3

    def test_j1_first_selected_on_lower_bound_instance(self):
        p1, p2 = Fraction(1), Fraction(23364, 10000)
        rho = p2 / (p2 - p1)
        l1 = Fraction(
            math.sqrt(float(2 * (p2**3 - p1**3) / p2))
        ).limit_denominator(10**9)
        value = closed_pair_optimal(p1, p2, p1, rho, l1)
        j1_first = p1**2 + rho * l1 * (p1 + l1 / 2) + p2 * (p1 + p2 + l1)
        assert value == j1_first
        online = p2**2 + rho * l1 * (p2 + l1 / 2) + p1 * (p1 + p2 + l1)
        assert abs(online / value - Fraction(11038, 10000)) < Fraction(1, 10000)

    def test_agreement_with_bruteforce_at_four_pieces(self):
        p1, p2 = Fraction(1), Fraction(23364, 10000)
        rho, total, pieces = Fraction(3, 2), Fraction(2), 4
        piece = total / pieces
        jobs = [Job(0, 0, p1, p1), Job(1, 0, p2, p2)]
        jobs += [Job(2 + i, p1, piece, rho * piece) for i in range(pieces)]
        inst = Instance(tuple(jobs))
        assert (
            closed_pair_optimal(p1, p2, p1, rho, total, pieces=pieces)
            == optimal_bruteforce(inst).objective
        )

    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError):
            closed_pair_optimal(2, 1, 1, 2, 1)  # p1 >= p2
        with pytest.raises(ValueError):
            closed_pair_optimal(1, 2, 3, 2, 1)  # release after p2
        with pytest.raises(ValueError):
            closed_pair_optimal(1, 2, 1, 2, -1)  # negative length
