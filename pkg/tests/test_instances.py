"""Worst-case family generators and instance file I/O."""

import io
import json
import math
from fractions import Fraction
from random import Random

import pytest

from wsrpt.analysis import basic_ratio_closed
from wsrpt.core import Instance, Job, objective
from wsrpt.instances import (
    NestedParams,
    RANDOM_KINDS,
    ScenarioParams,
    gen_basic,
    gen_nested,
    gen_random,
    instance_from_dict,
    instance_to_dict,
    read_instance,
    write_instance,
)
from wsrpt.simulator import Policy, TieRule, is_equality_instance, simulate


class TestScenarioParams:
    def test_y_range(self):
        with pytest.raises(ValueError):
            ScenarioParams(y=Fraction(1), v=Fraction(1, 2))
        with pytest.raises(ValueError):
            ScenarioParams(y=Fraction(0), v=Fraction(0))

    def test_v_bounded_by_y(self):
        with pytest.raises(ValueError):
            ScenarioParams(y=Fraction(1, 2), v=Fraction(3, 4))

    def test_negative_z(self):
        with pytest.raises(ValueError):
            ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 2), z=Fraction(-1))


class TestGenBasic:
    def test_long_job_is_unit(self):
        inst = gen_basic(ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 2)))
        j0 = inst.job(0)
        assert (j0.release, j0.processing, j0.weight) == (0, 1, 1)

    def test_long_job_completes_at_one_unpreempted(self):
        params = ScenarioParams(y=Fraction(1, 2), v=Fraction(3, 10), delta=Fraction(1, 20))
        inst = gen_basic(params)
        for tie in (TieRule.PREFER_RUNNING, TieRule.SCRIPTED):
            sched = simulate(inst, tie=tie)
            assert sched.completion(0) == 1
            assert sum(1 for s in sched.slices if s.job == 0) == 1

    def test_ids_in_release_order_then_descending_ratio(self):
        params = ScenarioParams(
            y=Fraction(3, 5), v=Fraction(2, 5), z=Fraction(1, 2), delta=Fraction(1, 10)
        )
        inst = gen_basic(params)
        keys = [(j.release, -j.ratio) for j in inst.jobs]
        assert keys == sorted(keys)
        assert [j.id for j in inst.jobs] == list(range(len(inst.jobs)))

    def test_equality_instance_all_modes(self):
        for y, v, z in (
            (Fraction(1, 2), Fraction(1, 2), Fraction(0)),  # floor only
            (Fraction(1, 2), Fraction(3, 10), Fraction(0)),  # floor + wall
            (Fraction(2, 5), Fraction(2, 5), Fraction(3, 5)),  # floor + block
            (Fraction(3, 5), Fraction(2, 5), Fraction(1, 2)),  # all three
        ):
            inst = gen_basic(ScenarioParams(y=y, v=v, z=z, delta=Fraction(1, 25)))
            report = is_equality_instance(inst)
            assert report.passed, (y, v, z, report.violations[:3])

    def test_small_work_totals(self):
        # total small length = v + (1+z)(y-v)/(1-y) + z, up to grid rounding
        y, v, z = Fraction(3, 5), Fraction(2, 5), Fraction(1, 2)
        delta = Fraction(1, 50)
        inst = gen_basic(ScenarioParams(y=y, v=v, z=z, delta=delta))
        small = sum(j.processing for j in inst.jobs if j.id != 0)
        target = v + (1 + z) * (y - v) / (1 - y) + z
        assert abs(small - target) <= 2 * delta

    def test_small_work_totals_no_block(self):
        # with z=0 the wall density is 1/(1-y), so totals are v + (y-v)/(1-y)
        y, v = Fraction(3, 5), Fraction(2, 5)
        delta = Fraction(1, 50)
        inst = gen_basic(ScenarioParams(y=y, v=v, delta=delta))
        small = sum(j.processing for j in inst.jobs if j.id != 0)
        target = v + (y - v) / (1 - y)
        assert abs(small - target) <= 2 * delta

    def test_weight_converges_to_closed_form(self):
        # discretized small-job weight approaches the closed-form W minus
        # the long job's unit weight as the grid refines
        y, v = Fraction(1, 2), Fraction(3, 10)
        closed = basic_ratio_closed(float(y), float(v)).W - 1.0
        errors = []
        for delta in (Fraction(1, 20), Fraction(1, 60), Fraction(1, 180)):
            inst = gen_basic(ScenarioParams(y=y, v=v, delta=delta))
            total = float(sum(j.weight for j in inst.jobs if j.id != 0))
            errors.append(abs(total - closed))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 2e-2

    def test_snapping_flagged(self):
        # y=0.8157 does not sit on the 1/100 grid; tags must say so
        inst = gen_basic(ScenarioParams(y=Fraction(8157, 10000), v=Fraction(7066, 10000)))
        assert inst.tags["snapped"] is True
        inst2 = gen_basic(ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 4), delta=Fraction(1, 4)))
        assert inst2.tags["snapped"] is False


class TestGenNested:
    def _params(self, p_s=Fraction(50)):
        outer = ScenarioParams(y=Fraction(1, 2), v=Fraction(1, 2), delta=Fraction(1, 20))
        inner = ScenarioParams(y=Fraction(2, 5), v=Fraction(2, 5), delta=Fraction(1, 20))
        return NestedParams(outer=outer, r_s=Fraction(3, 10), p_s=p_s, inner=inner)

    def test_two_long_jobs(self):
        params = self._params()
        inst = gen_nested(params)
        outer_long = [j for j in inst.jobs if j.processing == 1 and j.release == 0]
        inner_long = [j for j in inst.jobs if j.processing == params.p_s]
        assert len(outer_long) == 1 and outer_long[0].id == 0
        assert len(inner_long) == 1
        assert inner_long[0].release == params.r_s
        assert inner_long[0].weight == params.p_s / (1 - params.r_s)

    def test_equality_instance(self):
        assert is_equality_instance(gen_nested(self._params())).passed

    def test_no_outer_releases_after_inner_opens(self):
        params = self._params()
        inst = gen_nested(params)
        inner_long = max(inst.jobs, key=lambda j: j.processing)
        # every job released at or after r_s belongs to the scaled inner family
        for j in inst.jobs:
            if j.id in (0, inner_long.id) or j.release < params.r_s:
                continue
            assert params.r_s <= j.release <= params.r_s + params.p_s * params.inner.y

    def test_precondition_enforced(self):
        with pytest.raises(ValueError):
            gen_nested(self._params(p_s=Fraction(1, 1000)))


class TestGenRandom:
    def test_deterministic(self):
        a = gen_random(Random(42), 6)
        b = gen_random(Random(42), 6)
        assert a.jobs == b.jobs

    def test_kinds(self):
        rng = Random(7)
        unit = gen_random(rng, 5, "unit-weight")
        assert all(j.weight == 1 for j in unit.jobs)
        flat = gen_random(rng, 5, "zero-release")
        assert all(j.release == 0 for j in flat.jobs)
        with pytest.raises(ValueError):
            gen_random(rng, 5, "bogus")

    def test_seed42_ratio_inside_envelope(self):
        from wsrpt.fuzz import evaluate_instance

        ratio = evaluate_instance(gen_random(Random(42), 6))
        assert 1 <= ratio <= Fraction(12259, 10000) + Fraction(1, 10**6)


class TestFileIO:
    def test_round_trip_file(self, tmp_path):
        inst = gen_basic(
            ScenarioParams(y=Fraction(1, 2), v=Fraction(3, 10), delta=Fraction(1, 10))
        )
        path = tmp_path / "inst.json"
        write_instance(inst, path)
        back = read_instance(path)
        assert back.jobs == inst.jobs
        assert back.tie_script == inst.tie_script
        assert dict(back.tags) == dict(inst.tags)

    def test_json_field_names(self):
        buf = io.StringIO()
        write_instance(Instance((Job(0, 0, 1, 1),), tie_script=((Fraction(0), 0),)), buf)
        payload = json.loads(buf.getvalue())
        assert set(payload["jobs"][0]) == {"id", "r", "p", "w"}
        assert payload["tie_script"] == [{"t": "0", "choice": 0}]

    def test_rational_strings_parsed_exactly(self):
        payload = {
            "jobs": [{"id": 0, "r": "1/3", "p": "0.25", "w": "2"}],
        }
        inst = instance_from_dict(payload)
        j = inst.jobs[0]
        assert (j.release, j.processing, j.weight) == (
            Fraction(1, 3),
            Fraction(1, 4),
            Fraction(2),
        )

    def test_missing_field_errors(self):
        with pytest.raises(KeyError):
            instance_from_dict({"jobs": [{"id": 0, "r": "0", "p": "1"}]})

    def test_to_dict_round_trip(self):
        inst = gen_random(Random(3), 4)
        assert instance_from_dict(instance_to_dict(inst)).jobs == inst.jobs
