"""Feasibility checks: capacity, conservation, demands, and their union."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmcflow.checker import (
    CAPACITY,
    CONSERVATION,
    DEMAND,
    STRICT_CONSERVATION,
    check_capacity,
    check_conservation,
    check_demands,
    check_flow,
    cumulative,
)
from qmcflow.core import (
    Arc,
    Commodity,
    FlowOverTime,
    Instance,
    Network,
    Piece,
    StepFunction,
    StorageMode,
    step_function,
)
from qmcflow.instances import cycle_instance, wait_schedule_with_storage, wave_schedule_no_storage

from helpers import truncate_flow

WITH = StorageMode.WITH_STORAGE
WITHOUT = StorageMode.NO_INTERMEDIATE_STORAGE


def path_instance() -> Instance:
    """v0 -> v1 -> v2, unit capacities and transits, one commodity."""
    network = Network(
        ("v0", "v1", "v2"),
        (
            Arc("a0", "v0", "v1", Fraction(1), 1),
            Arc("a1", "v1", "v2", Fraction(1), 1),
        ),
    )
    return Instance(network, (Commodity("v0", "v2", Fraction(1)),))


class TestCumulative:
    def test_rectangle(self):
        step = step_function(2, [(0, 2, 1)])
        assert cumulative(step, Fraction(3, 2)) == Fraction(3, 2)

    def test_zero_function(self):
        step = step_function(5)
        assert cumulative(step, 3) == 0
        assert cumulative(step, Fraction(9, 2)) == 0

    def test_sum_of_pieces(self):
        step = step_function(10, [(0, 1, 1), (3, 4, 1)])
        assert cumulative(step, 10) == 2

    def test_beyond_domain_returns_full_integral(self):
        step = step_function(2, [(0, 2, 2)])
        assert cumulative(step, 100) == 4

    def test_negative_theta_rejected(self):
        with pytest.raises(ValueError):
            cumulative(step_function(2, [(0, 1, 1)]), -1)

    @given(st.integers(min_value=0, max_value=8), st.integers(min_value=0, max_value=8))
    def test_monotone_in_theta(self, a: int, b: int):
        step = step_function(8, [(0, 2, 2), (3, 5, 1)])
        lo, hi = sorted((a, b))
        assert cumulative(step, lo) <= cumulative(step, hi)


class TestCapacity:
    def test_wait_schedule_fits(self):
        assert check_capacity(wait_schedule_with_storage(4), cycle_instance(4)).ok

    def test_wave_schedule_fits(self):
        assert check_capacity(wave_schedule_no_storage(5), cycle_instance(5)).ok

    def test_two_commodities_overload_one_arc(self):
        instance = cycle_instance(3)
        horizon = Fraction(4)
        flow = FlowOverTime(
            horizon,
            {
                ("a0", 0): step_function(horizon, [(0, 1, 1)]),
                ("a0", 1): step_function(horizon, [(0, 1, 1)]),
            },
        )
        report = check_capacity(flow, instance)
        assert [
            (v.kind, v.location, v.commodity, v.start, v.end, v.magnitude)
            for v in report.violations
        ] == [(CAPACITY, "a0", None, 0, 1, 1)]

    def test_violation_intervals_are_maximal(self):
        instance = cycle_instance(3)
        horizon = Fraction(4)
        # Two overlapping pulses produce one constant stretch of excess.
        flow = FlowOverTime(
            horizon,
            {
                ("a0", 0): step_function(horizon, [(0, 2, 1)]),
                ("a0", 1): step_function(horizon, [(1, 3, 1)]),
            },
        )
        report = check_capacity(flow, instance)
        assert [(v.start, v.end, v.magnitude) for v in report.violations] == [(1, 2, 1)]

    @given(st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(3, 2)))
    def test_saturated_arc_perturbation(self, epsilon: Fraction):
        # The wave schedule saturates a0 on [0, 1); any upward bump on a
        # saturated stretch must surface as exactly one violation of the
        # same magnitude.
        instance = cycle_instance(4)
        flow = wave_schedule_no_storage(4)
        rates = dict(flow.rates)
        step = rates[("a0", 0)]
        first = step.pieces[0]
        bumped = (Piece(first.start, first.end, first.rate + epsilon),) + step.pieces[1:]
        rates[("a0", 0)] = StepFunction(step.domain_end, bumped)
        report = check_capacity(FlowOverTime(flow.horizon, rates), instance)
        assert [(v.location, v.start, v.end, v.magnitude) for v in report.violations] == [
            ("a0", first.start, first.end, epsilon)
        ]


class TestConservation:
    def test_wait_schedule_with_storage(self):
        assert check_conservation(wait_schedule_with_storage(4), cycle_instance(4), WITH).ok

    def test_wait_schedule_strict_mode_flags_v0(self):
        report = check_conservation(wait_schedule_with_storage(4), cycle_instance(4), WITHOUT)
        flagged = {(v.kind, v.location, v.commodity) for v in report.violations}
        assert flagged == {
            (STRICT_CONSERVATION, "v0", 2),
            (STRICT_CONSERVATION, "v0", 3),
        }

    @given(st.integers(min_value=3, max_value=8))
    def test_strict_violations_always_at_v0(self, k: int):
        report = check_conservation(wait_schedule_with_storage(k), cycle_instance(k), WITHOUT)
        assert {v.location for v in report.violations} == {"v0"}
        assert {v.commodity for v in report.violations} == set(range(2, k))
        assert all(v.kind == STRICT_CONSERVATION for v in report.violations)

    def test_sending_without_inflow_goes_negative(self):
        instance = path_instance()
        horizon = Fraction(3)
        flow = FlowOverTime(horizon, {("a1", 0): step_function(horizon, [(0, 1, 1)])})
        report = check_conservation(flow, instance, WITH)
        kinds = {(v.kind, v.location) for v in report.violations}
        assert (CONSERVATION, "v1") in kinds
        assert all(v.magnitude > 0 for v in report.violations)

    def test_wave_schedule_strict(self):
        assert check_conservation(wave_schedule_no_storage(4), cycle_instance(4), WITHOUT).ok

    def test_sink_storage_is_allowed_in_strict_mode(self):
        # Arriving early and sitting at the sink is not intermediate storage.
        instance = path_instance()
        horizon = Fraction(5)
        flow = FlowOverTime(
            horizon,
            {
                ("a0", 0): step_function(horizon, [(0, 1, 1)]),
                ("a1", 0): step_function(horizon, [(1, 2, 1)]),
            },
        )
        assert check_conservation(flow, instance, WITHOUT).ok


class TestDemands:
    @given(st.integers(min_value=3, max_value=8))
    def test_wait_schedule_delivers(self, k: int):
        assert check_demands(wait_schedule_with_storage(k), cycle_instance(k)).ok

    def test_truncated_schedule_misses_demands(self):
        flow = truncate_flow(wait_schedule_with_storage(4), 4)
        report = check_demands(flow, cycle_instance(4))
        assert not report.ok
        assert all(v.kind == DEMAND for v in report.violations)

    def test_empty_flow_misses_every_demand(self):
        instance = cycle_instance(3)
        report = check_demands(FlowOverTime(Fraction(4), {}), instance)
        by_sink = {(v.location, v.commodity): v.magnitude for v in report.violations}
        for index, commodity in enumerate(instance.commodities):
            assert by_sink[(commodity.sink, index)] == commodity.demand

    def test_overdelivery_is_flagged(self):
        instance = path_instance()
        horizon = Fraction(4)
        flow = FlowOverTime(
            horizon,
            {
                ("a0", 0): step_function(horizon, [(0, 2, 1)]),
                ("a1", 0): step_function(horizon, [(1, 3, 1)]),
            },
        )
        report = check_demands(flow, instance)
        assert any(v.location == "v2" and v.magnitude == 1 for v in report.violations)


class TestCheckFlow:
    def test_wait_schedule_modes(self):
        flow = wait_schedule_with_storage(5)
        instance = cycle_instance(5)
        assert check_flow(flow, instance, WITH).ok
        assert not check_flow(flow, instance, WITHOUT).ok

    def test_wave_schedule_strict(self):
        assert check_flow(wave_schedule_no_storage(5), cycle_instance(5), WITHOUT).ok

    @given(st.integers(min_value=3, max_value=7))
    def test_strict_mode_only_adds_violations(self, k: int):
        instance = cycle_instance(k)
        for flow in (wait_schedule_with_storage(k), wave_schedule_no_storage(k)):
            relaxed = check_flow(flow, instance, WITH).violations
            strict = check_flow(flow, instance, WITHOUT).violations
            assert set(relaxed) <= set(strict)

    def test_unknown_arc_is_structural(self):
        instance = cycle_instance(3)
        flow = FlowOverTime(Fraction(4), {("zz", 0): step_function(4, [(0, 1, 1)])})
        with pytest.raises(ValueError, match="unknown arc"):
            check_flow(flow, instance, WITH)

    def test_unknown_commodity_is_structural(self):
        instance = cycle_instance(3)
        flow = FlowOverTime(Fraction(4), {("a0", 7): step_function(4, [(0, 1, 1)])})
        with pytest.raises(ValueError, match="unknown commodity"):
            check_flow(flow, instance, WITH)

    def test_json_lines_are_parseable(self):
        import json

        flow = wait_schedule_with_storage(4)
        report = check_flow(flow, cycle_instance(4), WITHOUT)
        lines = report.to_json_lines().splitlines()
        assert len(lines) == len(report.violations)
        for line in lines:
            record = json.loads(line)
            assert record["kind"] == STRICT_CONSERVATION
            assert record["location"] == "v0"
