"""Exact feasibility checking of flows over time.

A flow is feasible for an instance when three families of conditions
hold:

* capacity: on every arc, the commodities' rates sum to at most the arc
  capacity at every instant;
* conservation: for each commodity, at every node other than its source,
  the cumulative balance (inflow shifted by transit times, minus outflow)
  is nonnegative at every time; when storage is forbidden the balance
  must be exactly zero at nodes other than the commodity's source and
  sink;
* demand: at the horizon T, counting only flow that has fully arrived
  (inflow integrated to T minus the arc's transit), each commodity's
  balance is +demand at its sink, -demand at its source and 0 elsewhere.

Rates are piecewise constant, so each cumulative balance is a piecewise
linear function of time. A piecewise linear function is nonnegative
(or identically zero) on an interval if and only if it is so at its
breakpoints, which is why checking the finitely many breakpoints below
is exact and complete, not a sampling heuristic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    FlowOverTime,
    Instance,
    StepFunction,
    StorageMode,
    format_rational,
    rational,
)

__all__ = [
    "CAPACITY",
    "CONSERVATION",
    "STRICT_CONSERVATION",
    "DEMAND",
    "Violation",
    "ViolationReport",
    "check_capacity",
    "check_conservation",
    "check_demands",
    "check_flow",
    "cumulative",
]

CAPACITY = "capacity"
CONSERVATION = "conservation"
STRICT_CONSERVATION = "strict-conservation"
DEMAND = "demand"

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Violation:
    """One violated feasibility condition.

    location is an arc id for capacity violations and a node id
    otherwise. commodity is None when the condition aggregates over all
    commodities (capacity). start == end denotes a single time point.
    The magnitude is the exact rational amount by which the condition
    fails.
    """

    kind: str
    location: str
    commodity: int | None
    start: Fraction
    end: Fraction
    magnitude: Fraction

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "location": self.location,
                "commodity": self.commodity,
                "from": format_rational(self.start),
                "to": format_rational(self.end),
                "magnitude": format_rational(self.magnitude),
            }
        )


@dataclass(frozen=True)
class ViolationReport:
    """All violations found by a check; empty exactly when feasible."""

    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def of_kind(self, kind: str) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.kind == kind)

    def to_json_lines(self) -> str:
        return "".join(v.to_json() + "\n" for v in self.violations)


def cumulative(rate: StepFunction, theta: int | Fraction) -> Fraction:
    """Integral of the rate over [0, min(theta, domain end)], exactly.

    theta beyond the domain end evaluates the full integral; a negative
    theta raises ValueError.
    """
    theta = rational(theta)
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    total = _ZERO
    for piece in rate.pieces:
        upper = theta if theta < piece.end else piece.end
        if upper > piece.start:
            total += piece.rate * (upper - piece.start)
    return total


def _require_consistent(flow: FlowOverTime, instance: Instance) -> None:
    """Raise ValueError when the flow references unknown arcs or commodities."""
    arc_ids = instance.network.arc_by_id
    commodity_count = len(instance.commodities)
    for arc_id, commodity in flow.rates:
        if arc_id not in arc_ids:
            raise ValueError(f"flow references unknown arc {arc_id!r}")
        if not 0 <= commodity < commodity_count:
            raise ValueError(f"flow references unknown commodity {commodity}")


def check_capacity(flow: FlowOverTime, instance: Instance) -> ViolationReport:
    """Compare total rates against capacity on each arc.

    One violation is emitted per arc and per maximal time interval on
    which the commodities' total rate is constant and exceeds capacity;
    its magnitude is the excess over capacity.
    """
    _require_consistent(flow, instance)
    violations: list[Violation] = []
    commodity_count = len(instance.commodities)
    for arc in instance.network.arcs:
        steps = [
            step
            for i in range(commodity_count)
            if (step := flow.rates.get((arc.id, i))) is not None
        ]
        points = sorted(
            {point for step in steps for piece in step.pieces for point in (piece.start, piece.end)}
        )
        if not points:
            continue
        # Total rate on each elementary interval, merging adjacent
        # intervals with equal totals so reported intervals are maximal.
        merged: list[tuple[Fraction, Fraction, Fraction]] = []
        for lo, hi in zip(points, points[1:]):
            total = _ZERO
            for step in steps:
                for piece in step.pieces:
                    if piece.start <= lo and hi <= piece.end:
                        total += piece.rate
            if merged and merged[-1][1] == lo and merged[-1][2] == total:
                merged[-1] = (merged[-1][0], hi, total)
            else:
                merged.append((lo, hi, total))
        for lo, hi, total in merged:
            if total > arc.capacity:
                violations.append(
                    Violation(CAPACITY, arc.id, None, lo, hi, total - arc.capacity)
                )
    return ViolationReport(tuple(violations))


def _balance(
    flow: FlowOverTime,
    instance: Instance,
    commodity: int,
    node: str,
    theta: Fraction,
) -> Fraction:
    """Cumulative balance of one commodity at one node at time theta.

    Inflow on an arc counts what entered the arc up to theta minus its
    transit time, i.e. what has fully arrived by theta; outflow counts
    everything sent up to theta.
    """
    total = _ZERO
    for arc in instance.network.in_arcs[node]:
        step = flow.rates.get((arc.id, commodity))
        if step is not None and theta > arc.transit:
            total += cumulative(step, theta - arc.transit)
    for arc in instance.network.out_arcs[node]:
        step = flow.rates.get((arc.id, commodity))
        if step is not None:
            total -= cumulative(step, theta)
    return total


def check_conservation(
    flow: FlowOverTime, instance: Instance, mode: StorageMode
) -> ViolationReport:
    """Check cumulative balances at every node except each commodity's source.

    The balance must be nonnegative at all times (flow cannot leave a
    node before it arrived there). With NO_INTERMEDIATE_STORAGE it must
    additionally be exactly zero at nodes other than the commodity's
    source and sink; a positive balance there means flow was stored and
    is reported as a strict-conservation violation.
    """
    _require_consistent(flow, instance)
    violations: list[Violation] = []
    horizon = flow.horizon
    strict = mode is StorageMode.NO_INTERMEDIATE_STORAGE
    for index, commodity in enumerate(instance.commodities):
        for node in instance.network.nodes:
            if node == commodity.source:
                continue
            points: set[Fraction] = {horizon}
            relevant = False
            for arc in instance.network.in_arcs[node]:
                step = flow.rates.get((arc.id, index))
                if step is not None:
                    relevant = True
                    for piece in step.pieces:
                        points.add(piece.start + arc.transit)
                        points.add(piece.end + arc.transit)
            for arc in instance.network.out_arcs[node]:
                step = flow.rates.get((arc.id, index))
                if step is not None:
                    relevant = True
                    for piece in step.pieces:
                        points.add(piece.start)
                        points.add(piece.end)
            if not relevant:
                continue
            for theta in sorted(p for p in points if 0 < p <= horizon):
                balance = _balance(flow, instance, index, node, theta)
                if balance < 0:
                    violations.append(
                        Violation(CONSERVATION, node, index, theta, theta, -balance)
                    )
                elif strict and balance > 0 and node != commodity.sink:
                    violations.append(
                        Violation(STRICT_CONSERVATION, node, index, theta, theta, balance)
                    )
    return ViolationReport(tuple(violations))


def check_demands(flow: FlowOverTime, instance: Instance) -> ViolationReport:
    """Check final balances at the horizon against the demands.

    Counting arrivals through T minus each arc's transit time, commodity
    i must show +demand at its sink, -demand at its source and zero at
    every other node. The violation magnitude is the absolute deviation.
    """
    _require_consistent(flow, instance)
    violations: list[Violation] = []
    horizon = flow.horizon
    for index, commodity in enumerate(instance.commodities):
        for node in instance.network.nodes:
            if node == commodity.sink:
                expected = commodity.demand
            elif node == commodity.source:
                expected = -commodity.demand
            else:
                expected = _ZERO
            touched = any(
                (arc.id, index) in flow.rates
                for arc in instance.network.in_arcs[node] + instance.network.out_arcs[node]
            )
            if not touched and expected == 0:
                continue
            balance = _balance(flow, instance, index, node, horizon)
            if balance != expected:
                violations.append(
                    Violation(
                        DEMAND, node, index, horizon, horizon, abs(balance - expected)
                    )
                )
    return ViolationReport(tuple(violations))


def check_flow(flow: FlowOverTime, instance: Instance, mode: StorageMode) -> ViolationReport:
    """Union of capacity, conservation and demand checks."""
    return ViolationReport(
        check_capacity(flow, instance).violations
        + check_conservation(flow, instance, mode).violations
        + check_demands(flow, instance).violations
    )
