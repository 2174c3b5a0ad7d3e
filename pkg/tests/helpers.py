"""Shared test utilities: flow truncation and flow-to-LP transcription."""

from __future__ import annotations

from fractions import Fraction

from qmcflow.checker import cumulative
from qmcflow.core import FlowOverTime, Piece, StepFunction
from qmcflow.expansion import ExpandedNetwork

ZERO = Fraction(0)


def truncate_flow(flow: FlowOverTime, horizon: int | Fraction) -> FlowOverTime:
    """Clip every rate function to [0, horizon), dropping emptied entries."""
    end = Fraction(horizon)
    rates: dict[tuple[str, int], StepFunction] = {}
    for key, step in flow.rates.items():
        pieces = tuple(
            Piece(p.start, min(p.end, end), p.rate) for p in step.pieces if p.start < end
        )
        if pieces:
            rates[key] = StepFunction(end, pieces)
    return FlowOverTime(end, rates)


def _delivered(flow: FlowOverTime, arc_id: str, commodity: int, transit: int, t: int) -> Fraction:
    """Amount of the commodity that has exited the arc by time t."""
    step = flow.rates.get((arc_id, commodity))
    if step is None or t <= transit:
        return ZERO
    return cumulative(step, t - transit)


def _departed(flow: FlowOverTime, arc_id: str, commodity: int, t: int) -> Fraction:
    step = flow.rates.get((arc_id, commodity))
    if step is None or t <= 0:
        return ZERO
    return cumulative(step, t)


def assignment_from_flow(expansion: ExpandedNetwork, flow: FlowOverTime) -> list[Fraction]:
    """Transcribe a unit-interval-constant flow into LP variable values.

    Movement variables take the amount entering the arc during
    [theta, theta+1). Holdover variables take the amount of the
    commodity parked at the node during that interval, where supply not
    yet injected counts as parked at the source. The list is indexed
    exactly like the columns of feasibility_lp_from_expansion, so a
    feasible schedule should produce an assignment every LP row accepts.
    """
    network = expansion.instance.network
    values: list[Fraction] = []
    for arc_id, theta, commodity in expansion.movement_variables:
        step = flow.rates.get((arc_id, commodity))
        if step is None:
            values.append(ZERO)
        else:
            values.append(cumulative(step, theta + 1) - cumulative(step, theta))
    for node, theta, commodity in expansion.holdover_variables:
        com = expansion.instance.commodities[commodity]
        held = ZERO
        for arc in network.in_arcs[node]:
            held += _delivered(flow, arc.id, commodity, arc.transit, theta + 1)
        for arc in network.out_arcs[node]:
            held -= _departed(flow, arc.id, commodity, theta + 1)
        if node == com.source:
            held += com.demand
        values.append(held)
    return values
