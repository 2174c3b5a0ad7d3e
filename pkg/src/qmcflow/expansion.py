"""Discrete time expansion of an instance over an integer horizon.

The expansion has one copy (v, theta) of every node for each integer
time theta in 0..T, and two kinds of arcs:

* movement copies (a, theta) from (tail(a), theta) to (head(a), theta +
  transit(a)), one for each theta in 0..T-transit(a)-1, with capacity
  equal to the arc capacity times the unit step. A unit of flow on the
  copy stands for flow entering arc a during [theta, theta+1).
* holdover arcs (v, theta) -> (v, theta+1) for theta in 0..T-1, with
  unbounded capacity, usable by a commodity only where its storage mask
  allows: everywhere when storage is permitted, and only at the
  commodity's own source and sink otherwise. Holdover at the source
  encodes free departure timing for the supply placed at (source, 0);
  holdover at the sink collects arrivals until the demand is read off at
  (sink, T).

With a unit step and integer transit times the expansion is exact for
schedules whose rates are constant on unit intervals: balances of such
schedules are piecewise linear with integer breakpoints, so constraints
checked at the grid points hold everywhere in between.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .core import FlowOverTime, Instance, Piece, StepFunction, StorageMode, format_rational, rational

__all__ = [
    "ExpansionConfig",
    "ExpandedNetwork",
    "build_time_expanded",
    "extract_flow_over_time",
]


@dataclass(frozen=True)
class ExpansionConfig:
    """Integer horizon, storage mode and the (fixed, unit) time step."""

    horizon: int
    mode: StorageMode
    step: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.horizon, bool) or not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if self.step != 1:
            raise ValueError("only the unit time step is supported")
        if not isinstance(self.mode, StorageMode):
            raise ValueError("mode must be a StorageMode")


@dataclass(frozen=True)
class ExpandedNetwork:
    """The time expansion of an instance; see the module docstring.

    movement_copies and holdover_arcs are sorted lexicographically, and
    holdover_nodes[i] is the set of nodes where commodity i may use
    holdover arcs. Variable enumeration methods define the canonical
    variable order used by the LP construction: all movement copies by
    (arc id, theta, commodity), then all permitted holdover arcs by
    (node, theta, commodity).
    """

    instance: Instance
    config: ExpansionConfig
    movement_copies: tuple[tuple[str, int], ...]
    holdover_arcs: tuple[tuple[str, int], ...]
    holdover_nodes: tuple[frozenset[str], ...]

    @property
    def horizon(self) -> int:
        return self.config.horizon

    @property
    def mode(self) -> StorageMode:
        return self.config.mode

    @cached_property
    def node_copies(self) -> tuple[tuple[str, int], ...]:
        return tuple(
            (node, theta)
            for node in self.instance.network.nodes
            for theta in range(self.horizon + 1)
        )

    def movement_capacity(self, arc_id: str) -> Fraction:
        return self.instance.network.arc_by_id[arc_id].capacity * self.config.step

    def holdover_allowed(self, node: str, commodity: int) -> bool:
        return node in self.holdover_nodes[commodity]

    @cached_property
    def movement_variables(self) -> tuple[tuple[str, int, int], ...]:
        count = len(self.instance.commodities)
        return tuple(
            (arc_id, theta, commodity)
            for arc_id, theta in self.movement_copies
            for commodity in range(count)
        )

    @cached_property
    def holdover_variables(self) -> tuple[tuple[str, int, int], ...]:
        count = len(self.instance.commodities)
        return tuple(
            (node, theta, commodity)
            for node, theta in self.holdover_arcs
            for commodity in range(count)
            if node in self.holdover_nodes[commodity]
        )

    def supplies(self) -> tuple[tuple[str, int, int, Fraction], ...]:
        """(node, theta, commodity, amount) for each commodity's supply."""
        return tuple(
            (commodity.source, 0, index, commodity.demand)
            for index, commodity in enumerate(self.instance.commodities)
        )

    def demands(self) -> tuple[tuple[str, int, int, Fraction], ...]:
        """(node, theta, commodity, amount) for each commodity's demand."""
        return tuple(
            (commodity.sink, self.horizon, index, commodity.demand)
            for index, commodity in enumerate(self.instance.commodities)
        )

    def describe(self) -> str:
        """Debug dump of copies and masks. Not a stable format."""
        network = self.instance.network
        lines = [
            f"time expansion: T={self.horizon} mode={self.mode.value} step={self.config.step}",
            f"node copies: {len(network.nodes)} nodes x {self.horizon + 1} layers"
            f" = {len(self.node_copies)}",
            f"movement copies: {len(self.movement_copies)}",
        ]
        for arc_id, theta in self.movement_copies:
            arc = network.arc_by_id[arc_id]
            lines.append(
                f"  {arc_id}@{theta}: ({arc.tail},{theta}) -> ({arc.head},{theta + arc.transit})"
                f" cap {format_rational(self.movement_capacity(arc_id))}"
            )
        lines.append(f"holdover arcs: {len(self.holdover_arcs)}")
        count = len(self.instance.commodities)
        for node, theta in self.holdover_arcs:
            allowed = ",".join(str(i) for i in range(count) if self.holdover_allowed(node, i))
            lines.append(f"  {node}@{theta} -> {node}@{theta + 1} commodities [{allowed}]")
        return "\n".join(lines) + "\n"


def build_time_expanded(instance: Instance, config: ExpansionConfig) -> ExpandedNetwork:
    """Construct the time expansion. The instance must be valid.

    Raises ValueError for non-integer transit times; everything else is
    assumed validated. A horizon too short for any movement simply
    yields an expansion with no movement copies.
    """
    network = instance.network
    for arc in network.arcs:
        if isinstance(arc.transit, bool) or not isinstance(arc.transit, int) or arc.transit < 0:
            raise ValueError(f"arc {arc.id!r}: transit must be a nonnegative integer")

    horizon = config.horizon
    movement = sorted(
        (arc.id, theta) for arc in network.arcs for theta in range(max(0, horizon - arc.transit))
    )
    holdover = sorted((node, theta) for node in network.nodes for theta in range(horizon))
    if config.mode is StorageMode.WITH_STORAGE:
        masks = tuple(frozenset(network.nodes) for _ in instance.commodities)
    else:
        masks = tuple(
            frozenset({commodity.source, commodity.sink}) for commodity in instance.commodities
        )
    return ExpandedNetwork(instance, config, tuple(movement), tuple(holdover), masks)


def extract_flow_over_time(
    static_solution: Mapping[tuple[str, int, int], Fraction | int],
    expansion: ExpandedNetwork,
) -> FlowOverTime:
    """Turn a static solution of the expansion into a flow over time.

    The mapping is keyed by (arc id, theta, commodity) over movement
    copies; a value x becomes rate x on [theta, theta+1). Holdover flows
    are node storage and produce no arc rates, so they are simply not
    part of the mapping. Unknown copies and negative values raise
    ValueError.
    """
    movement = set(expansion.movement_copies)
    commodity_count = len(expansion.instance.commodities)
    grouped: dict[tuple[str, int], list[tuple[int, Fraction]]] = {}
    for key, raw in static_solution.items():
        try:
            arc_id, theta, commodity = key
        except (TypeError, ValueError):
            raise ValueError(f"malformed key {key!r}; expected (arc id, theta, commodity)") from None
        if (arc_id, theta) not in movement or not 0 <= commodity < commodity_count:
            raise ValueError(f"unknown movement copy {key!r}")
        value = rational(raw)
        if value < 0:
            raise ValueError(f"negative flow {value} on copy {key!r}")
        if value == 0:
            continue
        grouped.setdefault((arc_id, commodity), []).append((theta, value))

    horizon = Fraction(expansion.horizon)
    rates = {
        key: StepFunction(
            horizon,
            tuple(
                Piece(Fraction(theta), Fraction(theta + 1), value)
                for theta, value in sorted(entries)
            ),
        )
        for key, entries in sorted(grouped.items())
    }
    return FlowOverTime(horizon, rates)
