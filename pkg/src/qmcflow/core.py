"""Domain model for multi-commodity flows over time.

A network carries directed arcs with a flow-rate capacity and an integer
transit time. Commodities are (source, sink, demand) triples routed
separately while sharing arc capacities. A flow over time assigns each
(arc, commodity) pair a piecewise-constant rate function on [0, T): flow
entering an arc at time theta leaves its head at theta plus the transit
time.

All quantities are exact rationals (fractions.Fraction). Floats are
rejected at the boundaries so that feasibility verdicts computed
downstream are exact, never approximate.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from heapq import heappop, heappush
from typing import Iterable, Mapping

__all__ = [
    "Arc",
    "Commodity",
    "Defect",
    "FlowOverTime",
    "Instance",
    "Network",
    "ParseError",
    "Piece",
    "StepFunction",
    "StorageMode",
    "ValidationReport",
    "format_rational",
    "parse_flow",
    "parse_instance",
    "rational",
    "reachable_nodes",
    "serialize_flow",
    "serialize_instance",
    "shortest_transit",
    "step_function",
    "validate_instance",
]

_RATIONAL_RE = re.compile(r"^-?\d+(?:/\d+)?$")

_ZERO = Fraction(0)


class ParseError(ValueError):
    """An instance or flow document does not match the file format.

    The message names the offending JSON path, or the line and column
    for syntax errors.
    """


def rational(value: int | str | Fraction) -> Fraction:
    """Coerce an exact value to a Fraction.

    Accepts ints, Fractions and strings of the form "p" or "p/q" with a
    positive denominator. Floats are rejected: binary floats would smuggle
    rounding error into otherwise exact arithmetic.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational values")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise ValueError(f"not a rational literal: {value!r}")
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ValueError(f"denominator must be positive: {value!r}")
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    raise TypeError(f"expected int, str or Fraction, got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "p" for integers, "p/q" otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Arc:
    """Directed arc with a rate capacity and an integer transit time.

    Parallel arcs are permitted; the id distinguishes them.
    """

    id: str
    tail: str
    head: str
    capacity: Fraction
    transit: int


@dataclass(frozen=True)
class Network:
    """Directed multigraph. Constructors do not validate; see validate_instance."""

    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...]

    @cached_property
    def node_set(self) -> frozenset[str]:
        return frozenset(self.nodes)

    @cached_property
    def arc_by_id(self) -> dict[str, Arc]:
        table: dict[str, Arc] = {}
        for arc in self.arcs:
            table.setdefault(arc.id, arc)
        return table

    @cached_property
    def out_arcs(self) -> dict[str, tuple[Arc, ...]]:
        table: dict[str, list[Arc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            table.setdefault(arc.tail, []).append(arc)
            table.setdefault(arc.head, [])
        return {node: tuple(arcs) for node, arcs in table.items()}

    @cached_property
    def in_arcs(self) -> dict[str, tuple[Arc, ...]]:
        table: dict[str, list[Arc]] = {node: [] for node in self.nodes}
        for arc in self.arcs:
            table.setdefault(arc.head, []).append(arc)
            table.setdefault(arc.tail, [])
        return {node: tuple(arcs) for node, arcs in table.items()}


@dataclass(frozen=True)
class Commodity:
    """One demand to route: ship `demand` units from source to sink."""

    source: str
    sink: str
    demand: Fraction


@dataclass(frozen=True)
class Instance:
    """A network together with an ordered list of commodities.

    Commodity identity is positional: commodity i is commodities[i].
    """

    network: Network
    commodities: tuple[Commodity, ...]


class StorageMode(Enum):
    """Whether flow may wait at intermediate nodes.

    WITH_STORAGE allows flow to pause anywhere. NO_INTERMEDIATE_STORAGE
    requires flow to leave every node other than its own source and sink
    the moment it arrives; cumulative inflow must equal cumulative
    outflow there at all times.
    """

    WITH_STORAGE = "with-storage"
    NO_INTERMEDIATE_STORAGE = "no-storage"


@dataclass(frozen=True)
class Piece:
    """Constant rate on the half-open interval [start, end)."""

    start: Fraction
    end: Fraction
    rate: Fraction


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant rate on [0, domain_end); gaps mean rate zero.

    Pieces must be sorted, pairwise disjoint, nonempty and contained in
    the domain; rates are nonnegative. Construction enforces this, so a
    StepFunction in hand is always structurally valid.
    """

    domain_end: Fraction
    pieces: tuple[Piece, ...]

    def __post_init__(self) -> None:
        if self.domain_end <= 0:
            raise ValueError("domain end must be positive")
        previous_end = _ZERO
        for index, piece in enumerate(self.pieces):
            if piece.rate < 0:
                raise ValueError(f"piece {index}: rate must be nonnegative")
            if piece.start < 0 or piece.end > self.domain_end:
                raise ValueError(f"piece {index}: not contained in [0, {self.domain_end})")
            if piece.start >= piece.end:
                raise ValueError(f"piece {index}: empty or reversed interval")
            if piece.start < previous_end:
                raise ValueError(f"piece {index}: overlaps or is out of order")
            previous_end = piece.end


def step_function(
    domain_end: int | str | Fraction,
    pieces: Iterable[tuple[int | str | Fraction, int | str | Fraction, int | str | Fraction]] = (),
) -> StepFunction:
    """Convenience constructor coercing piece triples to exact rationals."""
    return StepFunction(
        rational(domain_end),
        tuple(Piece(rational(s), rational(e), rational(r)) for s, e, r in pieces),
    )


@dataclass(frozen=True)
class FlowOverTime:
    """Flow rates keyed by (arc id, commodity index); absent pairs are zero.

    Every rate function's domain end must equal the horizon. Whether the
    referenced arcs and commodities exist is checked against an instance
    by the checker operations, not here.
    """

    horizon: Fraction
    rates: dict[tuple[str, int], StepFunction]

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        for key, step in self.rates.items():
            if step.domain_end != self.horizon:
                raise ValueError(
                    f"rate for {key!r}: domain end {step.domain_end} differs from horizon {self.horizon}"
                )


@dataclass(frozen=True)
class Defect:
    """One violated instance invariant, naming the offending element."""

    invariant: str
    element: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    defects: tuple[Defect, ...]

    @property
    def ok(self) -> bool:
        return not self.defects

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(f"{d.invariant}: {d.element}: {d.detail}" for d in self.defects)


def validate_instance(instance: Instance) -> ValidationReport:
    """Check every instance invariant and report all defects found.

    Covered: unique node and arc ids, arc endpoints exist, no self-loops,
    nonnegative capacities, nonnegative integer transit times, commodity
    endpoints exist and differ, nonnegative demands, and a directed path
    from every commodity's source to its sink.
    """
    defects: list[Defect] = []
    network = instance.network

    seen_nodes: set[str] = set()
    for node in network.nodes:
        if node in seen_nodes:
            defects.append(Defect("duplicate node id", node, "node listed more than once"))
        seen_nodes.add(node)

    seen_arcs: set[str] = set()
    for arc in network.arcs:
        if arc.id in seen_arcs:
            defects.append(Defect("duplicate arc id", arc.id, "arc id used more than once"))
        seen_arcs.add(arc.id)
        for endpoint in (arc.tail, arc.head):
            if endpoint not in seen_nodes:
                defects.append(
                    Defect("unknown arc endpoint", arc.id, f"node {endpoint!r} is not in the network")
                )
        if arc.tail == arc.head:
            defects.append(Defect("self-loop", arc.id, f"tail and head are both {arc.tail!r}"))
        if arc.capacity < 0:
            defects.append(Defect("negative capacity", arc.id, f"capacity {arc.capacity} is negative"))
        if isinstance(arc.transit, bool) or not isinstance(arc.transit, int):
            defects.append(Defect("non-integer transit", arc.id, f"transit {arc.transit!r} is not an integer"))
        elif arc.transit < 0:
            defects.append(Defect("negative transit", arc.id, f"transit {arc.transit} is negative"))

    for index, commodity in enumerate(instance.commodities):
        element = f"commodity {index}"
        endpoints_known = True
        for endpoint in (commodity.source, commodity.sink):
            if endpoint not in network.node_set:
                defects.append(
                    Defect("unknown commodity endpoint", element, f"node {endpoint!r} is not in the network")
                )
                endpoints_known = False
        if commodity.source == commodity.sink:
            defects.append(
                Defect("source equals sink", element, f"both endpoints are {commodity.source!r}")
            )
        if commodity.demand < 0:
            defects.append(Defect("negative demand", element, f"demand {commodity.demand} is negative"))
        if endpoints_known and commodity.source != commodity.sink:
            if commodity.sink not in reachable_nodes(network, commodity.source):
                defects.append(
                    Defect(
                        "sink unreachable",
                        element,
                        f"no directed path from {commodity.source!r} to {commodity.sink!r}",
                    )
                )

    return ValidationReport(tuple(defects))


def reachable_nodes(network: Network, source: str) -> frozenset[str]:
    """Nodes reachable from source by directed arcs, including source."""
    if source not in network.node_set:
        raise ValueError(f"unknown node: {source!r}")
    seen = {source}
    frontier = [source]
    while frontier:
        node = frontier.pop()
        for arc in network.out_arcs.get(node, ()):
            if arc.head not in seen:
                seen.add(arc.head)
                frontier.append(arc.head)
    return frozenset(seen)


def shortest_transit(network: Network, source: str, sink: str) -> int | None:
    """Smallest total transit time of a directed path, or None if unreachable.

    Transit times are nonnegative integers, so this is a plain Dijkstra
    search. source == sink gives 0. Unknown nodes raise ValueError.
    """
    for node in (source, sink):
        if node not in network.node_set:
            raise ValueError(f"unknown node: {node!r}")
    if source == sink:
        return 0
    best: dict[str, int] = {source: 0}
    heap: list[tuple[int, str]] = [(0, source)]
    while heap:
        dist, node = heappop(heap)
        if node == sink:
            return dist
        if dist > best.get(node, dist):
            continue
        for arc in network.out_arcs.get(node, ()):
            candidate = dist + arc.transit
            if candidate < best.get(arc.head, candidate + 1):
                best[arc.head] = candidate
                heappush(heap, (candidate, arc.head))
    return None


# --- file formats ---------------------------------------------------------
#
# Instance documents:
#   {"nodes": ["v0", ...],
#    "arcs": [{"id": "a0", "tail": "v0", "head": "v1",
#              "capacity": "1", "transit": 1}, ...],
#    "commodities": [{"source": "v0", "sink": "v3", "demand": "2"}, ...]}
#
# Flow documents:
#   {"horizon": "5",
#    "rates": [{"arc": "a0", "commodity": 0,
#               "pieces": [{"from": "0", "to": "2", "rate": "1"}]}, ...]}
#
# Rationals are JSON integers or strings "p/q" with q > 0. Transit times
# must be integers; a fractional transit is rejected outright.


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _require(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise ParseError(f"{path}: {message}")


def _get(obj: dict, key: str, path: str):
    _require(isinstance(obj, dict), path, "must be a JSON object")
    _require(key in obj, path, f"missing required key {key!r}")
    return obj[key]


def _string_field(obj: dict, key: str, path: str) -> str:
    value = _get(obj, key, path)
    _require(isinstance(value, str), f"{path}.{key}", "must be a string")
    return value


def _rational_field(obj: dict, key: str, path: str) -> Fraction:
    value = _get(obj, key, path)
    field = f"{path}.{key}"
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"{field}: must be an integer or a 'p/q' string (floats are not exact)")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return rational(value)
        except ValueError as exc:
            raise ParseError(f"{field}: {exc}") from None
    raise ParseError(f"{field}: must be an integer or a 'p/q' string")


def _integer_field(obj: dict, key: str, path: str) -> int:
    value = _rational_field(obj, key, path)
    if value.denominator != 1:
        raise ParseError(f"{path}.{key}: must be an integer, got {format_rational(value)}")
    return int(value)


def parse_instance(text: str) -> Instance:
    """Parse an instance document.

    Format-level constraints (shape, rational literals, sign of capacity,
    transit and demand) raise ParseError naming the offending path.
    Graph-level invariants are left to validate_instance.
    """
    doc = _load_json(text, "instance")
    _require(isinstance(doc, dict), "instance", "must be a JSON object")

    raw_nodes = _get(doc, "nodes", "instance")
    _require(isinstance(raw_nodes, list), "instance.nodes", "must be an array")
    nodes: list[str] = []
    for i, value in enumerate(raw_nodes):
        _require(isinstance(value, str), f"nodes[{i}]", "must be a string")
        nodes.append(value)

    raw_arcs = _get(doc, "arcs", "instance")
    _require(isinstance(raw_arcs, list), "instance.arcs", "must be an array")
    arcs: list[Arc] = []
    for i, raw in enumerate(raw_arcs):
        path = f"arcs[{i}]"
        _require(isinstance(raw, dict), path, "must be a JSON object")
        capacity = _rational_field(raw, "capacity", path)
        _require(capacity >= 0, f"{path}.capacity", "capacity must be nonnegative")
        transit = _integer_field(raw, "transit", path)
        _require(transit >= 0, f"{path}.transit", "transit must be nonnegative")
        arcs.append(
            Arc(
                id=_string_field(raw, "id", path),
                tail=_string_field(raw, "tail", path),
                head=_string_field(raw, "head", path),
                capacity=capacity,
                transit=transit,
            )
        )

    raw_commodities = _get(doc, "commodities", "instance")
    _require(isinstance(raw_commodities, list), "instance.commodities", "must be an array")
    commodities: list[Commodity] = []
    for i, raw in enumerate(raw_commodities):
        path = f"commodities[{i}]"
        _require(isinstance(raw, dict), path, "must be a JSON object")
        demand = _rational_field(raw, "demand", path)
        _require(demand >= 0, f"{path}.demand", "demand must be nonnegative")
        commodities.append(
            Commodity(
                source=_string_field(raw, "source", path),
                sink=_string_field(raw, "sink", path),
                demand=demand,
            )
        )

    return Instance(Network(tuple(nodes), tuple(arcs)), tuple(commodities))


def serialize_instance(instance: Instance) -> str:
    """Render an instance document; parse_instance inverts this exactly."""
    doc = {
        "nodes": list(instance.network.nodes),
        "arcs": [
            {
                "id": arc.id,
                "tail": arc.tail,
                "head": arc.head,
                "capacity": format_rational(arc.capacity),
                "transit": arc.transit,
            }
            for arc in instance.network.arcs
        ],
        "commodities": [
            {
                "source": commodity.source,
                "sink": commodity.sink,
                "demand": format_rational(commodity.demand),
            }
            for commodity in instance.commodities
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_flow(text: str) -> FlowOverTime:
    """Parse a flow document. Structural defects raise ParseError."""
    doc = _load_json(text, "flow")
    _require(isinstance(doc, dict), "flow", "must be a JSON object")

    horizon = _rational_field(doc, "horizon", "flow")
    _require(horizon > 0, "flow.horizon", "horizon must be positive")

    raw_rates = _get(doc, "rates", "flow")
    _require(isinstance(raw_rates, list), "flow.rates", "must be an array")

    rates: dict[tuple[str, int], StepFunction] = {}
    for i, raw in enumerate(raw_rates):
        path = f"rates[{i}]"
        _require(isinstance(raw, dict), path, "must be a JSON object")
        arc_id = _string_field(raw, "arc", path)
        commodity = _integer_field(raw, "commodity", path)
        _require(commodity >= 0, f"{path}.commodity", "commodity index must be nonnegative")
        key = (arc_id, commodity)
        _require(key not in rates, path, f"duplicate rate entry for arc {arc_id!r}, commodity {commodity}")

        raw_pieces = _get(raw, "pieces", path)
        _require(isinstance(raw_pieces, list), f"{path}.pieces", "must be an array")
        pieces: list[Piece] = []
        for j, raw_piece in enumerate(raw_pieces):
            piece_path = f"{path}.pieces[{j}]"
            _require(isinstance(raw_piece, dict), piece_path, "must be a JSON object")
            start = _rational_field(raw_piece, "from", piece_path)
            end = _rational_field(raw_piece, "to", piece_path)
            rate = _rational_field(raw_piece, "rate", piece_path)
            _require(start >= 0, f"{piece_path}.from", "must be nonnegative")
            _require(rate >= 0, f"{piece_path}.rate", "rate must be nonnegative")
            pieces.append(Piece(start, end, rate))
        try:
            rates[key] = StepFunction(horizon, tuple(pieces))
        except ValueError as exc:
            raise ParseError(f"{path}.pieces: {exc}") from None

    try:
        return FlowOverTime(horizon, rates)
    except ValueError as exc:
        raise ParseError(f"flow: {exc}") from None


def serialize_flow(flow: FlowOverTime) -> str:
    """Render a flow document; entries are sorted for stable output."""
    doc = {
        "horizon": format_rational(flow.horizon),
        "rates": [
            {
                "arc": arc_id,
                "commodity": commodity,
                "pieces": [
                    {
                        "from": format_rational(piece.start),
                        "to": format_rational(piece.end),
                        "rate": format_rational(piece.rate),
                    }
                    for piece in flow.rates[arc_id, commodity].pieces
                ],
            }
            for arc_id, commodity in sorted(flow.rates)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
