"""LP feasibility over exact rationals and minimum horizon search.

The time expansion turns schedule feasibility into a static linear
feasibility problem: one capacity row per movement copy (the commodities'
copy flows sum to at most the copy capacity) and one flow conservation
equality per (commodity, node copy), with supplies entering at
(source, 0) and demands leaving at (sink, T). Variables follow the
expansion's canonical order, movement copies first, then holdover arcs.

Feasibility is decided by a phase-one simplex over Fraction arithmetic:
artificial variables are attached to the equality rows and their sum is
minimized; the problem is feasible exactly when that minimum is zero.
Artificials on zero right-hand sides start at value zero and are pinned
there (fixed variables: excluded from the objective and from pricing,
blocking the ratio test in either direction), so the objective carries
only the genuine supply and demand residuals; without this, the many
zero balance rows of a time expansion drown phase one in degenerate
bookkeeping pivots. Pivoting is deterministic. The entering rule is
largest reduced cost with smallest-index tie break, switching to Bland's
smallest-index rule after a run of degenerate pivots; ties in the ratio
test always go to the smallest basic variable index. Bland's rule
guarantees the procedure cannot cycle, so it always terminates, and with
exact arithmetic every verdict is exact. An opt-in floating point mode
trades exactness for speed on horizons where rational pivots become
expensive.

Minimum feasible horizons are found by probing: start at the largest
shortest transit time among commodities with positive demand, double
until feasible, then binary search. This is sound because feasibility is
monotone in the horizon (any schedule for T is also one for T+1).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Mapping, Sequence

from .core import Instance, StorageMode, format_rational, shortest_transit, validate_instance
from .expansion import ExpandedNetwork, ExpansionConfig, build_time_expanded
from .instances import CycleParams, cycle_instance

__all__ = [
    "Constraint",
    "GapReport",
    "LESS_EQUAL",
    "EQUAL",
    "LPResult",
    "LinearProgram",
    "NoHorizonFound",
    "SpeedupReport",
    "feasibility_lp_from_expansion",
    "gap_csv",
    "gap_sweep",
    "lp_feasible",
    "min_feasible_horizon",
    "movement_solution",
    "probe_horizon",
    "speedup_ratio",
]

LESS_EQUAL = "<="
EQUAL = "="

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Consecutive degenerate pivots tolerated before switching the entering
# rule to Bland's. Any cycle consists solely of degenerate pivots, so
# running Bland's rule from within such a run guarantees termination.
_BLAND_TRIGGER = 32

_FLOAT_FEAS_TOL = 1e-9
_FLOAT_DROP_TOL = 1e-12
_FLOAT_ITERATION_CAP = 200_000


class NoHorizonFound(Exception):
    """No feasible horizon exists within the search bound."""


@dataclass(frozen=True)
class Constraint:
    """Sparse row: sum of coeffs[j] * x_j compared against rhs."""

    coeffs: Mapping[int, Fraction]
    relation: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.relation not in (LESS_EQUAL, EQUAL):
            raise ValueError(f"relation must be {LESS_EQUAL!r} or {EQUAL!r}")


@dataclass(frozen=True)
class LinearProgram:
    """Feasibility problem: find x >= 0 satisfying all constraints.

    Rows are stored sparsely; every coefficient index must be smaller
    than num_vars.
    """

    num_vars: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        for row, constraint in enumerate(self.constraints):
            for index in constraint.coeffs:
                if not 0 <= index < self.num_vars:
                    raise ValueError(f"constraint {row}: variable index {index} out of range")

    def check_assignment(self, assignment: Sequence, tol=_ZERO) -> bool:
        """Exact row-by-row verification (with tol=0) of an assignment."""
        if len(assignment) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} values, got {len(assignment)}")
        if any(value < -tol for value in assignment):
            return False
        for constraint in self.constraints:
            total = sum(coeff * assignment[j] for j, coeff in constraint.coeffs.items())
            residual = total - constraint.rhs
            if constraint.relation == EQUAL:
                if not -tol <= residual <= tol:
                    return False
            elif residual > tol:
                return False
        return True


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    assignment: tuple[Fraction, ...] | None = None


def feasibility_lp_from_expansion(expansion: ExpandedNetwork) -> LinearProgram:
    """Static feasibility LP of a time expansion.

    Variables: expansion.movement_variables then expansion.holdover_variables.
    Rows: capacity per movement copy, then conservation equalities per
    (commodity, node, theta) with the supply d entering as rhs -d at
    (source, 0) and the demand as rhs +d at (sink, T).
    """
    instance = expansion.instance
    network = instance.network
    horizon = expansion.horizon

    movement_vars = expansion.movement_variables
    holdover_vars = expansion.holdover_variables
    move_index = {key: i for i, key in enumerate(movement_vars)}
    offset = len(movement_vars)
    hold_index = {key: offset + i for i, key in enumerate(holdover_vars)}
    num_vars = offset + len(holdover_vars)

    constraints: list[Constraint] = []
    commodity_count = len(instance.commodities)

    for arc_id, theta in expansion.movement_copies:
        coeffs = {
            move_index[arc_id, theta, commodity]: _ONE for commodity in range(commodity_count)
        }
        constraints.append(Constraint(coeffs, LESS_EQUAL, expansion.movement_capacity(arc_id)))

    for index, commodity in enumerate(instance.commodities):
        storage_nodes = expansion.holdover_nodes[index]
        for node in network.nodes:
            holdover_here = node in storage_nodes
            incoming = network.in_arcs[node]
            outgoing = network.out_arcs[node]
            for theta in range(horizon + 1):
                coeffs: dict[int, Fraction] = {}
                for arc in incoming:
                    entered = theta - arc.transit
                    if 0 <= entered <= horizon - arc.transit - 1:
                        j = move_index[arc.id, entered, index]
                        coeffs[j] = coeffs.get(j, _ZERO) + _ONE
                if holdover_here and theta >= 1:
                    j = hold_index[node, theta - 1, index]
                    coeffs[j] = coeffs.get(j, _ZERO) + _ONE
                for arc in outgoing:
                    if theta <= horizon - arc.transit - 1:
                        j = move_index[arc.id, theta, index]
                        coeffs[j] = coeffs.get(j, _ZERO) - _ONE
                if holdover_here and theta <= horizon - 1:
                    j = hold_index[node, theta, index]
                    coeffs[j] = coeffs.get(j, _ZERO) - _ONE
                if node == commodity.source and theta == 0:
                    rhs = -commodity.demand
                elif node == commodity.sink and theta == horizon:
                    rhs = commodity.demand
                else:
                    rhs = _ZERO
                constraints.append(Constraint(coeffs, EQUAL, rhs))

    return LinearProgram(num_vars, tuple(constraints))


def lp_feasible(lp: LinearProgram, *, exact: bool = True) -> LPResult:
    """Decide feasibility; with exact=True the verdict is exact.

    The floating point mode accepts assignments whose constraint
    residuals stay within 1e-9 and returns float values; use it only for
    probing sizes where rational arithmetic is too slow.
    """
    if exact:
        result = _phase_one_exact(lp)
        if result.feasible:
            assert lp.check_assignment(result.assignment), "simplex produced an invalid assignment"
        return result
    return _phase_one_float(lp)


# Right-hand-side pseudo-column: stored inside each row dict so pivots
# update it with the same arithmetic as every other column. Real columns
# are nonnegative, so -1 never collides.
_RHS = -1


def _prepare_rows(lp: LinearProgram, convert):
    """Initial tableau: slack basics for satisfied <= rows, artificials
    elsewhere, artificials on zero right-hand sides pinned.

    A pinned artificial is a fixed variable, zero now and forever: it is
    excluded from the phase-one objective and pricing, and any step
    through its row is blocked at zero by the ratio test. Without
    pinning, the many zero balance rows of a time expansion drown phase
    one in bookkeeping pivots that exist only to clear artificials that
    already sit at zero. The returned row dicts hold the right-hand side
    under the _RHS key.
    """
    n = lp.num_vars
    slack_count = sum(1 for c in lp.constraints if c.relation == LESS_EQUAL)
    art_start = n + slack_count

    rows: list[dict] = []
    basis: list[int] = []
    pinned: set[int] = set()
    next_slack = n
    next_art = art_start
    for constraint in lp.constraints:
        row = {j: convert(v) for j, v in constraint.coeffs.items() if v != 0}
        b = convert(constraint.rhs)
        basic = None
        if constraint.relation == LESS_EQUAL:
            slack = next_slack
            next_slack += 1
            row[slack] = 1
            if b >= 0:
                basic = slack
        if b < 0:
            row = {j: -v for j, v in row.items()}
            b = -b
            basic = None
        if b != 0:
            row[_RHS] = b
        if basic is None:
            art = next_art
            next_art += 1
            row[art] = 1
            basic = art
            if b == 0:
                pinned.add(art)
        rows.append(row)
        basis.append(basic)
    return rows, basis, pinned, art_start


def _phase_one_exact(lp: LinearProgram) -> LPResult:
    """Exact phase-one simplex on an integer tableau.

    Each row is a dict of integer numerators over one positive integer
    denominator (dens[i]), reduced by their gcd after every update.
    Fractions appear nowhere in the hot path: pivoting, pricing and
    ratio comparisons are all integer arithmetic, which for this kind of
    near-unimodular matrix is an order of magnitude faster than Fraction
    operations with their per-op normalization.
    """
    def scaled(constraint_value: Fraction, scale: int) -> int:
        product = constraint_value * scale
        return product.numerator

    dens: list[int] = []
    n = lp.num_vars
    slack_count = sum(1 for c in lp.constraints if c.relation == LESS_EQUAL)
    art_start = n + slack_count

    rows: list[dict[int, int]] = []
    basis: list[int] = []
    pinned: set[int] = set()
    next_slack = n
    next_art = art_start
    for constraint in lp.constraints:
        den = lcm(
            constraint.rhs.denominator,
            *(v.denominator for v in constraint.coeffs.values()),
        )
        row = {j: scaled(v, den) for j, v in constraint.coeffs.items() if v != 0}
        b = scaled(constraint.rhs, den)
        basic = None
        if constraint.relation == LESS_EQUAL:
            slack = next_slack
            next_slack += 1
            row[slack] = den
            if b >= 0:
                basic = slack
        if b < 0:
            row = {j: -v for j, v in row.items()}
            b = -b
            basic = None
        if b != 0:
            row[_RHS] = b
        if basic is None:
            art = next_art
            next_art += 1
            row[art] = den
            basic = art
            if b == 0:
                pinned.add(art)
        rows.append(row)
        dens.append(den)
        basis.append(basic)

    m = len(rows)

    # Phase-one objective: minimize the sum of the unpinned artificials.
    # obj holds their combined row over the shared denominator obj_den
    # (structural and slack columns plus the _RHS cell, which carries
    # the objective value: zero exactly when the LP is feasible).
    obj: dict[int, int] = {}
    obj_den = 1
    for i in range(m):
        if basis[i] >= art_start and basis[i] not in pinned:
            merged = lcm(obj_den, dens[i])
            if merged != obj_den:
                scale = merged // obj_den
                obj = {j: v * scale for j, v in obj.items()}
                obj_den = merged
            scale = obj_den // dens[i]
            for j, v in rows[i].items():
                if j >= art_start:
                    continue
                updated = obj.get(j, 0) + v * scale
                if updated:
                    obj[j] = updated
                else:
                    obj.pop(j, None)

    bland = False
    degenerate_streak = 0

    while obj.get(_RHS, 0) > 0:
        entering = _entering_exact(obj, bland)
        if entering is None:
            return LPResult(False, None)

        # Ratio test over pairs (rhs numerator, pivot numerator), both
        # over the same row denominator, compared by cross
        # multiplication. Rows whose basic variable is pinned block any
        # step at zero, whatever the sign of their pivot entry.
        pivot_row = None
        best_num = best_den = 0
        best_basic = -1
        for i in range(m):
            coeff = rows[i].get(entering)
            if coeff is None:
                continue
            if basis[i] in pinned:
                num, den = 0, 1
            elif coeff > 0:
                num, den = rows[i].get(_RHS, 0), coeff
            else:
                continue
            if pivot_row is None:
                pivot_row, best_num, best_den, best_basic = i, num, den, basis[i]
                continue
            left = num * best_den
            right = best_num * den
            if left < right or (left == right and basis[i] < best_basic):
                pivot_row, best_num, best_den, best_basic = i, num, den, basis[i]
        if pivot_row is None:
            # The objective is bounded below by zero, so an improving
            # column always has a blocking row; reaching this means the
            # tableau is corrupt.
            raise RuntimeError("phase-one ratio test found no pivot row")

        evicted_pinned = best_basic in pinned
        obj_den = _pivot_exact(rows, dens, basis, obj, obj_den, pivot_row, entering, art_start)
        pinned.discard(best_basic)

        # Evicting a pinned artificial is permanent progress, not a
        # stall, so it does not count toward the Bland trigger.
        if best_num == 0:
            if not evicted_pinned:
                degenerate_streak += 1
                if degenerate_streak >= _BLAND_TRIGGER:
                    bland = True
        else:
            degenerate_streak = 0
            bland = False

    assignment = [_ZERO] * n
    for i in range(m):
        if basis[i] < n:
            assignment[basis[i]] = Fraction(rows[i].get(_RHS, 0), dens[i])
    return LPResult(True, tuple(assignment))


def _entering_exact(obj: dict[int, int], bland: bool) -> int | None:
    """Largest positive objective numerator, smallest index on ties;
    smallest index outright under Bland's rule. The _RHS cell is not a
    column."""
    if bland:
        best = None
        for j, v in obj.items():
            if v > 0 and j != _RHS and (best is None or j < best):
                best = j
        return best
    best = None
    best_value = 0
    for j, v in obj.items():
        if v <= 0 or j == _RHS:
            continue
        if v > best_value or (v == best_value and j < best):
            best, best_value = j, v
    return best


def _reduce_row(row: dict[int, int], den: int) -> int:
    g = den
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return den
    if g > 1:
        for j in row:
            row[j] //= g
        den //= g
    return den


def _pivot_exact(rows, dens, basis, obj, obj_den, r, entering, art_start) -> int:
    """Gaussian pivot over integer rows; returns the new obj_den."""
    pivot_row = rows[r]
    pivot_num = pivot_row.pop(entering)
    pivot_den = dens[r]
    if pivot_num < 0:
        pivot_row = {j: -v for j, v in pivot_row.items()}
        pivot_num = -pivot_num
    # Canonical pivot row value of column j becomes old/(pivot value) =
    # (num_j / den) / (pivot_num / den) = num_j / pivot_num.
    dens[r] = _reduce_row(pivot_row, pivot_num)
    rows[r] = pivot_row
    leaving = basis[r]
    basis[r] = entering

    den_r = dens[r]
    pivot_items = tuple(pivot_row.items())
    for i, row in enumerate(rows):
        if i == r or (factor := row.pop(entering, None)) is None:
            continue
        if factor:
            if den_r != 1:
                for j in row:
                    row[j] *= den_r
            for j, v in pivot_items:
                updated = row.get(j, 0) - factor * v
                if updated:
                    row[j] = updated
                else:
                    row.pop(j, None)
            dens[i] = _reduce_row(row, dens[i] * den_r)

    factor = obj.pop(entering, None)
    if factor:
        if den_r != 1:
            for j in obj:
                obj[j] *= den_r
        for j, v in pivot_items:
            if j >= art_start:
                continue
            updated = obj.get(j, 0) - factor * v
            if updated:
                obj[j] = updated
            else:
                obj.pop(j, None)
        obj_den = _reduce_row(obj, obj_den * den_r)

    if leaving >= art_start:
        # A departed artificial never re-enters; drop its column so rows
        # stay sparse.
        for row in rows:
            row.pop(leaving, None)
    # Restore the entering column as the new basic unit column.
    rows[r][entering] = dens[r]
    return obj_den


def _phase_one_float(lp: LinearProgram) -> LPResult:
    """Floating point twin of _phase_one_exact; same pivoting rules,
    verdicts within tolerance instead of exact."""

    def is_zero(value: float) -> bool:
        return -_FLOAT_DROP_TOL <= value <= _FLOAT_DROP_TOL

    rows, basis, pinned, art_start = _prepare_rows(lp, float)
    m = len(rows)
    n = lp.num_vars

    obj: dict[int, float] = {}
    for i in range(m):
        if basis[i] >= art_start and basis[i] not in pinned:
            for j, v in rows[i].items():
                if j >= art_start:
                    continue
                updated = obj.get(j, 0.0) + v
                if is_zero(updated):
                    obj.pop(j, None)
                else:
                    obj[j] = updated

    bland = False
    degenerate_streak = 0
    iterations = 0

    while obj.get(_RHS, 0.0) > _FLOAT_FEAS_TOL:
        entering = None
        best_value = 0.0
        if bland:
            for j, v in obj.items():
                if v > _FLOAT_FEAS_TOL and j != _RHS and (entering is None or j < entering):
                    entering = j
        else:
            for j, v in obj.items():
                if j == _RHS or v <= _FLOAT_FEAS_TOL:
                    continue
                if entering is None or v > best_value or (v == best_value and j < entering):
                    entering, best_value = j, v
        if entering is None:
            return LPResult(False, None)

        pivot_row = None
        best_ratio = 0.0
        best_basic = -1
        for i in range(m):
            coeff = rows[i].get(entering)
            if coeff is None:
                continue
            if basis[i] in pinned:
                if is_zero(coeff):
                    continue
                ratio = 0.0
            elif coeff > _FLOAT_FEAS_TOL:
                ratio = rows[i].get(_RHS, 0.0) / coeff
            else:
                continue
            if (
                pivot_row is None
                or ratio < best_ratio
                or (ratio == best_ratio and basis[i] < best_basic)
            ):
                pivot_row, best_ratio, best_basic = i, ratio, basis[i]
        if pivot_row is None:
            raise RuntimeError("phase-one ratio test found no pivot row")

        evicted_pinned = best_basic in pinned
        _pivot_float(rows, basis, obj, pivot_row, entering, art_start, is_zero)
        pinned.discard(best_basic)

        if is_zero(best_ratio):
            if not evicted_pinned:
                degenerate_streak += 1
                if degenerate_streak >= _BLAND_TRIGGER:
                    bland = True
        else:
            degenerate_streak = 0
            bland = False

        iterations += 1
        if iterations > _FLOAT_ITERATION_CAP:
            raise RuntimeError("floating point simplex exceeded its iteration cap")

    assignment = [0.0] * n
    for i in range(m):
        if basis[i] < n:
            assignment[basis[i]] = rows[i].get(_RHS, 0.0)
    return LPResult(True, tuple(assignment))


def _pivot_float(rows, basis, obj, r, entering, art_start, is_zero) -> None:
    pivot_row = rows[r]
    pivot_value = pivot_row.pop(entering)
    if pivot_value != 1.0:
        pivot_row = {j: v / pivot_value for j, v in pivot_row.items()}
        rows[r] = pivot_row
    leaving = basis[r]
    basis[r] = entering

    pivot_items = tuple(pivot_row.items())
    for i, row in enumerate(rows):
        if i == r or (factor := row.pop(entering, None)) is None:
            continue
        if not is_zero(factor):
            for j, v in pivot_items:
                updated = row.get(j, 0.0) - factor * v
                if is_zero(updated):
                    row.pop(j, None)
                else:
                    row[j] = updated

    factor = obj.pop(entering, None)
    if factor is not None and not is_zero(factor):
        for j, v in pivot_items:
            if j >= art_start:
                continue
            updated = obj.get(j, 0.0) - factor * v
            if is_zero(updated):
                obj.pop(j, None)
            else:
                obj[j] = updated

    if leaving >= art_start:
        for row in rows:
            row.pop(leaving, None)
    rows[r][entering] = 1.0


def probe_horizon(
    instance: Instance,
    horizon: int,
    mode: StorageMode,
    *,
    exact: bool = True,
) -> tuple[ExpandedNetwork, LPResult]:
    """Build the expansion for one horizon and decide its feasibility."""
    expansion = build_time_expanded(instance, ExpansionConfig(horizon, mode))
    lp = feasibility_lp_from_expansion(expansion)
    return expansion, lp_feasible(lp, exact=exact)


def movement_solution(
    expansion: ExpandedNetwork, result: LPResult
) -> dict[tuple[str, int, int], Fraction]:
    """Nonzero movement copy flows of a feasible result, keyed like the
    expansion's movement variables. Holdover values are dropped; they
    carry no arc flow."""
    if not result.feasible or result.assignment is None:
        raise ValueError("result carries no assignment")
    movement = expansion.movement_variables
    return {
        key: value
        for key, value in zip(movement, result.assignment[: len(movement)])
        if value != 0
    }


Observer = Callable[[int, ExpandedNetwork, LPResult], None]


def min_feasible_horizon(
    instance: Instance,
    mode: StorageMode,
    t_max: int,
    *,
    exact: bool = True,
    observer: Observer | None = None,
) -> int:
    """Smallest integer horizon T <= t_max whose expansion is feasible.

    Raises NoHorizonFound when even t_max is infeasible, and ValueError
    for invalid instances. The search never misses a smaller feasible
    horizon: probing starts at a lower bound (the largest shortest
    transit among commodities with positive demand; delivering anything
    strictly needs more time than its path transit), doubles until
    feasible and binary searches the remaining bracket, all justified by
    monotonicity of feasibility in T. The optional observer receives
    every (horizon, expansion, result) probed.
    """
    report = validate_instance(instance)
    if not report.ok:
        raise ValueError(f"invalid instance: {report}")
    if t_max < 1:
        raise ValueError("t_max must be at least 1")

    lower = 1
    for commodity in instance.commodities:
        if commodity.demand > 0:
            transit = shortest_transit(instance.network, commodity.source, commodity.sink)
            lower = max(lower, transit)

    cache: dict[int, bool] = {}

    def feasible(horizon: int) -> bool:
        if horizon not in cache:
            expansion, result = probe_horizon(instance, horizon, mode, exact=exact)
            if observer is not None:
                observer(horizon, expansion, result)
            cache[horizon] = result.feasible
        return cache[horizon]

    probe = min(lower, t_max)
    last_infeasible = 0
    while not feasible(probe):
        last_infeasible = probe
        if probe >= t_max:
            raise NoHorizonFound(
                f"no feasible horizon <= {t_max} in mode {mode.value} "
                f"(infeasible at T={t_max})"
            )
        probe = min(probe * 2, t_max)

    lo, hi = last_infeasible + 1, probe
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class SpeedupReport:
    """Minimum horizons of both storage modes for one instance."""

    with_storage: int
    without_storage: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.without_storage, self.with_storage)


@dataclass(frozen=True)
class GapReport:
    """SpeedupReport for one member of the cycle family."""

    k: int
    with_storage: int
    without_storage: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.without_storage, self.with_storage)


def speedup_ratio(
    instance: Instance,
    t_max: int,
    *,
    exact: bool = True,
    observer: Observer | None = None,
) -> SpeedupReport:
    """Minimum horizons with and without storage, and their ratio."""
    with_storage = min_feasible_horizon(
        instance, StorageMode.WITH_STORAGE, t_max, exact=exact, observer=observer
    )
    without_storage = min_feasible_horizon(
        instance, StorageMode.NO_INTERMEDIATE_STORAGE, t_max, exact=exact, observer=observer
    )
    return SpeedupReport(with_storage, without_storage)


def _sweep_one(k: int, t_max: int | None, exact: bool, observer: Observer | None) -> GapReport:
    instance = cycle_instance(CycleParams(k))
    bound = t_max if t_max is not None else 4 * k
    with_storage = min_feasible_horizon(
        instance, StorageMode.WITH_STORAGE, bound, exact=exact, observer=observer
    )
    # Storage speeds things up by at most a factor of two, so the
    # no-storage search never needs to look past 2 * minT_with; a
    # violation of that bound would surface loudly as NoHorizonFound,
    # never as a silently wrong minimum.
    without_storage = min_feasible_horizon(
        instance,
        StorageMode.NO_INTERMEDIATE_STORAGE,
        min(bound, 2 * with_storage),
        exact=exact,
        observer=observer,
    )
    return GapReport(k, with_storage, without_storage)


def _sweep_worker(args: tuple[int, int | None, bool]) -> GapReport:
    k, t_max, exact = args
    return _sweep_one(k, t_max, exact, None)


def gap_sweep(
    k_min: int,
    k_max: int,
    *,
    t_max: int | None = None,
    exact: bool = True,
    parallel: bool = False,
    observer: Observer | None = None,
) -> list[GapReport]:
    """Speed-up reports for the cycle family, k from k_min to k_max.

    Serial and deterministic by default; parallel=True fans the k values
    out to worker processes (observer is unsupported there). Requires
    3 <= k_min <= k_max.
    """
    if not 3 <= k_min <= k_max:
        raise ValueError("need 3 <= k_min <= k_max")
    ks = range(k_min, k_max + 1)
    if parallel:
        if observer is not None:
            raise ValueError("observer is not supported with parallel sweeps")
        with ProcessPoolExecutor() as pool:
            return list(pool.map(_sweep_worker, [(k, t_max, exact) for k in ks]))
    return [_sweep_one(k, t_max, exact, observer) for k in ks]


def gap_csv(reports: Sequence[GapReport]) -> str:
    """Render sweep reports as CSV; identical reports give identical bytes."""
    lines = ["k,minT_with,minT_without,ratio"]
    for report in reports:
        lines.append(
            f"{report.k},{report.with_storage},{report.without_storage},"
            f"{format_rational(report.ratio)}"
        )
    return "\n".join(lines) + "\n"
