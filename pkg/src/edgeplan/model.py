"""Domain types, allocation rules and cost evaluation.

Every planner, baseline and the exact oracle prices its decisions through
this module. Money is integer micro-dollars throughout so that threshold
comparisons and cost identities are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

MICROS_PER_DOLLAR = 1_000_000


class ValidationError(ValueError):
    """Raised for inputs that violate a documented precondition."""


class RegimeViolation(ValidationError):
    """Prices outside ``reserved_usage < edge < on_demand``."""


class NonPositive(ValidationError):
    pass


class Negative(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


def dollars(amount: str | float | int | Fraction) -> int:
    """Convert a dollar amount to integer micro-dollars.

    Strings are parsed exactly (``"1.0452"`` -> ``1045200``); floats go
    through their shortest repr so ``0.067`` behaves like ``"0.067"``.
    """
    if isinstance(amount, float):
        amount = repr(amount)
    value = Fraction(amount) * MICROS_PER_DOLLAR
    if value.denominator != 1:
        raise ValidationError(f"{amount!r} dollars is not a whole number of micro-dollars")
    return int(value)


@dataclass(frozen=True)
class PricingConfig:
    """Cloud and edge prices, all money in micro-dollars."""

    on_demand_price: int
    reserved_usage_price: int
    upfront_price: int
    edge_unit_cost: int
    reservation_period: int
    edge_capacity: int

    def __post_init__(self) -> None:
        for name in (
            "on_demand_price",
            "reserved_usage_price",
            "upfront_price",
            "edge_unit_cost",
            "reservation_period",
            "edge_capacity",
        ):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValidationError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.reservation_period < 1:
            raise NonPositive(f"reservation_period must be >= 1, got {self.reservation_period}")
        if self.upfront_price < 0:
            raise Negative(f"upfront_price must be >= 0, got {self.upfront_price}")
        if self.edge_capacity < 0:
            raise Negative(f"edge_capacity must be >= 0, got {self.edge_capacity}")
        if self.reserved_usage_price < 0:
            raise Negative(f"reserved_usage_price must be >= 0, got {self.reserved_usage_price}")
        if self.reserved_usage_price >= self.edge_unit_cost:
            raise RegimeViolation(
                "edge dominates reserved usage (reserved_usage_price >= edge_unit_cost); "
                "the edge is never worth using"
            )
        if self.edge_unit_cost >= self.on_demand_price:
            raise RegimeViolation("edge never used (edge_unit_cost >= on_demand_price)")

    @property
    def p(self) -> int:
        """On-demand premium over reserved usage."""
        return self.on_demand_price - self.reserved_usage_price

    @property
    def lam(self) -> int:
        """Edge premium over reserved usage."""
        return self.edge_unit_cost - self.reserved_usage_price

    # short aliases used by the planners
    @property
    def gamma(self) -> int:
        return self.upfront_price

    @property
    def tau(self) -> int:
        return self.reservation_period

    @property
    def w(self) -> int:
        return self.edge_capacity

    def with_(self, **changes) -> PricingConfig:
        return replace(self, **changes)


def validate_config(
    on_demand_price: int,
    reserved_usage_price: int,
    upfront_price: int,
    edge_unit_cost: int,
    reservation_period: int,
    edge_capacity: int,
) -> PricingConfig:
    return PricingConfig(
        on_demand_price=on_demand_price,
        reserved_usage_price=reserved_usage_price,
        upfront_price=upfront_price,
        edge_unit_cost=edge_unit_cost,
        reservation_period=reservation_period,
        edge_capacity=edge_capacity,
    )


def reference_pricing(edge_capacity: int, reservation_period: int = 168) -> PricingConfig:
    """m3.medium pricing with electricity-priced edge processing, theta = 0."""
    return PricingConfig(
        on_demand_price=dollars("0.067"),
        reserved_usage_price=0,
        upfront_price=dollars("1.0452"),
        edge_unit_cost=dollars("0.03"),
        reservation_period=reservation_period,
        edge_capacity=edge_capacity,
    )


def _int_tuple(values: Iterable, what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValidationError(f"{what} must be integers, got {v!r}")
        if v < 0:
            raise Negative(f"{what} must be non-negative, got {v}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class DemandTrace:
    demands: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "demands", _int_tuple(self.demands, "demands"))
        if not self.demands:
            raise ValidationError("a demand trace needs at least one slot")

    @classmethod
    def from_values(cls, values: Iterable[float]) -> DemandTrace:
        """Build a trace from possibly fractional demand, rounding up per slot."""
        out = []
        for v in values:
            f = float(v)
            if f < 0 or math.isnan(f):
                raise Negative(f"demand must be non-negative, got {v!r}")
            out.append(math.ceil(f))
        return cls(tuple(out))

    @property
    def horizon(self) -> int:
        return len(self.demands)

    @property
    def peak(self) -> int:
        return max(self.demands)

    def __len__(self) -> int:
        return len(self.demands)

    def __iter__(self) -> Iterator[int]:
        return iter(self.demands)

    def padded(self, tau: int) -> DemandTrace:
        """Zero-pad to the next multiple of ``tau``."""
        extra = -len(self.demands) % tau
        if not extra:
            return self
        return DemandTrace(self.demands + (0,) * extra)


@dataclass(frozen=True)
class ReservationPlan:
    reservations: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "reservations", _int_tuple(self.reservations, "reservations")
        )

    @classmethod
    def empty(cls, horizon: int) -> ReservationPlan:
        return cls((0,) * horizon)

    @property
    def total(self) -> int:
        return sum(self.reservations)

    def __len__(self) -> int:
        return len(self.reservations)

    def __iter__(self) -> Iterator[int]:
        return iter(self.reservations)


@dataclass(frozen=True)
class AllocationSchedule:
    """Per-slot split of demand between reserved, edge and on-demand VMs."""

    reserved: tuple[int, ...]
    edge: tuple[int, ...]
    on_demand: tuple[int, ...]

    def __post_init__(self) -> None:
        for name in ("reserved", "edge", "on_demand"):
            object.__setattr__(self, name, _int_tuple(getattr(self, name), name))
        if not len(self.reserved) == len(self.edge) == len(self.on_demand):
            raise LengthMismatch("allocation columns differ in length")

    def __len__(self) -> int:
        return len(self.reserved)

    def triples(self) -> Iterator[tuple[int, int, int]]:
        return zip(self.reserved, self.edge, self.on_demand)

    def totals(self) -> tuple[int, int, int]:
        return sum(self.reserved), sum(self.edge), sum(self.on_demand)


@dataclass(frozen=True)
class CostBreakdown:
    reservation_cost: int
    edge_cost: int
    on_demand_cost: int
    reserved_usage_cost: int
    raw_total: int
    normalized_objective: int

    def as_dict(self) -> dict[str, int]:
        return {
            "reservation_cost": self.reservation_cost,
            "edge_cost": self.edge_cost,
            "on_demand_cost": self.on_demand_cost,
            "reserved_usage_cost": self.reserved_usage_cost,
            "raw_total": self.raw_total,
            "normalized_objective": self.normalized_objective,
        }


@dataclass(frozen=True)
class PlanResult:
    """What every planner and baseline returns."""

    algorithm: str
    trace: DemandTrace
    plan: ReservationPlan
    schedule: AllocationSchedule
    cost: CostBreakdown
    original_horizon: int | None = field(default=None, compare=False)


def _as_array(values) -> np.ndarray:
    if isinstance(values, DemandTrace):
        values = values.demands
    elif isinstance(values, ReservationPlan):
        values = values.reservations
    return np.asarray(values, dtype=np.int64)


def active_reservations(plan: ReservationPlan | Sequence[int], tau: int) -> tuple[int, ...]:
    """Reservations active per slot: sum of ``r`` over the last ``tau`` slots."""
    r = _as_array(plan)
    if tau < 1:
        raise NonPositive("tau must be >= 1")
    csum = np.concatenate(([0], np.cumsum(r)))
    idx = np.arange(1, len(r) + 1)
    n = csum[idx] - csum[np.maximum(idx - tau, 0)]
    return tuple(int(x) for x in n)


def allocate_slot(demand: int, active: int, capacity: int) -> tuple[int, int, int]:
    """Split one slot's demand: reserved first, then edge, then on-demand."""
    reserved = min(active, demand)
    edge = min(max(demand - active, 0), capacity)
    on_demand = max(demand - edge - active, 0)
    return reserved, edge, on_demand


def allocate(trace, plan, config: PricingConfig) -> AllocationSchedule:
    d = _as_array(trace)
    r = _as_array(plan)
    if len(d) != len(r):
        raise LengthMismatch(f"trace has {len(d)} slots, plan has {len(r)}")
    n = np.asarray(active_reservations(r, config.tau), dtype=np.int64)
    reserved = np.minimum(n, d)
    edge = np.minimum(np.maximum(d - n, 0), config.w)
    on_demand = np.maximum(d - edge - n, 0)
    return AllocationSchedule(tuple(reserved.tolist()), tuple(edge.tolist()), tuple(on_demand.tolist()))


def cost_of_schedule(plan, schedule: AllocationSchedule, config: PricingConfig) -> CostBreakdown:
    """Price an explicit schedule; used directly by strategies that bypass edge priority."""
    r = _as_array(plan)
    if len(r) != len(schedule):
        raise LengthMismatch(f"plan has {len(r)} slots, schedule has {len(schedule)}")
    a_r, a_w, a_o = schedule.totals()
    n_res = int(r.sum())
    reservation = config.gamma * n_res
    edge = config.edge_unit_cost * a_w
    on_demand = config.on_demand_price * a_o
    reserved_usage = config.reserved_usage_price * a_r
    raw = reservation + edge + on_demand + reserved_usage
    normalized = config.gamma * n_res + config.lam * a_w + config.p * a_o
    return CostBreakdown(reservation, edge, on_demand, reserved_usage, raw, normalized)


def evaluate_cost(trace, plan, config: PricingConfig) -> CostBreakdown:
    return cost_of_schedule(plan, allocate(trace, plan, config), config)


def evaluate(algorithm: str, trace: DemandTrace, plan: ReservationPlan, config: PricingConfig,
             original_horizon: int | None = None) -> PlanResult:
    schedule = allocate(trace, plan, config)
    return PlanResult(algorithm, trace, plan, schedule, cost_of_schedule(plan, schedule, config),
                      original_horizon)


@dataclass(frozen=True)
class LevelView:
    """Per-level view of a trace.

    ``indicators[l-1, t]`` is 1 iff ``d_t >= l``; ``utilization[l-1]`` counts
    slots reaching level ``l`` over the horizon and
    ``interval_utilization[k, l-1]`` counts them within interval ``k``
    (0-based). Levels above the peak have utilization 0.
    """

    indicators: np.ndarray
    utilization: np.ndarray
    interval_utilization: np.ndarray
    tau: int

    @property
    def peak(self) -> int:
        return self.indicators.shape[0]

    def u(self, level: int, interval: int | None = None) -> int:
        if level < 1 or level > self.peak:
            return 0
        if interval is None:
            return int(self.utilization[level - 1])
        return int(self.interval_utilization[interval, level - 1])


def level_view(trace, tau: int) -> LevelView:
    d = _as_array(trace)
    if len(d) == 0:
        raise ValidationError("trace must be non-empty")
    peak = int(d.max())
    levels = np.arange(1, peak + 1)[:, None]
    ind = (d[None, :] >= levels).astype(np.int64)
    K = -(-len(d) // tau)
    padded = np.zeros((peak, K * tau), dtype=np.int64)
    padded[:, : len(d)] = ind
    per_interval = padded.reshape(peak, K, tau).sum(axis=2).T
    return LevelView(ind, ind.sum(axis=1), per_interval, tau)


def interval_slots(k: int, tau: int, horizon: int) -> range:
    """Slot indices (0-based) of interval ``k`` (0-based)."""
    return range(k * tau, min((k + 1) * tau, horizon))


def interval_cost(trace, plan, config: PricingConfig, k: int) -> int:
    """Normalized objective restricted to interval ``k``.

    Reservations made before the interval still count towards its active
    VMs; only upfront fees of reservations made inside it are charged.
    """
    d = _as_array(trace)
    r = _as_array(plan)
    sched = allocate(d, r, config)
    total = 0
    for t in interval_slots(k, config.tau, len(d)):
        total += config.gamma * int(r[t]) + config.lam * sched.edge[t] + config.p * sched.on_demand[t]
    return total


def per_level_interval_cost(trace, plan, config: PricingConfig, k: int, level: int) -> int:
    """Cost attributable to demand level ``level`` inside interval ``k``.

    Upfront fees for reservations of size at least ``level``, edge cost when
    the level falls in ``(n_t, n_t + w]`` and on-demand cost above that.
    """
    d = _as_array(trace)
    r = _as_array(plan)
    n = active_reservations(r, config.tau)
    w = config.w
    total = 0
    for t in interval_slots(k, config.tau, len(d)):
        if r[t] >= level:
            total += config.gamma
        if d[t] >= level:
            if n[t] < level <= n[t] + w:
                total += config.lam
            elif level > n[t] + w:
                total += config.p
    return total


def check_schedule(trace, plan, schedule: AllocationSchedule, tau: int, capacity: int,
                   *, edge_first: bool = False) -> None:
    """Assert the allocation invariants for a schedule.

    With ``edge_first`` the edge is filled before reserved VMs, which is how
    the E+Wang baseline splits demand; priority is then checked in that
    order instead.
    """
    d = _as_array(trace)
    n = active_reservations(plan, tau)
    if len(d) != len(schedule):
        raise AssertionError("schedule length differs from trace")
    for t, (a_r, a_w, a_o) in enumerate(schedule.triples()):
        if a_r + a_w + a_o != d[t]:
            raise AssertionError(f"slot {t}: {a_r}+{a_w}+{a_o} != demand {d[t]}")
        if a_r > n[t]:
            raise AssertionError(f"slot {t}: reserved use {a_r} exceeds active {n[t]}")
        if a_w > capacity:
            raise AssertionError(f"slot {t}: edge use {a_w} exceeds capacity {capacity}")
        if edge_first:
            if (a_r > 0 or a_o > 0) and a_w != min(int(d[t]), capacity):
                raise AssertionError(f"slot {t}: edge not filled first")
            if a_o > 0 and a_r != n[t]:
                raise AssertionError(f"slot {t}: on-demand used with idle reserved VMs")
        else:
            if a_w > 0 and a_r != min(n[t], int(d[t])):
                raise AssertionError(f"slot {t}: edge used before reserved VMs")
            if a_o > 0 and a_w != capacity:
                raise AssertionError(f"slot {t}: on-demand used before edge is full")
