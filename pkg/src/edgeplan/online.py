"""Online planner: irrevocable per-slot reservation and allocation.

The planner never looks ahead and never needs the peak demand. Within each
interval of ``tau`` slots it keeps, per demand level, the number of slots so
far that reached the level; a level is reserved once the saving a VM
reserved at the interval start would have earned covers the upfront fee.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import (
    AllocationSchedule,
    DemandTrace,
    PlanResult,
    PricingConfig,
    ReservationPlan,
    allocate_slot,
    cost_of_schedule,
)


class Reservation(NamedTuple):
    """One reservation made by the planner and the level that triggered it."""

    decided_at: int
    start: int
    level: int
    interval: int


@dataclass(frozen=True)
class OnlineResult(PlanResult):
    events: tuple[Reservation, ...] = ()


class OnlinePlanner:
    """Stateful planner fed one slot of demand at a time.

    Slots are 0-based. ``reservations[t]`` is final once slot ``t`` has been
    stepped; entries for later slots of the current interval may already be
    committed.
    """

    def __init__(self, config: PricingConfig):
        self.config = config
        self.t = 0
        self.reservations: list[int] = []
        self.active: list[int] = []
        self.events: list[Reservation] = []
        self._level_counts: dict[int, int] = defaultdict(int)

    @property
    def interval(self) -> int:
        return self.t // self.config.tau

    def _ensure(self, length: int) -> None:
        grow = length - len(self.active)
        if grow > 0:
            self.active.extend([0] * grow)
            self.reservations.extend([0] * grow)

    def _reserve(self, start: int, level: int) -> None:
        tau = self.config.tau
        self._ensure(start + tau)
        self.reservations[start] += 1
        for s in range(start, start + tau):
            self.active[s] += 1
        self.events.append(Reservation(self.t, start, level, self.interval))

    def threshold_met(self, level: int) -> bool:
        cfg = self.config
        counts = self._level_counts
        lhs = cfg.lam * counts.get(level, 0) + (cfg.p - cfg.lam) * counts.get(level + cfg.w, 0)
        return cfg.gamma <= lhs

    def step(self, demand: int) -> tuple[int, int, int]:
        if demand < 0:
            raise ValueError("demand must be non-negative")
        cfg = self.config
        tau = cfg.tau
        t = self.t
        if t % tau == 0:
            self._level_counts.clear()
        interval_end = (t // tau + 1) * tau  # exclusive
        self._ensure(interval_end)
        for level in range(1, demand + 1):
            self._level_counts[level] += 1
        covered = min(self.active[t:interval_end]) if demand else 0
        for level in range(1, demand + 1):
            if not self.threshold_met(level):
                # counts are non-increasing in level, so higher levels fail too
                break
            if level <= covered:
                continue
            # first slot of the remaining interval not yet covered at this level;
            # one reservation there covers the rest of the interval
            for s in range(t, interval_end):
                if self.active[s] < level:
                    self._reserve(s, level)
                    break
            covered = level
        alloc = allocate_slot(demand, self.active[t], cfg.w)
        self.t += 1
        return alloc

    def committed_plan(self) -> tuple[int, ...]:
        return tuple(self.reservations[: self.t])


def run_online(trace: DemandTrace | Sequence[int], config: PricingConfig) -> OnlineResult:
    if not isinstance(trace, DemandTrace):
        trace = DemandTrace(tuple(trace))
    original = len(trace)
    padded = trace.padded(config.tau)
    planner = OnlinePlanner(config)
    triples = [planner.step(d) for d in padded]
    T = len(padded)
    plan = ReservationPlan(tuple(planner.reservations[:T]))
    if any(planner.reservations[T:]):
        raise AssertionError("online planner committed past the padded horizon")
    schedule = AllocationSchedule(*map(tuple, zip(*triples)))
    cost = cost_of_schedule(plan, schedule, config)
    return OnlineResult("online", padded, plan, schedule, cost, original, tuple(planner.events))
