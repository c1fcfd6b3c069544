"""Exact optima for small instances.

These solvers exist to check the planners' guarantees; they are exponential
in the horizon and refuse instances beyond a node budget.
"""

from __future__ import annotations

import itertools
from typing import Sequence

from .model import (
    DemandTrace,
    PricingConfig,
    ReservationPlan,
    ValidationError,
    evaluate_cost,
)
from .offline import plan_offline

DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(ValidationError):
    pass


def _demands(trace) -> tuple[int, ...]:
    return trace.demands if isinstance(trace, DemandTrace) else tuple(int(d) for d in trace)


def optimal_exhaustive(trace, config: PricingConfig,
                       budget: int = DEFAULT_BUDGET) -> tuple[int, ReservationPlan]:
    """Minimum normalized objective over all plans, by branch and bound.

    Reservation counts per slot range over ``0..peak``. Larger counts are
    never needed: if ``r_t > peak`` then lowering it to ``peak`` leaves every
    slot it covers with at least ``peak`` active VMs, so allocations are
    unchanged and the upfront spend drops (or stays equal when gamma is 0).

    Slots are fixed left to right with counts tried from ``peak`` down. The
    running cost of a prefix is exact because the active count of a slot
    depends only on the current and earlier decisions; the remainder is
    bounded below by 0. The incumbent starts at the offline planner's plan.
    """
    d = _demands(trace)
    T = len(d)
    if T == 0:
        raise ValidationError("trace must be non-empty")
    peak = max(d)
    if (peak + 1) ** T > budget:
        raise BudgetExceeded(f"(peak+1)^T = {peak + 1}^{T} exceeds budget {budget}")
    if peak == 0:
        return 0, ReservationPlan.empty(T)

    tau, w, gamma, lam, p = config.tau, config.w, config.gamma, config.lam, config.p
    # usage[t][n]: edge + on-demand premium at slot t with n active VMs (n capped at peak)
    usage = []
    for dt in d:
        row = []
        for n in range(peak + 1):
            edge = min(max(dt - n, 0), w)
            row.append(lam * edge + p * max(dt - edge - n, 0))
        usage.append(row)

    seed = plan_offline(DemandTrace(d), config)
    seed_plan = seed.plan.reservations[:T]
    best_cost = evaluate_cost(d, seed_plan, config).normalized_objective
    best_plan = list(seed_plan)
    r = [0] * T

    def search(t: int, partial: int, window_sum: int) -> None:
        # window_sum: reservations made in slots t-tau+1 .. t-1
        nonlocal best_cost, best_plan
        if t == T:
            if partial < best_cost:
                best_cost = partial
                best_plan = r.copy()
            return
        oldest = t - tau + 1
        row = usage[t]
        for choice in range(peak, -1, -1):
            n = window_sum + choice
            cost = partial + gamma * choice + row[n if n < peak else peak]
            if cost >= best_cost:
                continue
            r[t] = choice
            search(t + 1, cost, n - (r[oldest] if oldest >= 0 else 0))
        r[t] = 0

    search(0, 0, 0)
    return best_cost, ReservationPlan(tuple(best_plan))


def optimal_bruteforce(trace, config: PricingConfig,
                       max_plans: int = 100_000) -> tuple[int, ReservationPlan]:
    """Unpruned enumeration of every plan with counts in ``0..peak``."""
    d = _demands(trace)
    peak = max(d)
    if (peak + 1) ** len(d) > max_plans:
        raise BudgetExceeded(f"{(peak + 1) ** len(d)} plans exceed {max_plans}")
    best = None
    for plan in itertools.product(range(peak + 1), repeat=len(d)):
        cost = evaluate_cost(d, plan, config).normalized_objective
        if best is None or cost < best[0]:
            best = (cost, plan)
    return best[0], ReservationPlan(best[1])


def optimal_in_Xprime(trace, config: PricingConfig) -> tuple[int, ReservationPlan]:
    """Best plan among those reserving only at interval starts.

    Each interval is solved on its own by trying every reservation count
    from 0 to the interval's peak demand.
    """
    d = DemandTrace(_demands(trace)).padded(config.tau).demands
    tau = config.tau
    total = 0
    plan = [0] * len(d)
    for start in range(0, len(d), tau):
        chunk = d[start : start + tau]
        best_cost, best_r = None, 0
        for count in range(max(chunk) + 1):
            trial = (count,) + (0,) * (len(chunk) - 1)
            cost = evaluate_cost(chunk, trial, config).normalized_objective
            if best_cost is None or cost < best_cost:
                best_cost, best_r = cost, count
        total += best_cost
        plan[start] = best_r
    return total, ReservationPlan(tuple(plan))
