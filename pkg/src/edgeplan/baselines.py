"""Comparison strategies.

``wang_online`` is a reconstruction of the sliding-window online acquisition
rule from prior work on cloud brokers: it sees only remote reserved and
on-demand VMs, and reserves at a level once the on-demand spend at that level
over the last ``tau`` slots would have paid the upfront fee. It is faithful in
spirit, not a copy of the published pseudocode.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .model import (
    AllocationSchedule,
    DemandTrace,
    PlanResult,
    PricingConfig,
    ReservationPlan,
    active_reservations,
    cost_of_schedule,
    evaluate,
)


def _trace(trace) -> DemandTrace:
    return trace if isinstance(trace, DemandTrace) else DemandTrace(tuple(trace))


def pure_on_demand(trace, config: PricingConfig) -> PlanResult:
    trace = _trace(trace)
    padded = trace.padded(config.tau)
    return evaluate("ondemand", padded, ReservationPlan.empty(len(padded)),
                    config.with_(edge_capacity=0), len(trace))


def edge_plus_on_demand(trace, config: PricingConfig) -> PlanResult:
    trace = _trace(trace)
    padded = trace.padded(config.tau)
    return evaluate("e-od", padded, ReservationPlan.empty(len(padded)), config, len(trace))


def wang_plan(demands: Sequence[int], gamma: int, p: int, tau: int) -> list[int]:
    """Reservations chosen by the sliding-window rule with no edge."""
    T = len(demands)
    r = [0] * T
    active = [0] * (T + tau)
    peak = max(demands, default=0)
    # hist[v]: slots in the current window with demand exactly v
    hist = np.zeros(peak + 2, dtype=np.int64)
    for t in range(T):
        hist[demands[t]] += 1
        if t >= tau:
            hist[demands[t - tau]] -= 1
        if demands[t] == 0:
            continue
        # reaching[l] = slots in the window with demand >= l
        reaching = np.cumsum(hist[::-1])[::-1]
        end = min(t + tau, T)
        covered = min(active[t:end])
        for level in range(1, demands[t] + 1):
            if gamma > p * int(reaching[level]):
                break
            if level <= covered:
                continue
            for s in range(t, end):
                if active[s] < level:
                    r[s] += 1
                    for u in range(s, s + tau):
                        active[u] += 1
                    break
            # every slot of [t, end) now has at least `level` active VMs
            covered = level
    return r


def wang_online(trace, config: PricingConfig) -> PlanResult:
    trace = _trace(trace)
    padded = trace.padded(config.tau)
    r = wang_plan(padded.demands, config.gamma, config.p, config.tau)
    return evaluate("wang", padded, ReservationPlan(tuple(r)), config.with_(edge_capacity=0), len(trace))


def edge_plus_wang(trace, config: PricingConfig) -> PlanResult:
    trace = _trace(trace)
    padded = trace.padded(config.tau)
    w = config.w
    residual = [max(d - w, 0) for d in padded]
    r = wang_plan(residual, config.gamma, config.p, config.tau)
    n = active_reservations(r, config.tau)
    reserved = [min(a, b) for a, b in zip(n, residual)]
    schedule = AllocationSchedule(
        tuple(reserved),
        tuple(min(d, w) for d in padded),
        tuple(x - a for x, a in zip(residual, reserved)),
    )
    plan = ReservationPlan(tuple(r))
    return PlanResult("e-wang", padded, plan, schedule, cost_of_schedule(plan, schedule, config), len(trace))
