"""Offline planner: per-interval, level-by-level reservation decisions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import (
    DemandTrace,
    PlanResult,
    PricingConfig,
    ReservationPlan,
    evaluate,
    level_view,
)


@dataclass(frozen=True)
class OfflineResult(PlanResult):
    per_interval_reserved: tuple[int, ...] = ()


def reservation_pays_off(gamma: int, lam: int, p: int, u_level: int, u_level_plus_w: int) -> bool:
    # ties reserve
    return gamma <= lam * u_level + (p - lam) * u_level_plus_w


def reserve_count_for_interval(u_k: Sequence[int], config: PricingConfig) -> int:
    """How many VMs to reserve at the start of one interval.

    ``u_k[l-1]`` is the number of slots in the interval whose demand reaches
    level ``l`` (non-increasing in ``l``). Levels are scanned upward from 1
    and the scan stops at the first level where the upfront fee exceeds the
    saving. Only levels with positive utilization are scanned, so a free
    reservation never exceeds the interval peak.
    """
    u = [int(x) for x in u_k]
    w = config.w
    count = 0
    for level in range(1, len(u) + 1):
        u_l = u[level - 1]
        if u_l == 0:
            break
        u_lw = u[level + w - 1] if level + w <= len(u) else 0
        if not reservation_pays_off(config.gamma, config.lam, config.p, u_l, u_lw):
            break
        count += 1
    return count


def plan_offline(trace: DemandTrace | Sequence[int], config: PricingConfig) -> OfflineResult:
    if not isinstance(trace, DemandTrace):
        trace = DemandTrace(tuple(trace))
    original = len(trace)
    tau = config.tau
    padded = trace.padded(tau)
    T = len(padded)
    r = [0] * T
    per_interval = []
    if padded.peak > 0:
        view = level_view(padded, tau)
        for k in range(T // tau):
            count = reserve_count_for_interval(view.interval_utilization[k], config)
            r[k * tau] = count
            per_interval.append(count)
    else:
        per_interval = [0] * (T // tau)
    base = evaluate("offline", padded, ReservationPlan(tuple(r)), config, original)
    return OfflineResult(
        base.algorithm,
        base.trace,
        base.plan,
        base.schedule,
        base.cost,
        original,
        tuple(per_interval),
    )
