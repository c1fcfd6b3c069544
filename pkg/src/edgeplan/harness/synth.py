"""Seeded synthetic demand with a chosen fluctuation level."""

from __future__ import annotations

import math

import numpy as np

from ..model import DemandTrace, ValidationError

# Coefficient of variation of demand within busy slots.
BUSY_CV = 0.5
# Lag-one correlation of busy-slot demand.
BUSY_AR = 0.8

# Representative std/mean ratio for each fluctuation group (>5, 1..5, <1).
GROUP_RATIOS = {"group1": 6.0, "group2": 2.5, "group3": 0.5}


def _composition(rng: np.random.Generator, total: int, parts: int, minimum: int) -> np.ndarray:
    """Random split of ``total`` into ``parts`` integers, each >= ``minimum``."""
    free = total - parts * minimum
    cuts = np.sort(rng.integers(0, free + 1, size=parts - 1))
    return np.diff(np.concatenate(([0], cuts, [free]))) + minimum


def _busy_slots(rng: np.random.Generator, T: int, busy: int, burst_length: int) -> np.ndarray:
    """Indices of ``busy`` slots grouped into runs of about ``burst_length``."""
    if busy >= T:
        return np.arange(T)
    runs = max(1, min(busy, round(busy / burst_length)))
    lengths = _composition(rng, busy, runs, 1)
    gaps = _composition(rng, T - busy, runs + 1, 0)
    slots, pos = [], 0
    for gap, length in zip(gaps, lengths):
        pos += gap
        slots.extend(range(pos, pos + length))
        pos += length
    return np.asarray(slots)


def _standardized_ar1(rng: np.random.Generator, size: int) -> np.ndarray:
    eps = rng.standard_normal(size)
    x = np.empty(size)
    x[0] = eps[0]
    scale = math.sqrt(1 - BUSY_AR**2)
    for i in range(1, size):
        x[i] = BUSY_AR * x[i - 1] + scale * eps[i]
    if size < 2 or x.std() == 0:
        return np.zeros(size)
    return (x - x.mean()) / x.std()


def synth_demand(seed: int, T: int, mean: float, fluctuation: float,
                 peak_cap: int | None = None, burst_length: int = 1) -> DemandTrace:
    """Integer demand whose std/mean ratio is close to ``fluctuation``.

    Below ``BUSY_CV`` every slot is busy. Above it only a fixed share of
    slots is busy, sized so that idle slots mixed with busy slots of CV
    ``BUSY_CV`` give the requested ratio. Busy slots come in runs of about
    ``burst_length`` slots and their demand is autocorrelated, the way
    cluster workloads arrive in episodes; ``burst_length=1`` scatters them
    independently. Sample moments of the busy values are matched exactly,
    so the ratio only drifts through rounding, clipping at zero and the
    optional cap.
    """
    if T < 1 or mean <= 0 or fluctuation < 0 or burst_length < 1:
        raise ValidationError("need T >= 1, mean > 0, fluctuation >= 0, burst_length >= 1")
    if peak_cap is not None and peak_cap < 1:
        raise ValidationError("peak_cap must be positive")
    rng = np.random.default_rng(seed)
    if fluctuation == 0:
        values = np.full(T, float(mean))
    else:
        busy_cv = min(fluctuation, BUSY_CV)
        busy_share = (1 + busy_cv**2) / (1 + fluctuation**2)
        busy = min(T, max(2, round(busy_share * T)))
        # refit the within-busy CV to the integer busy count
        busy_cv = math.sqrt(max((1 + fluctuation**2) * busy / T - 1, 0.0))
        busy_mean = mean * T / busy
        z = _standardized_ar1(rng, busy)
        values = np.zeros(T)
        values[_busy_slots(rng, T, busy, burst_length)] = np.maximum(busy_mean * (1 + busy_cv * z), 0.0)
    demand = np.rint(values).astype(np.int64)
    if peak_cap is not None:
        demand = np.minimum(demand, peak_cap)
    return DemandTrace(tuple(demand.tolist()))


def synth_groups(seed: int, T: int = 672, mean: float = 40.0,
                 burst_length: int = 1) -> dict[str, DemandTrace]:
    """One synthetic trace per fluctuation group, seeded from ``seed``."""
    return {
        name: synth_demand(seed * 1000 + i, T, mean, ratio, burst_length=burst_length)
        for i, (name, ratio) in enumerate(GROUP_RATIOS.items())
    }
