from __future__ import annotations

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from edgeplan import (
    PricingConfig,
    active_reservations,
    edge_plus_on_demand,
    edge_plus_wang,
    plan_offline,
    pure_on_demand,
    run_online,
    wang_online,
)
from edgeplan.model import check_schedule

settings.register_profile("default", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def configs(draw, max_tau: int = 5, max_w: int = 4) -> PricingConfig:
    theta = draw(st.integers(0, 3))
    edge = theta + draw(st.integers(1, 6))
    on_demand = edge + draw(st.integers(1, 10))
    tau = draw(st.integers(1, max_tau))
    gamma = draw(st.integers(0, (on_demand - theta) * tau + 2))
    return PricingConfig(on_demand, theta, gamma, edge, tau, draw(st.integers(0, max_w)))


def demands(max_len: int = 16, max_d: int = 6):
    return st.lists(st.integers(0, max_d), min_size=1, max_size=max_len)


def plans_for(length: int, max_r: int = 3):
    return st.lists(st.integers(0, max_r), min_size=length, max_size=length)


def naive_online_plan(d, config) -> list[int]:
    """Online rule applied literally: recount levels and recompute n each time."""
    tau, w = config.tau, config.w
    T = len(d)
    r = [0] * (T + tau)
    for t in range(T):
        start = (t // tau) * tau
        end = start + tau
        for level in range(1, d[t] + 1):
            s_l = sum(1 for i in range(start, t + 1) if d[i] >= level)
            s_lw = sum(1 for i in range(start, t + 1) if d[i] >= level + w)
            if config.gamma > config.lam * s_l + (config.p - config.lam) * s_lw:
                continue
            n = active_reservations(r, tau)
            for s in range(t, end):
                if n[s] < level:
                    r[s] += 1
                    break
    return r[:T]


def naive_wang_plan(d, gamma: int, p: int, tau: int) -> list[int]:
    T = len(d)
    r = [0] * (T + tau)
    for t in range(T):
        for level in range(1, d[t] + 1):
            window = sum(1 for i in range(max(0, t - tau + 1), t + 1) if d[i] >= level)
            if gamma > p * window:
                continue
            n = active_reservations(r, tau)
            for s in range(t, t + tau):
                if n[s] < level:
                    r[s] += 1
                    break
    return r[:T]


def all_results(d, config):
    """Every schedule-emitting component, with the capacity and order it promises."""
    return [
        (plan_offline(d, config), config.w, False),
        (run_online(d, config), config.w, False),
        (pure_on_demand(d, config), 0, False),
        (edge_plus_on_demand(d, config), config.w, False),
        (wang_online(d, config), 0, False),
        (edge_plus_wang(d, config), config.w, True),
    ]


def assert_invariants(d, config) -> None:
    for result, capacity, edge_first in all_results(d, config):
        check_schedule(result.trace.demands, result.plan, result.schedule, config.tau,
                       capacity, edge_first=edge_first)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
