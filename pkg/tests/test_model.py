from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgeplan import (
    DemandTrace,
    LengthMismatch,
    Negative,
    NonPositive,
    PricingConfig,
    RegimeViolation,
    ReservationPlan,
    ValidationError,
    active_reservations,
    allocate,
    allocate_slot,
    dollars,
    evaluate_cost,
    interval_cost,
    level_view,
    reference_pricing,
    per_level_interval_cost,
    validate_config,
)
from edgeplan.model import AllocationSchedule, check_schedule

from .conftest import configs, demands


def test_dollars_exact():
    assert dollars("0.067") == 67_000
    assert dollars(0.067) == 67_000
    assert dollars("1.0452") == 1_045_200
    assert dollars(2) == 2_000_000
    with pytest.raises(ValidationError):
        dollars("0.0000001")


def test_reference_pricing_is_valid():
    cfg = reference_pricing(edge_capacity=12)
    assert (cfg.p, cfg.lam, cfg.gamma, cfg.tau, cfg.w) == (67_000, 30_000, 1_045_200, 168, 12)


@pytest.mark.parametrize(
    "args, error",
    [
        ((3, 0, 1, 3, 2, 1), RegimeViolation),  # edge price equal to on-demand
        ((3, 2, 1, 1, 2, 1), RegimeViolation),  # reserved usage above edge
        ((3, 1, 1, 1, 2, 1), RegimeViolation),  # reserved usage equal to edge
        ((3, 0, 1, 1, 0, 1), NonPositive),
        ((3, 0, -1, 1, 2, 1), Negative),
        ((3, 0, 1, 1, 2, -1), Negative),
        ((3, -1, 1, 1, 2, 1), Negative),
    ],
)
def test_validate_config_rejects(args, error):
    with pytest.raises(error):
        validate_config(*args)


def test_config_rejects_non_integers():
    with pytest.raises(ValidationError):
        PricingConfig(3.0, 0, 1, 1, 2, 1)
    with pytest.raises(ValidationError):
        PricingConfig(3, 0, 1, 1, True, 1)


def test_trace_validation_and_rounding():
    with pytest.raises(Negative):
        DemandTrace((1, -1))
    assert DemandTrace.from_values([0.2, 1.0, 2.5]).demands == (1, 1, 3)
    assert DemandTrace((1, 2, 3)).padded(2).demands == (1, 2, 3, 0)
    assert DemandTrace((1, 2)).padded(2).demands == (1, 2)


@pytest.mark.parametrize(
    "r, tau, n",
    [
        ([1, 0, 2, 0, 0, 0], 3, (1, 1, 3, 2, 2, 0)),
        ([3, 1, 4], 1, (3, 1, 4)),
        ([2, 0, 0, 0, 0, 0], 6, (2,) * 6),
    ],
)
def test_active_reservations(r, tau, n):
    assert active_reservations(r, tau) == n


@pytest.mark.parametrize(
    "d, n, w, expected", [(5, 2, 2, (2, 2, 1)), (1, 3, 2, (1, 0, 0)), (0, 4, 2, (0, 0, 0))]
)
def test_allocate_slot(d, n, w, expected):
    assert allocate_slot(d, n, w) == expected


def test_evaluate_cost_hand_example():
    cfg = PricingConfig(3, 0, 2, 1, 2, 1)
    cost = evaluate_cost([3, 3], [1, 0], cfg)
    assert list(allocate([3, 3], [1, 0], cfg).triples()) == [(1, 1, 1), (1, 1, 1)]
    assert cost.normalized_objective == 10
    assert cost.raw_total == 10


def test_no_reservations_cost():
    cfg = PricingConfig(9, 0, 10**9, 4, 3, 2)
    d = [0, 1, 5, 3]
    cost = evaluate_cost(d, [0] * 4, cfg)
    assert cost.normalized_objective == 4 * sum(min(x, 2) for x in d) + 9 * sum(max(x - 2, 0) for x in d)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        evaluate_cost([1, 2], [0], PricingConfig(3, 0, 1, 1, 2, 0))


@given(configs(), demands(), st.data())
def test_raw_minus_normalized_is_usage_price(cfg, d, data):
    r = data.draw(st.lists(st.integers(0, 3), min_size=len(d), max_size=len(d)))
    cost = evaluate_cost(d, r, cfg)
    assert cost.raw_total - cost.normalized_objective == cfg.reserved_usage_price * sum(d)
    assert cost.raw_total == (cost.reservation_cost + cost.edge_cost + cost.on_demand_cost
                              + cost.reserved_usage_cost)


@given(configs(), demands(), st.data())
def test_allocation_invariants(cfg, d, data):
    r = data.draw(st.lists(st.integers(0, 3), min_size=len(d), max_size=len(d)))
    check_schedule(d, r, allocate(d, r, cfg), cfg.tau, cfg.w)


def test_check_schedule_catches_violations():
    ok = AllocationSchedule((1,), (1,), (0,))
    check_schedule([2], [1], ok, 1, 1)
    with pytest.raises(AssertionError):
        check_schedule([3], [1], ok, 1, 1)  # demand lost
    with pytest.raises(AssertionError):
        check_schedule([2], [1], AllocationSchedule((0,), (1,), (1,)), 1, 1)  # idle reserved VM
    with pytest.raises(AssertionError):
        check_schedule([2], [0], AllocationSchedule((0,), (0,), (2,)), 1, 1)  # edge skipped
    with pytest.raises(AssertionError):
        check_schedule([2], [0], AllocationSchedule((1,), (1,), (0,)), 1, 1)  # uses missing VM


def test_level_view_examples():
    view = level_view([2, 2, 0], 3)
    assert [view.u(l) for l in (1, 2, 3)] == [2, 2, 0]
    assert view.u(1, 0) == 2
    assert level_view([5, 1], 2).peak == 5


@given(demands(), st.integers(1, 5))
def test_utilization_monotone_and_sums_to_demand(d, tau):
    view = level_view(d, tau)
    u = [view.u(l) for l in range(1, view.peak + 2)]
    assert all(a >= b for a, b in zip(u, u[1:]))
    assert sum(u) == sum(d)
    for k in range(view.interval_utilization.shape[0]):
        uk = [view.u(l, k) for l in range(1, view.peak + 2)]
        assert all(a >= b for a, b in zip(uk, uk[1:]))


def test_per_level_cost_examples():
    cfg = PricingConfig(3, 0, 2, 1, 2, 0)
    assert per_level_interval_cost([1, 1], [0, 0], cfg, 0, 1) == 3 * 2
    assert per_level_interval_cost([1, 1], [0, 0], cfg, 0, 2) == 0


@given(configs(), demands(), st.data())
def test_level_costs_sum_to_interval_cost(cfg, d, data):
    r = data.draw(st.lists(st.integers(0, 3), min_size=len(d), max_size=len(d)))
    top = max(max(d), max(r)) + 1
    K = -(-len(d) // cfg.tau)
    total = 0
    for k in range(K):
        parts = sum(per_level_interval_cost(d, r, cfg, k, l) for l in range(1, top + 1))
        assert parts == interval_cost(d, r, cfg, k)
        total += parts
    assert total == evaluate_cost(d, r, cfg).normalized_objective


def test_plan_type():
    assert ReservationPlan.empty(3).total == 0
    with pytest.raises(Negative):
        ReservationPlan((0, -1))
