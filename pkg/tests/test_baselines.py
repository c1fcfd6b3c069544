from __future__ import annotations

from hypothesis import given

from edgeplan import (
    PricingConfig,
    edge_plus_on_demand,
    edge_plus_wang,
    evaluate_cost,
    pure_on_demand,
    wang_online,
)
from edgeplan.baselines import wang_plan

from .conftest import configs, demands, naive_wang_plan


def test_pure_on_demand_ignores_edge():
    cfg = PricingConfig(5, 1, 3, 2, 2, 4)
    result = pure_on_demand([3, 1], cfg)
    assert result.schedule.totals() == (0, 0, 4)
    assert result.cost.raw_total == 5 * 4


def test_edge_plus_on_demand_split():
    cfg = PricingConfig(5, 0, 3, 2, 1, 2)
    result = edge_plus_on_demand([5], cfg)
    assert list(result.schedule.triples()) == [(0, 2, 3)]


def test_edge_plus_on_demand_all_edge():
    cfg = PricingConfig(5, 0, 3, 2, 2, 9)
    d = [3, 1, 4, 1]
    assert edge_plus_on_demand(d, cfg).cost.raw_total == 2 * sum(d)


def test_edge_plus_on_demand_without_edge_is_on_demand():
    cfg = PricingConfig(5, 0, 3, 2, 2, 0)
    d = [3, 1, 4]
    assert edge_plus_on_demand(d, cfg).cost == pure_on_demand(d, cfg).cost


def test_wang_ignores_single_spike():
    cfg = PricingConfig(3, 0, 4, 1, 5, 2)
    result = wang_online([9, 0, 0, 0, 0], cfg)
    assert result.plan.total == 0
    assert result.schedule.totals() == (0, 0, 9)


def test_wang_constant_demand_reserves_when_window_pays():
    # gamma = 7, p = 3: the window count reaches ceil(7/3) = 3 at the third slot
    assert wang_plan([1] * 8, 7, 3, 8) == [0, 0, 1, 0, 0, 0, 0, 0]
    assert wang_plan([1] * 8, 6, 3, 8) == [0, 1, 0, 0, 0, 0, 0, 0]


def test_wang_window_slides_across_intervals():
    # demand before an interval boundary still counts after it
    assert wang_plan([0, 0, 1, 1, 1, 0], 9, 3, 3) == [0, 0, 0, 0, 1, 0]


@given(configs(), demands())
def test_wang_never_uses_edge(cfg, d):
    assert wang_online(d, cfg).schedule.totals()[1] == 0


@given(configs(), demands())
def test_wang_matches_literal_rule(cfg, d):
    padded = list(wang_online(d, cfg).trace.demands)
    assert wang_plan(padded, cfg.gamma, cfg.p, cfg.tau) == naive_wang_plan(padded, cfg.gamma, cfg.p, cfg.tau)


@given(configs(), demands())
def test_edge_plus_wang_cost_identity(cfg, d):
    result = edge_plus_wang(d, cfg)
    padded = result.trace.demands
    residual = [max(x - cfg.w, 0) for x in padded]
    on_residual = evaluate_cost(residual, result.plan, cfg.with_(edge_capacity=0))
    edge = cfg.edge_unit_cost * sum(min(x, cfg.w) for x in padded)
    assert result.cost.raw_total == edge + on_residual.raw_total
    assert result.plan.reservations == tuple(wang_plan(residual, cfg.gamma, cfg.p, cfg.tau))


@given(configs(), demands())
def test_edge_plus_wang_without_edge_is_wang(cfg, d):
    cfg = cfg.with_(edge_capacity=0)
    assert edge_plus_wang(d, cfg).cost == wang_online(d, cfg).cost


def test_edge_plus_wang_all_edge():
    cfg = PricingConfig(5, 0, 1, 2, 2, 9)
    d = [3, 1, 4, 1]
    result = edge_plus_wang(d, cfg)
    assert result.plan.total == 0
    assert result.cost.raw_total == 2 * sum(d)
