"""Algorithm comparison, parameter sweeps and empirical ratio checks."""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ..baselines import edge_plus_on_demand, edge_plus_wang, pure_on_demand, wang_online
from ..model import DemandTrace, PlanResult, PricingConfig, ReservationPlan, ValidationError, evaluate
from ..offline import plan_offline
from ..online import run_online
from ..oracle import DEFAULT_BUDGET, optimal_exhaustive, optimal_in_Xprime


def oracle_plan(trace, config: PricingConfig, budget: int = DEFAULT_BUDGET) -> PlanResult:
    trace = trace if isinstance(trace, DemandTrace) else DemandTrace(tuple(trace))
    padded = trace.padded(config.tau)
    _, plan = optimal_exhaustive(trace, config, budget)
    full = ReservationPlan(plan.reservations + (0,) * (len(padded) - len(trace)))
    return evaluate("oracle", padded, full, config, len(trace))


ALGORITHMS: dict[str, Callable[[DemandTrace, PricingConfig], PlanResult]] = {
    "offline": plan_offline,
    "online": run_online,
    "e-od": edge_plus_on_demand,
    "wang": wang_online,
    "e-wang": edge_plus_wang,
    "ondemand": pure_on_demand,
    "oracle": oracle_plan,
}
DEFAULT_ALGORITHMS = ("offline", "online", "e-od", "wang", "e-wang", "ondemand")
RESERVING = ("offline", "online", "wang", "e-wang")


@dataclass
class ComparisonRow:
    algorithm: str
    result: PlanResult
    saving: Fraction | None

    @property
    def cost(self):
        return self.result.cost

    def record(self) -> dict:
        a_r, a_w, a_o = self.result.schedule.totals()
        return {
            "algorithm": self.algorithm,
            **self.cost.as_dict(),
            "saving": format_saving(self.saving),
            "reserved_requests": a_r,
            "edge_requests": a_w,
            "on_demand_requests": a_o,
            "reservations": self.result.plan.total,
        }


def format_saving(saving: Fraction | None) -> str:
    return "N/A" if saving is None else f"{float(saving):.6f}"


def run_comparison(trace, config: PricingConfig,
                   algorithms: Sequence[str] = DEFAULT_ALGORITHMS) -> list[ComparisonRow]:
    """Run each algorithm and report its saving over pure on-demand.

    Savings use the raw dollar total. A trace with no demand has no baseline
    cost and every saving is ``None``.
    """
    trace = trace if isinstance(trace, DemandTrace) else DemandTrace(tuple(trace))
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValidationError(f"unknown algorithms: {', '.join(unknown)}")
    baseline = pure_on_demand(trace, config).cost.raw_total
    rows = []
    for name in algorithms:
        result = ALGORITHMS[name](trace, config)
        saving = None if baseline == 0 else 1 - Fraction(result.cost.raw_total, baseline)
        rows.append(ComparisonRow(name, result, saving))
    return rows


@dataclass(frozen=True)
class SweepSpec:
    phi_values: tuple[float, ...] = (0.5, 1.0, 2.0, 3.0, 4.0)
    tau_values: tuple[int, ...] = (168, 336, 672)
    # edge capacity, in demand standard deviations, used while sweeping tau
    tau_sweep_phi: float = 1.0

    def __post_init__(self) -> None:
        if not self.phi_values or any(v <= 0 for v in self.phi_values):
            raise ValidationError("phi values must be positive")
        if not self.tau_values or any(int(v) != v or v <= 0 for v in self.tau_values):
            raise ValidationError("tau values must be positive integers")
        if self.tau_sweep_phi < 0:
            raise ValidationError("tau_sweep_phi must be non-negative")


def demand_std(trace: DemandTrace) -> float:
    return float(np.std(np.asarray(trace.demands, dtype=float)))


def capacity_for(phi: float, trace: DemandTrace) -> int:
    # round half up so results never depend on banker's rounding
    return int(math.floor(phi * demand_std(trace) + 0.5))


def scaled_gamma(base: PricingConfig, tau: int) -> int:
    """Upfront fee proportional to the reservation period."""
    return int(Fraction(base.gamma * tau, base.tau).__round__())


SWEEP_FIELDS = (
    "group", "vary", "value", "algorithm", "tau", "gamma", "w",
    "raw_total", "normalized_objective", "reservation_cost", "edge_cost",
    "on_demand_cost", "reserved_usage_cost", "saving",
    "reserved_requests", "edge_requests", "on_demand_requests", "reservations",
)


def sweep(traces: Mapping[str, DemandTrace], base: PricingConfig, spec: SweepSpec = SweepSpec(),
          vary: str = "phi", algorithms: Sequence[str] = DEFAULT_ALGORITHMS) -> list[dict]:
    """Long-format results over edge capacity (``phi``) or reservation period (``tau``)."""
    if vary not in ("phi", "tau"):
        raise ValidationError(f"vary must be 'phi' or 'tau', got {vary!r}")
    rows = []
    for group in sorted(traces):
        trace = traces[group]
        if vary == "phi":
            cells = [(phi, base.with_(edge_capacity=capacity_for(phi, trace))) for phi in spec.phi_values]
        else:
            w = capacity_for(spec.tau_sweep_phi, trace)
            cells = [
                (tau, base.with_(reservation_period=int(tau), upfront_price=scaled_gamma(base, int(tau)),
                                 edge_capacity=w))
                for tau in spec.tau_values
            ]
        for value, config in cells:
            for row in run_comparison(trace, config, algorithms):
                rec = row.record()
                rows.append({
                    "group": group,
                    "vary": vary,
                    "value": value,
                    "tau": config.tau,
                    "gamma": config.gamma,
                    "w": config.w,
                    **rec,
                })
    rows.sort(key=lambda r: (r["group"], r["value"], r["algorithm"]))
    return [{k: r[k] for k in SWEEP_FIELDS} for r in rows]


# -- empirical approximation / competitive ratios ---------------------------------


class RatioViolation(AssertionError):
    def __init__(self, check: str, instance: dict):
        self.check = check
        self.instance = instance
        super().__init__(f"{check} violated on {json.dumps(instance, sort_keys=True)}")


@dataclass(frozen=True)
class Instance:
    demands: tuple[int, ...]
    config: PricingConfig

    def as_dict(self) -> dict:
        return {"demands": list(self.demands), "config": asdict(self.config)}


def random_config(rng: random.Random, tau: int, max_w: int) -> PricingConfig:
    theta = rng.randint(0, 3)
    edge = theta + rng.randint(1, 6)
    on_demand = edge + rng.randint(1, 10)
    p = on_demand - theta
    # from free reservations up to ones that cannot pay off within one period
    gamma = rng.randint(0, p * tau + 1)
    return PricingConfig(on_demand, theta, gamma, edge, tau, rng.randint(0, max_w))


def random_instance(rng: random.Random, max_T: int, max_peak: int,
                    taus: Sequence[int] = (1, 2, 3, 4)) -> Instance:
    T = rng.randint(1, max_T)
    tau = rng.choice(list(taus))
    peak = rng.randint(0, max_peak)
    demands = tuple(rng.randint(0, peak) for _ in range(T))
    return Instance(demands, random_config(rng, tau, max_peak))


def random_instances(seed: int, count: int, max_T: int, max_peak: int,
                     taus: Sequence[int] = (1, 2, 3, 4)) -> list[Instance]:
    rng = random.Random(seed)
    return [random_instance(rng, max_T, max_peak, taus) for _ in range(count)]


def online_bound(config: PricingConfig) -> Fraction:
    return max(Fraction(6), Fraction(2 * config.p, config.lam))


@dataclass
class RatioReport:
    count: int = 0
    worst_offline: Fraction = Fraction(0)
    worst_online: Fraction = Fraction(0)
    # worst online ratio divided by its instance's bound max(6, 2p/lambda)
    worst_online_vs_bound: Fraction = Fraction(0)
    worst_online_bound: Fraction = Fraction(0)
    worst_online_no_edge: Fraction = Fraction(0)
    xprime_mismatches: int = 0
    violations: list[tuple[str, dict]] = field(default_factory=list)

    def rows(self) -> list[dict]:
        bound_note = f"max(6,2p/lambda) up to {float(self.worst_online_bound):.6f}"
        n_viol = Counter(check for check, _ in self.violations)
        return [
            {"check": "offline_vs_opt", "worst_ratio": f"{float(self.worst_offline):.6f}",
             "bound": "2", "instances": self.count, "violations": n_viol.get("offline_vs_opt", 0)},
            {"check": "online_vs_opt", "worst_ratio": f"{float(self.worst_online):.6f}",
             "bound": bound_note, "instances": self.count, "violations": n_viol.get("online_vs_opt", 0)},
            {"check": "online_vs_opt_over_bound", "worst_ratio": f"{float(self.worst_online_vs_bound):.6f}",
             "bound": "1", "instances": self.count, "violations": n_viol.get("online_vs_opt", 0)},
            {"check": "online_no_edge_vs_opt", "worst_ratio": f"{float(self.worst_online_no_edge):.6f}",
             "bound": "4", "instances": self.count, "violations": n_viol.get("online_no_edge_vs_opt", 0)},
            {"check": "offline_eq_xprime_opt", "worst_ratio": "", "bound": "equal",
             "instances": self.count, "violations": n_viol.get("offline_eq_xprime_opt", 0)},
        ]


def verify_ratios(seed: int, count: int, max_T: int = 8, max_peak: int = 3,
                  budget: int = DEFAULT_BUDGET, strict: bool = True,
                  instances: Iterable[Instance] | None = None) -> RatioReport:
    """Compare both planners with the exact optimum on random small instances.

    Checks, all in exact integer arithmetic on the normalized objective:
    offline <= 2 opt, online <= max(6, 2p/lambda) opt, online with no edge
    <= 4 opt (against the no-edge optimum), and offline equal to the best
    interval-start plan. With ``strict`` the first violation raises
    :class:`RatioViolation` carrying the instance.
    """
    if instances is None:
        instances = random_instances(seed, count, max_T, max_peak)
    report = RatioReport()

    def fail(check: str, inst: Instance) -> None:
        report.violations.append((check, inst.as_dict()))
        if strict:
            raise RatioViolation(check, inst.as_dict())

    for inst in instances:
        report.count += 1
        cfg = inst.config
        d = inst.demands
        opt, _ = optimal_exhaustive(d, cfg, budget)
        off = plan_offline(d, cfg).cost.normalized_objective
        on = run_online(d, cfg).cost.normalized_objective
        no_edge = cfg.with_(edge_capacity=0)
        opt0, _ = optimal_exhaustive(d, no_edge, budget)
        on0 = run_online(d, no_edge).cost.normalized_objective
        xprime, _ = optimal_in_Xprime(d, cfg)

        if off > 2 * opt:
            fail("offline_vs_opt", inst)
        bound = online_bound(cfg)
        if on * cfg.lam > max(6 * cfg.lam, 2 * cfg.p) * opt:
            fail("online_vs_opt", inst)
        if on0 > 4 * opt0:
            fail("online_no_edge_vs_opt", inst)
        if off != xprime:
            report.xprime_mismatches += 1
            fail("offline_eq_xprime_opt", inst)

        if opt:
            report.worst_offline = max(report.worst_offline, Fraction(off, opt))
            ratio = Fraction(on, opt)
            report.worst_online = max(report.worst_online, ratio)
            report.worst_online_vs_bound = max(report.worst_online_vs_bound, ratio / bound)
        report.worst_online_bound = max(report.worst_online_bound, bound)
        if opt0:
            report.worst_online_no_edge = max(report.worst_online_no_edge, Fraction(on0, opt0))
    return report
