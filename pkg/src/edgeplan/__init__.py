"""Reservation planning for an edge node renting VMs from a cloud."""

from .baselines import edge_plus_on_demand, edge_plus_wang, pure_on_demand, wang_online
from .model import (
    AllocationSchedule,
    CostBreakdown,
    DemandTrace,
    LengthMismatch,
    LevelView,
    Negative,
    NonPositive,
    PlanResult,
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
from .offline import OfflineResult, plan_offline, reserve_count_for_interval
from .online import OnlinePlanner, OnlineResult, run_online
from .oracle import BudgetExceeded, optimal_bruteforce, optimal_exhaustive, optimal_in_Xprime

__version__ = "0.1.0"
