"""Task-event ingestion, fluctuation grouping and the plain-text file formats.

The event schema is a simplified CSV with header ``timestamp_us,user_id,task_id``,
one row per task arrival. To build it from the public Google cluster trace
(v2.1) ``task_events`` table, keep SUBMIT events (event type 0) and take
column 0 (timestamp, microseconds), column 4 (user name) and the pair
``job_id:task_index`` (columns 2 and 3) as the task id.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from ..model import DemandTrace, PricingConfig, ValidationError

log = logging.getLogger(__name__)

EVENT_HEADER = ("timestamp_us", "user_id", "task_id")
TRACE_HEADER = ("slot", "demand")
CONFIG_KEYS = ("p_prime", "theta", "gamma", "lambda_prime", "tau", "w")


class MalformedRecord(ValidationError):
    pass


class EmptyInput(ValidationError):
    pass


@dataclass(frozen=True)
class IngestConfig:
    slot_seconds: int = 3600
    high_threshold: float = 5.0
    low_threshold: float = 1.0
    aggregation: str = "per-user"
    epoch_us: int = 0

    def __post_init__(self) -> None:
        if self.slot_seconds <= 0:
            raise ValidationError("slot_seconds must be positive")
        if not 0 < self.low_threshold < self.high_threshold:
            raise ValidationError("thresholds must be positive with low < high")
        if self.aggregation not in ("per-user", "aggregate"):
            raise ValidationError(f"unknown aggregation {self.aggregation!r}")


@dataclass
class IngestResult:
    traces: dict[str, DemandTrace]
    skipped: int = 0


def _parse_record(record) -> tuple[int, str]:
    if isinstance(record, Mapping):
        try:
            record = tuple(record[k] for k in EVENT_HEADER)
        except KeyError as exc:
            raise MalformedRecord(f"missing field {exc}") from None
    if len(record) != 3:
        raise MalformedRecord(f"expected 3 fields, got {len(record)}")
    ts, user, _task = record
    try:
        ts = int(ts)
    except (TypeError, ValueError):
        raise MalformedRecord(f"bad timestamp {ts!r}") from None
    user = str(user).strip()
    if not user:
        raise MalformedRecord("empty user id")
    return ts, user


def ingest_trace(records: Iterable, config: IngestConfig = IngestConfig()) -> IngestResult:
    """Count task arrivals per user per slot.

    All users share one horizon, running from the epoch to the slot of the
    latest valid record. Malformed records and records before the epoch are
    skipped and counted.
    """
    slot_us = config.slot_seconds * 1_000_000
    counts: dict[str, Counter] = defaultdict(Counter)
    skipped = 0
    last_slot = -1
    for record in records:
        try:
            ts, user = _parse_record(record)
        except MalformedRecord as exc:
            skipped += 1
            log.debug("skipping record %r: %s", record, exc)
            continue
        if ts < config.epoch_us:
            skipped += 1
            continue
        slot = (ts - config.epoch_us) // slot_us
        counts[user][slot] += 1
        last_slot = max(last_slot, slot)
    if not counts:
        raise EmptyInput("no valid task records")
    if skipped:
        log.warning("skipped %d malformed records", skipped)
    T = last_slot + 1
    traces = {
        user: DemandTrace(tuple(c.get(t, 0) for t in range(T))) for user, c in counts.items()
    }
    if config.aggregation == "aggregate":
        traces = {"aggregate": aggregate(traces.values())}
    return IngestResult(dict(sorted(traces.items())), skipped)


def aggregate(traces: Iterable[DemandTrace]) -> DemandTrace:
    total = None
    for tr in traces:
        arr = np.asarray(tr.demands, dtype=np.int64)
        total = arr if total is None else total + arr
    if total is None:
        raise EmptyInput("nothing to aggregate")
    return DemandTrace(tuple(total.tolist()))


def fluctuation(trace: DemandTrace) -> float:
    """Population standard deviation over mean; NaN for a zero-mean trace."""
    d = np.asarray(trace.demands, dtype=float)
    mean = d.mean()
    if mean == 0:
        return math.nan
    return float(d.std() / mean)


@dataclass
class FluctuationGroups:
    high: list[str] = field(default_factory=list)
    medium: list[str] = field(default_factory=list)
    low: list[str] = field(default_factory=list)
    zero_mean: list[str] = field(default_factory=list)

    def named(self) -> dict[str, list[str]]:
        return {"group1": self.high, "group2": self.medium, "group3": self.low}


def group_by_fluctuation(traces: Mapping[str, DemandTrace],
                         high: float = 5.0, low: float = 1.0) -> FluctuationGroups:
    groups = FluctuationGroups()
    for user in sorted(traces):
        ratio = fluctuation(traces[user])
        if math.isnan(ratio):
            groups.zero_mean.append(user)
        elif ratio > high:
            groups.high.append(user)
        elif ratio >= low:
            groups.medium.append(user)
        else:
            groups.low.append(user)
    return groups


def read_events_csv(fh: IO[str]) -> Iterable[dict]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != EVENT_HEADER:
        raise ValidationError(f"event file header must be {','.join(EVENT_HEADER)}")
    return reader


def read_demand_csv(fh: IO[str]) -> DemandTrace:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
        raise ValidationError("demand file header must be slot,demand")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            rows.append((int(row[0]), float(row[1])))
        except (IndexError, ValueError):
            raise ValidationError(f"line {lineno}: bad row {row!r}") from None
    if not rows:
        raise EmptyInput("demand file has no rows")
    rows.sort()
    slots = [s for s, _ in rows]
    if slots != list(range(len(slots))):
        raise ValidationError("slots must be 0..T-1 without gaps")
    return DemandTrace.from_values(v for _, v in rows)


def write_demand_csv(trace: DemandTrace, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for t, d in enumerate(trace.demands):
        writer.writerow((t, d))


def parse_config(text: str) -> PricingConfig:
    """Read ``key=value`` lines; money in micro-dollars. ``#`` starts a comment."""
    values: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(raw)
        except ValueError:
            raise ValidationError(f"config line {lineno}: {key} must be an integer") from None
    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ValidationError(f"config missing keys: {', '.join(missing)}")
    return PricingConfig(
        on_demand_price=values["p_prime"],
        reserved_usage_price=values["theta"],
        upfront_price=values["gamma"],
        edge_unit_cost=values["lambda_prime"],
        reservation_period=values["tau"],
        edge_capacity=values["w"],
    )


def format_config(config: PricingConfig) -> str:
    pairs: Sequence[tuple[str, int]] = (
        ("p_prime", config.on_demand_price),
        ("theta", config.reserved_usage_price),
        ("gamma", config.upfront_price),
        ("lambda_prime", config.edge_unit_cost),
        ("tau", config.reservation_period),
        ("w", config.edge_capacity),
    )
    return "".join(f"{k}={v}\n" for k, v in pairs)
