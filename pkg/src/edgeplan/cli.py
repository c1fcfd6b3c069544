"""Command-line entry point.

Exit codes: 0 success, 2 validation error, 3 ratio violation, 4 oracle
budget exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import sys
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .harness.experiments import (
    ALGORITHMS,
    DEFAULT_ALGORITHMS,
    SWEEP_FIELDS,
    RatioViolation,
    SweepSpec,
    oracle_plan,
    run_comparison,
    sweep,
    verify_ratios,
)
from .harness.ingest import (
    IngestConfig,
    aggregate,
    fluctuation,
    group_by_fluctuation,
    ingest_trace,
    parse_config,
    read_demand_csv,
    read_events_csv,
    write_demand_csv,
)
from .harness.synth import synth_demand, synth_groups
from .model import ValidationError, active_reservations, reference_pricing
from .oracle import DEFAULT_BUDGET, BudgetExceeded

log = logging.getLogger("edgeplan")

EXIT_OK, EXIT_VALIDATION, EXIT_RATIO, EXIT_BUDGET = 0, 2, 3, 4

PLAN_ALGORITHMS = ("offline", "online", "e-od", "wang", "e-wang", "ondemand", "oracle")


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            yield fh


def _write_rows(fh: IO[str], fields: Sequence[str], rows: Iterable[dict]) -> None:
    writer = csv.DictWriter(fh, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def _write_csv(path: Path, fields: Sequence[str], rows: Iterable[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        _write_rows(fh, fields, rows)


def _load_trace(path: str):
    with open(path, newline="") as fh:
        return read_demand_csv(fh)


def _load_config(path: str | None, default_w: int = 0):
    if path is None:
        return reference_pricing(default_w)
    return parse_config(Path(path).read_text())


def cmd_ingest(args) -> int:
    cfg = IngestConfig(slot_seconds=args.slot_seconds, epoch_us=args.epoch_us,
                       aggregation="aggregate" if args.mode == "aggregate" else "per-user")
    with open(args.events, newline="") as fh:
        result = ingest_trace(read_events_csv(fh), cfg)
    if result.skipped:
        print(f"skipped {result.skipped} malformed records", file=sys.stderr)
    if args.mode == "aggregate":
        with _output(args.out) as fh:
            write_demand_csv(result.traces["aggregate"], fh)
    elif args.mode == "per-user":
        rows = (
            {"user_id": user, "slot": t, "demand": d}
            for user, trace in result.traces.items()
            for t, d in enumerate(trace.demands)
        )
        with _output(args.out) as fh:
            _write_rows(fh, ("user_id", "slot", "demand"), rows)
    else:
        if not args.out_dir:
            raise ValidationError("--mode groups needs --out-dir")
        groups = group_by_fluctuation(result.traces, cfg.high_threshold, cfg.low_threshold)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = []
        for name, users in groups.named().items():
            if users:
                total = aggregate(result.traces[u] for u in users)
                with open(out_dir / f"{name}.csv", "w", newline="") as fh:
                    write_demand_csv(total, fh)
            summary.append({"group": name, "users": len(users)})
        summary.append({"group": "zero_mean", "users": len(groups.zero_mean)})
        with _output(args.out) as fh:
            _write_rows(fh, ("group", "users"), summary)
    return EXIT_OK


def cmd_synth(args) -> int:
    trace = synth_demand(args.seed, args.T, args.mean, args.fluctuation, args.peak_cap,
                         burst_length=args.burst_length)
    print(f"fluctuation {fluctuation(trace):.4f}", file=sys.stderr)
    with _output(args.out) as fh:
        write_demand_csv(trace, fh)
    return EXIT_OK


def cmd_plan(args) -> int:
    trace = _load_trace(args.trace)
    config = _load_config(args.config)
    if args.algorithm == "oracle":
        result = oracle_plan(trace, config, args.budget)
    else:
        result = ALGORITHMS[args.algorithm](trace, config)
    n = active_reservations(result.plan, config.tau)
    rows = (
        {"slot": t, "demand": d, "reserve": r, "active": n[t],
         "reserved": a_r, "edge": a_w, "on_demand": a_o}
        for t, (d, r, (a_r, a_w, a_o)) in enumerate(
            zip(result.trace.demands, result.plan.reservations, result.schedule.triples()))
    )
    with _output(args.out) as fh:
        _write_rows(fh, ("slot", "demand", "reserve", "active", "reserved", "edge", "on_demand"), rows)
    print(json.dumps({"algorithm": result.algorithm, **result.cost.as_dict()}, sort_keys=True),
          file=sys.stderr)
    return EXIT_OK


COMPARE_FIELDS = (
    "algorithm", "reservation_cost", "edge_cost", "on_demand_cost", "reserved_usage_cost",
    "raw_total", "normalized_objective", "saving", "reserved_requests", "edge_requests",
    "on_demand_requests", "reservations",
)
COST_COMPONENTS = ("reservation_cost", "edge_cost", "on_demand_cost", "reserved_usage_cost")
REQUEST_OPTIONS = ("reserved_requests", "edge_requests", "on_demand_requests")


def _long(rows: Sequence[dict], keys: Sequence[str], columns: Sequence[str],
          name: str, value: str) -> list[dict]:
    return [
        {**{k: r[k] for k in keys}, name: c, value: r[c]}
        for r in rows
        for c in columns
    ]


def cmd_compare(args) -> int:
    trace = _load_trace(args.trace)
    config = _load_config(args.config)
    algorithms = args.algorithms or DEFAULT_ALGORITHMS
    rows = [row.record() for row in run_comparison(trace, config, algorithms)]
    with _output(args.out) as fh:
        _write_rows(fh, COMPARE_FIELDS, rows)
    if args.plot_data:
        out = Path(args.plot_data)
        _write_csv(out / "cost_breakdown.csv", ("algorithm", "component", "cost"),
                   _long(rows, ("algorithm",), COST_COMPONENTS, "component", "cost"))
        _write_csv(out / "request_allocation.csv", ("algorithm", "option", "requests"),
                   _long(rows, ("algorithm",), REQUEST_OPTIONS, "option", "requests"))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.traces:
        traces = {Path(p).stem: _load_trace(p) for p in args.traces}
    else:
        traces = synth_groups(args.seed, args.T, args.mean, burst_length=args.burst_length)
    base = _load_config(args.config)
    spec = SweepSpec(
        phi_values=tuple(args.phi) if args.phi else SweepSpec.phi_values,
        tau_values=tuple(args.tau) if args.tau else SweepSpec.tau_values,
    )
    rows = sweep(traces, base, spec, args.vary)
    with _output(args.out) as fh:
        _write_rows(fh, SWEEP_FIELDS, rows)
    if args.plot_data:
        out = Path(args.plot_data)
        key = args.vary
        renamed = [{**r, key: r["value"]} for r in rows]
        if args.vary == "phi":
            _write_csv(out / "saving_vs_phi.csv", ("group", "phi", "algorithm", "saving"), renamed)
            _write_csv(out / "cost_vs_phi.csv", ("group", "phi", "algorithm", "raw_total"), renamed)
            _write_csv(out / "cost_breakdown_vs_phi.csv",
                       ("group", "phi", "algorithm", "component", "cost"),
                       _long(renamed, ("group", "phi", "algorithm"), COST_COMPONENTS, "component", "cost"))
        else:
            _write_csv(out / "saving_vs_tau.csv", ("group", "tau", "algorithm", "saving"), renamed)
            _write_csv(out / "allocation_vs_tau.csv",
                       ("group", "tau", "algorithm", "option", "requests"),
                       _long(renamed, ("group", "tau", "algorithm"), REQUEST_OPTIONS, "option", "requests"))
    return EXIT_OK


def cmd_verify_ratios(args) -> int:
    try:
        report = verify_ratios(args.seed, args.count, args.max_T, args.max_peak,
                               budget=args.budget, strict=not args.keep_going)
    except RatioViolation as exc:
        print(json.dumps({"check": exc.check, "instance": exc.instance}, sort_keys=True),
              file=sys.stderr)
        return EXIT_RATIO
    with _output(args.out) as fh:
        _write_rows(fh, ("check", "worst_ratio", "bound", "instances", "violations"), report.rows())
    if report.violations:
        for check, inst in report.violations:
            print(json.dumps({"check": check, "instance": inst}, sort_keys=True), file=sys.stderr)
        return EXIT_RATIO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgeplan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="count task arrivals per slot")
    p.add_argument("events", help="CSV with header timestamp_us,user_id,task_id")
    p.add_argument("--slot-seconds", type=int, default=3600)
    p.add_argument("--epoch-us", type=int, default=0)
    p.add_argument("--mode", choices=("per-user", "aggregate", "groups"), default="aggregate")
    p.add_argument("--out")
    p.add_argument("--out-dir", help="where --mode groups writes group1..3.csv")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic demand trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--T", type=int, default=672)
    p.add_argument("--mean", type=float, default=40.0)
    p.add_argument("--fluctuation", type=float, default=1.0)
    p.add_argument("--peak-cap", type=int)
    p.add_argument("--burst-length", type=int, default=1, help="mean run length of busy slots")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plan", help="run one algorithm on a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--config", help="key=value pricing file (default: reference prices, w=0)")
    p.add_argument("--algorithm", choices=PLAN_ALGORITHMS, default="offline")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compare", help="compare algorithms on one trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--config")
    p.add_argument("--algorithms", nargs="+", choices=PLAN_ALGORITHMS)
    p.add_argument("--out")
    p.add_argument("--plot-data", metavar="DIR")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="sweep edge capacity or reservation period")
    p.add_argument("--vary", choices=("phi", "tau"), default="phi")
    p.add_argument("--traces", nargs="+", help="group traces; default synthesizes three groups")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--T", type=int, default=672)
    p.add_argument("--mean", type=float, default=40.0)
    p.add_argument("--burst-length", type=int, default=1, help="mean run length of busy slots")
    p.add_argument("--config", help="base pricing; gamma scales with tau relative to it")
    p.add_argument("--phi", type=float, nargs="+")
    p.add_argument("--tau", type=int, nargs="+")
    p.add_argument("--out")
    p.add_argument("--plot-data", metavar="DIR")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-ratios", help="check approximation and competitive ratios")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--max-T", type=int, default=8)
    p.add_argument("--max-peak", type=int, default=3)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--keep-going", action="store_true", help="collect every violation")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_ratios)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
