"""Command-line front end: single allocations and capacity sweeps to CSV.

Exit codes: 0 success, 2 usage (argparse), 3 scenario/input errors,
4 solver non-convergence or deadlock, 5 output I/O errors. All CSV output
is deterministic: rerunning the same command produces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import model, protocol
from .errors import ProtocolError, ScenarioError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_SOLVER = 4
EXIT_IO = 5

PRESETS = {
    "section5": model.two_carrier_nine_user,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carrieralloc",
        description=(
            "Price-selective multi-carrier rate allocation: per-carrier "
            "price discovery followed by price-ordered allocation with "
            "carrier aggregation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", metavar="PATH", help="scenario JSON file")
    src.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help="built-in scenario (two carriers, nine users)",
    )
    common.add_argument(
        "--set-capacity",
        metavar="ID=VALUE",
        action="append",
        default=[],
        help="override a carrier capacity; repeatable",
    )
    common.add_argument("--out", metavar="DIR", default="out", help="output directory")
    common.add_argument("--delta", type=float, default=None,
                        help="convergence threshold on bid changes")
    common.add_argument("--l1", type=float, default=None,
                        help="bid clamp amplitude")
    common.add_argument("--l2", type=float, default=None,
                        help="bid clamp decay length (iterations)")
    common.add_argument("--max-iters", type=int, default=None,
                        help="dual-ascent iteration cap")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")

    p_run = sub.add_parser("run", parents=[common],
                           help="single allocation, full report CSVs")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="rerun over a capacity range of one carrier")
    p_sweep.add_argument(
        "--sweep", metavar="ID=START:STOP:STEP", required=True,
        help="carrier id and inclusive capacity range",
    )
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def _solver_params(args) -> model.SolverParams:
    overrides = {}
    if args.delta is not None:
        overrides["delta"] = args.delta
    if args.l1 is not None:
        overrides["l1"] = args.l1
    if args.l2 is not None:
        overrides["l2"] = args.l2
    if args.max_iters is not None:
        overrides["max_outer_iters"] = args.max_iters
    return model.SolverParams(**overrides)


def _load_scenario(args) -> model.Scenario:
    if args.preset is not None:
        scenario = PRESETS[args.preset]()
    else:
        scenario = model.load_scenario(args.scenario)
    for spec in args.set_capacity:
        try:
            cid_text, value_text = spec.split("=", 1)
            cid = int(cid_text)
            value = float(value_text)
        except ValueError:
            raise ScenarioError(
                f"--set-capacity expects ID=VALUE, got {spec!r}"
            ) from None
        scenario = model.with_capacity(scenario, cid, value)
    return scenario


def _parse_sweep_spec(spec: str) -> tuple[int, list[float]]:
    try:
        cid_text, range_text = spec.split("=", 1)
        start_text, stop_text, step_text = range_text.split(":")
        cid = int(cid_text)
        start, stop, step = float(start_text), float(stop_text), float(step_text)
    except ValueError:
        raise ScenarioError(
            f"--sweep expects ID=START:STOP:STEP, got {spec!r}"
        ) from None
    if step <= 0:
        raise ScenarioError(f"sweep step must be > 0, got {step}")
    if start > stop:
        raise ScenarioError(f"sweep start {start} must not exceed stop {stop}")
    count = int((stop - start) / step + 1e-9) + 1
    return cid, [start + i * step for i in range(count)]


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_report_files(out: Path, scenario: model.Scenario,
                        report: protocol.AllocationReport) -> None:
    carrier_ids = sorted(scenario.carrier_ids())
    user_ids = sorted(scenario.user_ids())

    _write_csv(
        out / "allocations.csv",
        ["user_id", "carrier_id", "rate", "offset_used"],
        [
            [uid, cid, report.rates[cid][uid], report.offsets[cid][uid]]
            for uid in user_ids
            for cid in carrier_ids
            if uid in report.rates.get(cid, {})
        ],
    )
    _write_csv(
        out / "aggregates.csv",
        ["user_id", "r_agg"],
        [[uid, report.aggregates[uid]] for uid in user_ids],
    )
    _write_csv(
        out / "prices.csv",
        ["carrier_id", "offered_price", "allocation_price"],
        [
            [cid, report.offered_prices[cid], report.allocation_prices[cid]]
            for cid in carrier_ids
        ],
    )
    for cid in carrier_ids:
        for phase, trace in (
            ("offered", report.offered_traces[cid]),
            ("allocation", report.allocation_traces[cid]),
        ):
            _write_csv(
                out / f"trace_{cid}_{phase}.csv",
                ["iteration", "price", "user_id", "w", "r"],
                [
                    [step.iteration, step.price, uid, w, r]
                    for step in trace.steps
                    for uid, w, r in zip(trace.user_ids, step.bids, step.rates)
                ],
            )


def cmd_run(args) -> int:
    scenario = _load_scenario(args)
    params = _solver_params(args)
    report = protocol.run(scenario, params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_report_files(out, scenario, report)
    log.info("wrote report CSVs to %s", out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    params = _solver_params(args)
    sweep_cid, capacities = _parse_sweep_spec(args.sweep)
    if sweep_cid not in scenario.carrier_ids():
        raise ScenarioError(f"no carrier with id {sweep_cid}")
    carrier_ids = sorted(scenario.carrier_ids())

    price_rows = []
    aggregate_rows = []
    failures = 0
    for cap in capacities:
        point = model.with_capacity(scenario, sweep_cid, cap)
        try:
            report = protocol.run(point, params)
        except ProtocolError as e:
            failures += 1
            log.warning("sweep point %g failed: %s", cap, e)
            price_rows.append([cap] + [""] * len(carrier_ids) + [str(e)])
            continue
        price_rows.append(
            [cap] + [report.offered_prices[cid] for cid in carrier_ids] + ["ok"]
        )
        for uid in sorted(point.user_ids()):
            aggregate_rows.append([cap, uid, report.aggregates[uid]])

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "sweep_prices.csv",
        ["R_value"] + [f"p{cid}_offered" for cid in carrier_ids] + ["status"],
        price_rows,
    )
    _write_csv(
        out / "sweep_aggregates.csv",
        ["R_value", "user_id", "r_agg"],
        aggregate_rows,
    )
    log.info("wrote sweep CSVs to %s", out)
    if failures:
        print(f"{failures} of {len(capacities)} sweep points failed", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ProtocolError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
