"""Bench CLI: run studies and materialize the default plan."""

from __future__ import annotations

import argparse
import sys

from pushauth.bench.plan import StudyPlan, default_study_plan
from pushauth.bench.report import emit_report
from pushauth.bench.run import run_study
from pushauth.errors import ConfigError, StudyError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pushauth-bench")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a study plan")
    run.add_argument("--plan", required=True, help="plan file (JSON)")
    run.add_argument("--seed", type=int, default=None, help="override plan seed")
    run.add_argument("--out", default=None, help="write the report here (default stdout)")
    run.add_argument("--format", choices=("text", "structured"), default="text")
    run.add_argument("--shuffle", action="store_true", default=None)
    run.add_argument(
        "--time-scale",
        type=float,
        default=None,
        dest="time_scale",
        help="compress injected latencies by this factor (e.g. 0.01)",
    )
    run.add_argument(
        "--successes-only",
        action="store_true",
        default=None,
        dest="successes_only",
        help="aggregate durations over successful attempts only",
    )

    default = sub.add_parser("default-plan", help="write the calibrated default plan")
    default.add_argument("--out", default=None)
    default.add_argument("--seed", type=int, default=42)
    default.add_argument("--series", type=int, default=30)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "default-plan":
            plan = default_study_plan(seed=args.seed, series=args.series)
            if args.out:
                plan.to_file(args.out)
            else:
                import json

                print(json.dumps(plan.to_dict(), indent=2))
            return 0

        plan = StudyPlan.from_file(args.plan).with_overrides(
            seed=args.seed,
            time_scale=args.time_scale,
            shuffle=args.shuffle,
            successes_only=args.successes_only,
        )
        summary = run_study(plan)
        emit_report(summary, args.format, args.out)
        return 0 if not summary.incomplete else 1
    except (ConfigError, StudyError) as exc:
        print(f"pushauth-bench: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
