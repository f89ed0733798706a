"""Command line entry point for the headless agent."""

from __future__ import annotations

import argparse
import logging
import sys

from pushauth.agent.profile import AgentProfile
from pushauth.agent.runner import AgentRunner
from pushauth.errors import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pushauth-agent",
        description="Simulated authenticator device answering requests per a profile.",
    )
    parser.add_argument("--profile", required=True, help="profile file (JSON)")
    parser.add_argument("--keys", required=True, help="key store file path")
    parser.add_argument("--service-url", required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--time-scale", type=float, default=1.0)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        profile = AgentProfile.from_file(args.profile)
    except ConfigError as exc:
        print(f"pushauth-agent: {exc}", file=sys.stderr)
        return 2
    runner = AgentRunner(
        profile,
        args.keys,
        args.service_url,
        seed=args.seed,
        time_scale=args.time_scale,
    )
    try:
        runner.run()
    except KeyboardInterrupt:
        runner.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
