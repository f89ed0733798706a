"""Command line entry point for the authentication service."""

from __future__ import annotations

import argparse
import logging
import sys

from pushauth.errors import ConfigError, PersistenceError
from pushauth.service.config import LISTEN_ENV_VAR, load_config
from pushauth.service.http import run_forever


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pushauth-service",
        description="Authentication service: device enrollment, challenge delivery, verdicts.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument(
        "--listen",
        help=f"host:port to listen on (also via ${LISTEN_ENV_VAR})",
    )
    parser.add_argument("--default-ttl-ms", type=int, dest="default_ttl_ms")
    parser.add_argument(
        "--long-poll-max-wait-ms", type=int, dest="long_poll_max_wait_ms"
    )
    parser.add_argument("--sweep-interval-ms", type=int, dest="sweep_interval_ms")
    parser.add_argument("--persistence", dest="persistence_path")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        config = load_config(
            args.config,
            listen_address=args.listen,
            default_ttl_ms=args.default_ttl_ms,
            long_poll_max_wait_ms=args.long_poll_max_wait_ms,
            sweep_interval_ms=args.sweep_interval_ms,
            persistence_path=args.persistence_path,
        )
        run_forever(config)
    except (ConfigError, PersistenceError) as exc:
        print(f"pushauth-service: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
