"""CLI honoring the pluggable-auth conversation contract.

Prompt text goes to stdout (the conversation stream); the process exit
status carries the verdict: 0 success, 1 denied, 2 timeout, 3 error.
With --report, a machine-readable key=value line lands on stderr.
"""

from __future__ import annotations

import argparse
import sys

from pushauth.adapter.auth import AuthOutcome, authenticate
from pushauth.adapter.config import AdapterConfig
from pushauth.errors import ConfigError

EXIT_ERROR = 3


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the adapter contract reserves 2 for
    # timeout, so surface usage errors as exit 3 instead.
    def error(self, message: str) -> None:
        raise _ArgumentError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="pushauth-login",
        description="Authenticate an OS user by confirmation on an enrolled device.",
    )
    parser.add_argument("--user", required=True, help="OS username to authenticate")
    parser.add_argument("--config", required=True, help="adapter config (JSON)")
    parser.add_argument(
        "--timeout-ms", type=int, dest="timeout_ms", help="override config timeout"
    )
    parser.add_argument(
        "--report",
        action="store_true",
        help="emit state/duration_ms/request_id on stderr",
    )
    return parser


def report_line(outcome: AuthOutcome) -> str:
    return (
        f"state={outcome.outcome.value}"
        f" duration_ms={outcome.duration_ms:.1f}"
        f" request_id={outcome.request_id or '-'}"
    )


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"pushauth-login: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_ERROR

    try:
        config = AdapterConfig.from_file(args.config).with_timeout(args.timeout_ms)
    except ConfigError as exc:
        print(f"pushauth-login: {exc}", file=sys.stderr)
        return EXIT_ERROR

    outcome = authenticate(args.user, config)
    if args.report:
        print(report_line(outcome), file=sys.stderr)
    return outcome.exit_status


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
