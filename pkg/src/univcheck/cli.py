"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys

from .config import KEYS, ConfigError, RunConfig, read_config_file
from .pipeline import EXIT_ERROR, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="univcheck",
        description="Check univalence criteria for an analytic function on the unit disk.",
        epilog="Every flag has a config-file key of the same name with '-' replaced by '_'; flags win.",
    )
    parser.add_argument("--config", help="flat 'key = value' configuration file")
    for key in KEYS:
        if key.kind == "bool":
            parser.add_argument(key.flag, dest=key.name, action="store_const", const="true", default=None, help=key.help)
        else:
            parser.add_argument(
                key.flag,
                dest=key.name,
                default=None,
                metavar=key.name.upper(),
                help=argparse.SUPPRESS if key.hidden else f"{key.help} (default: {key.default})",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    flags = {k.name: (getattr(args, k.name), k.flag) for k in KEYS if getattr(args, k.name) is not None}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = RunConfig.from_layers(file_values, flags)
    except ConfigError as exc:
        print(f"univcheck: {exc}", file=sys.stderr)
        return EXIT_ERROR
    result = run(cfg)
    status = result.document["status"]
    crit = result.document["criterion"]
    verdict = crit["verdict"] if crit else "error"
    print(f"{verdict}: {status['message']} (exit {result.exit_code})")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
