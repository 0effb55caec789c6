"""Command-line entry point: ``coopsense run | compare | figures``.

Exit status is 0 on success, 1 for an invalid configuration and 2 for any
other failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import SCHEMA, RunConfig, dump_config, parse_rule, read_config_mapping
from .errors import ConfigError
from .orchestration import Scheme
from .report import write_comparison_csv, write_metrics_csv, write_sessions_csv
from .simulation import compare_schemes, run_replications

log = logging.getLogger("coopsense")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _int_list(text: str) -> list[int]:
    """``4,6,8`` or an inclusive range ``4-12``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _schema_help() -> str:
    width = max(len(k) for k in SCHEMA)
    lines = ["configuration keys (section.key = value):"]
    for key, (_, default, desc) in SCHEMA.items():
        lines.append(f"  {key:<{width}}  {desc} [default: {default}]")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopsense",
        description="Cooperative spectrum sensing simulator.",
        epilog=_schema_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="configuration file")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--seed", type=_u64, help="master seed")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--replications", type=_positive, help="number of replications")
    common.add_argument("--workers", type=_positive, help="worker processes")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate one scenario")

    cmp_parser = sub.add_parser("compare", parents=[common], help="sweep orchestration schemes")
    cmp_parser.add_argument("--schemes", default="centralized,decentralized,round-robin",
                            help="comma list of schemes")
    cmp_parser.add_argument("--nodes", type=_int_list, default=list(range(4, 13)),
                            help="node counts, e.g. 4-12 or 6,8,10")
    cmp_parser.add_argument("--rules", default=None,
                            help="comma list of fusion rules (or, and, adaptive, count:K, optimal:L)")

    sub.add_parser("figures", parents=[common], help="render the standard figures as SVG")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_mapping(args.config) if args.config else {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    if args.seed is not None:
        values["run.seed"] = str(args.seed)
    if args.replications is not None:
        values["run.replications"] = str(args.replications)
    if args.workers is not None:
        values["run.workers"] = str(args.workers)
    return RunConfig.from_mapping(values)


def cmd_run(config: RunConfig, out: Path) -> None:
    results = run_replications(config)
    write_sessions_csv(out / "sessions.csv", results)
    write_metrics_csv(out / "metrics.csv", results, config.top_n)
    for res in results:
        log.info("replication %d: RMSE_ME(%d) = %.6f", res.replication, config.top_n, res.rmse_me())


def cmd_compare(config: RunConfig, out: Path, args: argparse.Namespace) -> None:
    try:
        schemes = [Scheme(s.strip()) for s in args.schemes.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not schemes:
        raise ConfigError("no schemes given")
    if not args.nodes or min(args.nodes) < 1:
        raise ConfigError("no sensing nodes")
    rules = None if args.rules is None else [parse_rule(r) for r in args.rules.split(",")]
    rows = compare_schemes(config, schemes, args.nodes, rules)
    write_comparison_csv(out / "comparison.csv", rows)


def cmd_figures(config: RunConfig, out: Path) -> None:
    from .figures import render_all  # matplotlib is only needed here

    render_all(config, out, replications=config.replications, workers=config.workers)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        out: Path = args.out
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(dump_config(config))
        if args.command == "run":
            cmd_run(config, out)
        elif args.command == "compare":
            cmd_compare(config, out, args)
        else:
            cmd_figures(config, out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - report any failure as a runtime error
        log.debug("run failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
