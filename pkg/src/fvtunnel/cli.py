"""Command-line entry point: ``fvtunnel run|sweep|plot|selftest``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .config import ConfigError, ScenarioConfig, apply_overrides, from_dict, load
from .errors import FieldTheoryError
from .oracles import run_selftest
from .transport import emit_plot, read_csv, run_scenario, sweep_field, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario JSON file (built-in defaults if omitted)")
    p.add_argument("--grid-points", type=int, help="override grid.n_points")
    p.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="dotted-path config override, e.g. overrides.kappa_J=2 (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvtunnel", description="Soliton-pair tunneling out of a false vacuum."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single scenario, text report on stdout")
    _add_config_args(run)
    run.add_argument("--report", help="also write the report to this file")

    sweep = sub.add_parser("sweep", help="sweep the applied field and write a CSV table")
    _add_config_args(sweep)
    sweep.add_argument("--out", help="output directory (default: output.dir from the config)")

    plot = sub.add_parser("plot", help="write a gnuplot script for a sweep table")
    plot.add_argument("--table", required=True, help="CSV written by 'sweep'")
    plot.add_argument("--out", help="path of the plot script (default: output.plot next to the table)")

    selftest = sub.add_parser("selftest", help="compare fast paths with brute-force oracles")
    selftest.add_argument("--seed", type=int, default=0)
    selftest.add_argument("--draws", type=int, default=5)
    return parser


def _config(args) -> ScenarioConfig:
    cfg = load(args.config) if args.config else ScenarioConfig()
    overrides = list(args.override)
    if args.grid_points is not None:
        overrides.append(f"grid.n_points={args.grid_points}")
    return apply_overrides(cfg, overrides) if overrides else cfg


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_run(args) -> int:
    report = run_scenario(_config(args)).to_text()
    sys.stdout.write(report)
    if args.report:
        _write(args.report, report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    out_dir = args.out or cfg.output.dir
    os.makedirs(out_dir, exist_ok=True)
    rows = sweep_field(cfg)
    path = os.path.join(out_dir, cfg.output.csv)
    write_csv(rows, cfg, path)
    failed = sum(not r.ok for r in rows)
    print(f"wrote {len(rows)} rows ({failed} failed) to {path}")
    return EXIT_OK


def cmd_plot(args) -> int:
    rows, meta = read_csv(args.table)
    if "config" not in meta:
        raise ConfigError(f"{args.table}: no config metadata line")
    try:
        cfg = from_dict(json.loads(meta["config"]))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.table}: unreadable config metadata ({exc})") from exc
    out = args.out or os.path.join(os.path.dirname(args.table), cfg.output.plot)
    emit_plot(rows, cfg, args.table, out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(args.seed, args.draws)
    for name, passed, detail in results:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(p for _, p, _ in results) else EXIT_NUMERIC


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "plot": cmd_plot, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FieldTheoryError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # malformed tables and the like
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
