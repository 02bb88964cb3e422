"""Command-line front end.

    python -m polariton_lab fig1 --out fig1.csv
    python -m polariton_lab sweep --config configs/sweep_lambda.json --format json
    python -m polariton_lab verify

A config file is one JSON document::

    {"command": "fig3", "params": {"lam_steps": 11}, "out": "fig3.csv",
     "format": "csv", "threads": 4}

Command-line flags override the file; ``--set key=value`` overrides single
entries of ``params`` (values are parsed as JSON when possible).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import figures, verify
from .errors import ConfigError, ConfigNotFound, PolaritonLabError

COMMANDS = ("fig1", "fig2", "fig3", "fig4", "fig5", "sweep", "verify")
FORMATS = ("csv", "json")
THREADS_ENV = "POLARITON_LAB_THREADS"
SIG_DIGITS = 12


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    threads: int | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.threads is not None and (int(self.threads) != self.threads or self.threads < 1):
            raise ConfigError("threads must be a positive integer")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be a JSON object")


def load_config(path: str | os.PathLike) -> dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigNotFound(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    unknown = set(data) - {"command", "params", "out", "format", "threads"}
    if unknown:
        raise ConfigError(f"{p}: unknown key(s) {sorted(unknown)}")
    return data


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = load_config(args.config) if args.config else {}
    command = args.command or data.get("command")
    if command is None:
        raise ConfigError("no command given on the command line or in the config")
    if args.command and data.get("command") not in (None, args.command):
        raise ConfigError(f"config is for {data['command']!r}, not {args.command!r}")
    params = dict(data.get("params", {}))
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        params[key] = _parse_value(value)
    threads = args.threads if args.threads is not None else data.get("threads")
    if threads is None and os.environ.get(THREADS_ENV):
        try:
            threads = int(os.environ[THREADS_ENV])
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from exc
    return RunConfig(
        command=command,
        params=params,
        out=args.out if args.out is not None else data.get("out"),
        format=args.format or data.get("format", "csv"),
        threads=threads,
    )


# --- formatting ------------------------------------------------------------


def _cell(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return format(x, f".{SIG_DIGITS}g")
    return str(x)


def _json_value(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(format(x, f".{SIG_DIGITS}g"))
    return x


def table_to_csv(table: figures.Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def tables_to_json(command: str, tables: Sequence[figures.Table]) -> str:
    doc = {
        "command": command,
        "tables": {
            t.name: [dict(zip(t.columns, map(_json_value, row))) for row in t.rows] for t in tables
        },
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def write_tables(command: str, tables: Sequence[figures.Table], fmt: str, out: str | None,
                 stream=None) -> list[Path]:
    """Write to ``out`` (one file per table for multi-table CSV) or to ``stream``."""
    stream = stream or sys.stdout
    if fmt == "json":
        text = tables_to_json(command, tables)
        if out is None:
            stream.write(text)
            return []
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return [path]
    if out is None:
        for i, t in enumerate(tables):
            if len(tables) > 1:
                stream.write(("\n" if i else "") + f"# table: {t.name}\n")
            stream.write(table_to_csv(t))
        return []
    base = Path(out)
    written = []
    for t in tables:
        if len(tables) == 1:
            path = base
        else:
            name = t.name if t.name.startswith(base.stem) else f"{base.stem}_{t.name}"
            path = base.with_name(name + (base.suffix or ".csv"))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(table_to_csv(t), encoding="utf-8")
        written.append(path)
    return written


# --- execution ---------------------------------------------------------------


@contextmanager
def grid_mapper(threads: int | None):
    """``map`` for one worker, an ordered process-pool map otherwise."""
    if not threads or threads <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        def pmap(fn, items):
            items = list(items)
            chunk = max(1, len(items) // (4 * threads))
            return pool.map(fn, items, chunksize=chunk)

        yield pmap


def run_figure(cfg: RunConfig) -> list[figures.Table]:
    # config validation (including stability) happens here, before any grid work
    try:
        fig_cfg = figures.CONFIGS[cfg.command].from_dict(cfg.params)
    except TypeError as exc:
        raise ConfigError(f"bad parameter value: {exc}") from exc
    with grid_mapper(cfg.threads) as mapper:
        return figures.BUILDERS[cfg.command](fig_cfg, mapper)


def run_verify(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    names = cfg.params.get("checks")
    if names is not None:
        bad = set(names) - set(verify.CHECKS)
        if bad:
            raise ConfigError(f"unknown check(s) {sorted(bad)}")
    results = verify.run_checks(names)
    for r in results:
        stream.write(r.line() + "\n")
    failed = [r.name for r in results if not r.passed]
    if failed:
        stream.write(f"FAILED {len(failed)}/{len(results)}: {', '.join(failed)}\n")
        return 1
    stream.write(f"all {len(results)} checks passed\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polariton-lab", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS,
                    help="subcommand; may come from the config's 'command' field instead")
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output path (stdout if omitted)")
    ap.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    ap.add_argument("--threads", type=int, help=f"worker processes (fallback: ${THREADS_ENV})")
    ap.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override one parameter; repeatable")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.command == "verify":
            return run_verify(cfg)
        tables = run_figure(cfg)
        for path in write_tables(cfg.command, tables, cfg.format, cfg.out):
            print(f"wrote {path}", file=sys.stderr)
    except PolaritonLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
