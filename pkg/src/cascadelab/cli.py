"""Command-line entry point.

Each subcommand writes its tables (CSV or JSON) plus a ``manifest.json`` into
``--out``.  The manifest is written even when the run fails.

Exit codes: 0 success, 1 I/O error, 2 invalid configuration, 3 numerical
instability.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from cascadelab import __version__
from cascadelab import report
from cascadelab.commands import COMMANDS, RunResult, Table
from cascadelab.errors import ConfigError, InstabilityError

log = logging.getLogger("cascadelab")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_UNSTABLE = 0, 1, 2, 3


def _flag(name):
    return "--" + name.replace("_", "-")


def _bool_arg(text):
    low = str(text).lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cascadelab", description="Energy-cascade models and consistency checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_config=True):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
        if with_config:
            p.add_argument("--config", help="JSON file of parameters; flags override it")

    for name, (_, help_text, params) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        common(p)
        for prm in params:
            kw = dict(dest=prm.name, default=argparse.SUPPRESS, help=f"{prm.help} (default: {prm.default})")
            if prm.type is bool:
                p.add_argument(_flag(prm.name), nargs="?", const=True, type=_bool_arg, **kw)
            else:
                p.add_argument(_flag(prm.name), type=prm.type, choices=prm.choices, **kw)

    p = sub.add_parser("discrepancy-report", help="collect claims from run manifests into one table")
    common(p, with_config=False)
    p.add_argument("--dir", required=True, help="directory searched recursively for manifest.json")

    p = sub.add_parser("sweep", help="run a list of configurations, each into its own subdirectory")
    common(p, with_config=False)
    p.add_argument("--config", required=True, help='JSON: {"runs": [{"command": ..., "name": ..., params...}]}')
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    return parser


# -- configuration ----------------------------------------------------------------

def _coerce(prm, value):
    if value is None:
        if prm.default is None and not prm.required:
            return None
        raise ConfigError(f"{prm.name} may not be null")
    if prm.type is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{prm.name} must be true or false")
        return value
    if prm.type is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{prm.name} must be an integer")
        return int(value)
    if prm.type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{prm.name} must be a number")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{prm.name} must be a string")
    if prm.choices and value not in prm.choices:
        raise ConfigError(f"{prm.name} must be one of {', '.join(prm.choices)}")
    return value


def resolve_config(command: str, file_values: dict | None, cli_values: dict) -> dict:
    """Defaults, then the config file, then explicit flags."""
    _, _, params = COMMANDS[command]
    by_name = {p.name: p for p in params}
    merged = {p.name: p.default for p in params}
    for key, value in (file_values or {}).items():
        name = key.replace("-", "_")
        if name == "command":
            if value != command:
                raise ConfigError(f"config file is for {value!r}, not {command!r}")
            continue
        if name not in by_name:
            raise ConfigError(f"unknown parameter {key!r} for {command}")
        merged[name] = _coerce(by_name[name], value)
    for name, value in cli_values.items():
        if name in by_name:
            merged[name] = value
    for p in params:
        if p.required and merged[p.name] is None:
            raise ConfigError(f"{_flag(p.name)} is required")
        if p.type in (float,) and merged[p.name] is not None and not math.isfinite(merged[p.name]):
            raise ConfigError(f"{p.name} must be finite")
    return merged


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


# -- output -------------------------------------------------------------------------

def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _cell(v):
    v = _plain(v)
    return "" if v is None else v


def write_table(out: Path, name: str, table: Table, fmt: str) -> dict:
    if fmt == "json":
        path = out / f"{name}.json"
        doc = {"columns": table.columns, "rows": _plain(table.rows)}
        _atomic_write(path, json.dumps(doc, indent=1) + "\n")
    else:
        path = out / f"{name}.csv"
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(table.columns)
            for row in table.rows:
                w.writerow([_cell(v) for v in row])
        os.replace(tmp, path)
    return {"file": path.name, "rows": len(table.rows), "columns": list(table.columns)}


def write_manifest(out: Path, manifest: dict):
    _atomic_write(out / report.MANIFEST_NAME, json.dumps(_plain(manifest), indent=2, sort_keys=False) + "\n")


# -- running ---------------------------------------------------------------------------

def execute(command: str, config: dict, out, fmt: str = "csv") -> int:
    """Run one configured command into ``out``; always leaves a manifest."""
    out = Path(out)
    t0 = time.perf_counter()
    manifest = {
        "tool": "cascadelab",
        "version": __version__,
        "command": command,
        "status": "ok",
        "exit_code": EXIT_OK,
        "error": None,
        "config": config,
        "format": fmt,
        "derived": {},
        "outputs": [],
        "claims": [],
    }
    code = EXIT_OK
    try:
        out.mkdir(parents=True, exist_ok=True)
        result: RunResult = COMMANDS[command][0](config)
        manifest["derived"] = result.derived
        manifest["claims"] = result.claims
        for name, table in result.tables.items():
            manifest["outputs"].append(write_table(out, name, table, fmt))
    except InstabilityError as exc:
        code = EXIT_UNSTABLE
        manifest["error"] = {
            "type": "InstabilityError",
            "message": str(exc),
            "time": exc.time,
            "index": exc.index,
            "suggested_dt": exc.suggested_dt,
        }
    except (ConfigError, ValueError) as exc:
        code = EXIT_CONFIG
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except OSError as exc:
        code = EXIT_IO
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    manifest["wall_clock_s"] = time.perf_counter() - t0
    if code != EXIT_OK:
        manifest["status"] = "error"
        manifest["exit_code"] = code
        log.error("%s failed: %s", command, manifest["error"]["message"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_manifest(out, manifest)
    except OSError as exc:
        log.error("could not write manifest: %s", exc)
        return EXIT_IO
    return code


def _run_report(args) -> int:
    out = Path(args.out)
    t0 = time.perf_counter()
    manifest = {"tool": "cascadelab", "version": __version__, "command": "discrepancy-report",
                "status": "ok", "exit_code": EXIT_OK, "error": None,
                "config": {"dir": args.dir}, "outputs": [], "claims": []}
    code = EXIT_OK
    try:
        rep = report.discrepancy_report(args.dir)
        out.mkdir(parents=True, exist_ok=True)
        _atomic_write(out / "discrepancy_report.json", json.dumps(_plain(rep), indent=2) + "\n")
        manifest["outputs"].append({"file": "discrepancy_report.json", "rows": len(rep["rows"])})
        cols = ["claim_id", "source_run", "source_command", "measured", "reference", "rule", "tolerance", "consistent", "verdict", "claim"]
        table = Table(cols, [[r[c] for c in cols] for r in rep["rows"]])
        if args.format == "csv":
            manifest["outputs"].append(write_table(out, "discrepancy_report", table, "csv"))
        manifest["summary"] = rep["summary"]
    except (ValueError, FileNotFoundError) as exc:
        code = EXIT_CONFIG
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except OSError as exc:
        code = EXIT_IO
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
    manifest["wall_clock_s"] = time.perf_counter() - t0
    if code:
        manifest.update(status="error", exit_code=code)
        log.error("discrepancy-report failed: %s", manifest["error"]["message"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_manifest(out, manifest)
    except OSError:
        return EXIT_IO
    return code


def _sweep_task(task):
    command, values, out, fmt = task
    try:
        config = resolve_config(command, values, {})
    except ConfigError as exc:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        write_manifest(out, {"tool": "cascadelab", "version": __version__, "command": command,
                             "status": "error", "exit_code": EXIT_CONFIG,
                             "error": {"type": "ConfigError", "message": str(exc)},
                             "config": values, "outputs": [], "claims": []})
        return EXIT_CONFIG
    return execute(command, config, out, fmt)


def _run_sweep(args) -> int:
    try:
        sweep_doc = load_config_file(args.config)
        runs = sweep_doc.get("runs")
        if not isinstance(runs, list) or not runs:
            raise ConfigError("sweep config needs a non-empty 'runs' list")
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        tasks, names = [], set()
        for i, run in enumerate(runs):
            run = dict(run)
            command = run.pop("command", None)
            if command not in COMMANDS:
                raise ConfigError(f"run {i}: unknown command {command!r}")
            name = str(run.pop("name", f"{i:03d}_{command}"))
            if name in names or "/" in name or name in ("", ".", ".."):
                raise ConfigError(f"run {i}: invalid or duplicate name {name!r}")
            names.add(name)
            tasks.append((command, run, str(Path(args.out) / name), args.format))
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO

    if args.jobs == 1:
        codes = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_sweep_task, tasks))
    summary = [{"name": Path(t[2]).name, "command": t[0], "exit_code": c} for t, c in zip(tasks, codes)]
    Path(args.out).mkdir(parents=True, exist_ok=True)
    _atomic_write(Path(args.out) / "sweep_summary.json", json.dumps(summary, indent=2) + "\n")
    return max(codes)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "discrepancy-report":
        return _run_report(args)
    if args.command == "sweep":
        return _run_sweep(args)

    cli_values = {k: v for k, v in vars(args).items() if k not in ("command", "out", "format", "config", "verbose")}
    try:
        file_values = load_config_file(args.config) if args.config else None
        config = resolve_config(args.command, file_values, cli_values)
    except ConfigError as exc:
        print(f"cascadelab: {exc}", file=sys.stderr)
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_manifest(out, {"tool": "cascadelab", "version": __version__, "command": args.command,
                                 "status": "error", "exit_code": EXIT_CONFIG,
                                 "error": {"type": "ConfigError", "message": str(exc)},
                                 "config": cli_values, "outputs": [], "claims": []})
        except OSError:
            pass
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cascadelab: {exc}", file=sys.stderr)
        return EXIT_IO
    return execute(args.command, config, args.out, args.format)


if __name__ == "__main__":
    sys.exit(main())
