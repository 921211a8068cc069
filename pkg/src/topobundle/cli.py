"""Command-line front end.

    topobundle <command> [flags]

Every run prints one JSON object (``command``, ``inputs``, ``results``,
``meta``) or a CSV table.  Flags override keys read from ``--config`` files,
which override built-in defaults.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .berry_numerics import StateChain, wilson_loop_phase
from .errors import ArgumentError, TopoBundleError
from .invariants import ChernMethod, chern_number, classify, winding_number, zak_phase
from .sphere_bundle import SphereGrid, connection_analytic, curvature_analytic
from .ssh import (
    Boundary,
    SshConfig,
    build_chain,
    chain_spectrum,
    d_norm,
    default_zero_tol,
    edge_state_report,
    phi_path,
)
from .tolerances import DEFAULT, Tolerances
from .two_level import Band, section_array

COMMANDS = ("bands", "phi", "berry", "chern", "zak", "winding", "classify", "chain", "sweep")
FIGURES = ("phi-curve", "d-locus", "band-curve")

# key -> (default, parser); keys mirror the long flag names
OPTIONS = {
    "v": (1.0, float),
    "w": (2.0, float),
    "lattice-const": (1.0, float),
    "samples": (None, int),
    "grid": (None, str),
    "band": ("lower", str),
    "method": ("plaquette", str),
    "format": ("json", str),
    "output": ("-", str),
    "tol": ("", str),
    "locus": (False, None),
    "cells": (100, int),
    "boundary": ("open", str),
    "zero-tol": (None, float),
    "v-grid": ("0.5:2.0:7", str),
    "w-grid": ("0.5:2.0:7", str),
}

DEFAULT_SAMPLES = {"bands": 629, "phi": 629}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Table:
    columns: tuple
    rows: tuple

    def as_json(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


def _to_bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {text!r}")


def _parse_value(key: str, raw: Any) -> Any:
    default, conv = OPTIONS[key]
    if key == "locus":
        return raw if isinstance(raw, bool) else _to_bool(raw)
    if raw is None:
        return None
    try:
        return conv(raw)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {key}: {raw!r}") from None


def read_config_file(path: str) -> dict:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[run]\n" + fh.read(), source=path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc.message.splitlines()[0]}") from None
    out = {}
    for key, raw in parser.items("run"):
        if key not in OPTIONS:
            raise UsageError(f"unknown config key: {key}")
        out[key] = _parse_value(key, raw)
    return out


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("-v", dest="v", type=float, default=argparse.SUPPRESS, help="intra-cell hopping")
    common.add_argument("-w", dest="w", type=float, default=argparse.SUPPRESS, help="inter-cell hopping")
    common.add_argument("--lattice-const", dest="lattice-const", type=float, default=argparse.SUPPRESS)
    common.add_argument("-n", "--samples", dest="samples", type=int, default=argparse.SUPPRESS)
    common.add_argument("--grid", default=argparse.SUPPRESS, help="sphere grid RxC, e.g. 24x24")
    common.add_argument("--band", choices=("lower", "upper"), default=argparse.SUPPRESS)
    common.add_argument("--method", choices=[m.value for m in ChernMethod], default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="output path, '-' for stdout")
    common.add_argument("--tol", action="append", default=argparse.SUPPRESS, metavar="KEY=VAL")
    common.add_argument("--locus", action="store_true", default=argparse.SUPPRESS,
                        help="phi: emit the d(k) locus instead of phi(ka)")
    common.add_argument("--cells", type=int, default=argparse.SUPPRESS)
    common.add_argument("--boundary", choices=("open", "periodic"), default=argparse.SUPPRESS)
    common.add_argument("--zero-tol", dest="zero-tol", type=float, default=argparse.SUPPRESS)
    common.add_argument("--v-grid", dest="v-grid", default=argparse.SUPPRESS, metavar="START:STOP:NUM")
    common.add_argument("--w-grid", dest="w-grid", default=argparse.SUPPRESS, metavar="START:STOP:NUM")
    common.add_argument("--config", dest="config_file", action="append", default=[])
    common.add_argument("--print-config", action="store_true")

    parser = _Parser(prog="topobundle", description="Berry phases, Chern numbers and SSH topology.")
    parser.add_argument("--version", action="version", version=f"topobundle {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(argv: Sequence[str]) -> tuple[str, dict, Tolerances, bool]:
    ns = vars(_build_parser().parse_args(list(argv)))
    command = ns.pop("command", None)
    if command is None:
        raise UsageError("missing command; choose from " + ", ".join(COMMANDS))
    files = ns.pop("config_file")
    print_config = ns.pop("print_config")

    cfg = {k: d for k, (d, _) in OPTIONS.items()}
    for path in files:
        cfg.update(read_config_file(path))
    if "tol" in ns:
        ns["tol"] = ",".join(ns["tol"])
    cfg.update(ns)
    if cfg["samples"] is None:
        cfg["samples"] = DEFAULT_SAMPLES.get(command, 1024)

    overrides = {}
    for item in filter(None, (s.strip() for s in str(cfg["tol"]).split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects KEY=VAL, got {item!r}")
        try:
            overrides[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"invalid tolerance value: {item!r}") from None
    try:
        tol = DEFAULT.replace(**overrides)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if any(not (x > 0) for x in tol.as_dict().values()):
        raise UsageError("tolerances must be positive")

    if cfg["samples"] < 1:
        raise UsageError("samples must be positive")
    if cfg["cells"] < 1:
        raise UsageError("cells must be positive")
    if cfg["lattice-const"] <= 0:
        raise UsageError("lattice-const must be positive")
    if cfg["zero-tol"] is not None and cfg["zero-tol"] <= 0:
        raise UsageError("zero-tol must be positive")
    for key, choices in (("band", ("lower", "upper")), ("format", ("csv", "json")),
                         ("boundary", ("open", "periodic")),
                         ("method", tuple(m.value for m in ChernMethod))):
        if cfg[key] not in choices:
            raise UsageError(f"{key} must be one of {', '.join(choices)}")
    if cfg["grid"] is not None:
        parse_grid(cfg["grid"])
    parse_range(cfg["v-grid"])
    parse_range(cfg["w-grid"])
    return command, cfg, tol, print_config


def parse_grid(text: str) -> tuple[int, int]:
    rows, sep, cols = str(text).lower().partition("x")
    try:
        out = (int(rows), int(cols))
    except ValueError:
        raise UsageError(f"grid must look like RxC, got {text!r}") from None
    if not sep or min(out) < 1:
        raise UsageError(f"grid must look like RxC with positive sizes, got {text!r}")
    return out


def parse_range(text: str) -> np.ndarray:
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"range must be START:STOP:NUM, got {text!r}") from None
    if num < 1:
        raise UsageError("range NUM must be positive")
    return np.linspace(start, stop, num)


def _ssh(cfg: dict) -> SshConfig:
    try:
        return SshConfig(cfg["v"], cfg["w"], cfg["lattice-const"])
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None


def emit_figure_data(kind: str, cfg: SshConfig, n: int, tol: Tolerances = DEFAULT) -> Table:
    """Plot-ready samples over a monotone ka grid spanning [-pi, pi]."""
    if n < 2:
        raise ValueError("need at least two samples")
    ka = np.linspace(-math.pi, math.pi, n)
    ks = ka / cfg.a
    if kind == "phi-curve":
        cols = ("ka", "phi_unwrapped")
        data = (ka, phi_path(ks, cfg, tol))
    elif kind == "d-locus":
        cols = ("dx", "dy")
        data = (cfg.v + cfg.w * np.cos(ka), cfg.w * np.sin(ka))
    elif kind == "band-curve":
        e = d_norm(ks, cfg)
        cols = ("ka", "E_lower", "E_upper")
        data = (ka, -e, e)
    else:
        raise ValueError(f"unknown figure {kind!r}; choose from {', '.join(FIGURES)}")
    rows = tuple(tuple(float(x) for x in r) for r in zip(*data))
    return Table(cols, rows)


def _berry_table(band: Band, n_theta: int, n_phi: int, tol: Tolerances) -> Table:
    """Per-latitude analytic connection/curvature next to the discrete holonomy."""
    grid = SphereGrid(n_theta, n_phi, tol.overlap_eps)
    rows = []
    for i, theta in enumerate(grid.thetas):
        chart = grid.regular_chart(i)
        a = connection_analytic(float(theta), chart, band, tol).a_phi
        f = curvature_analytic(float(theta), band).f_theta_phi
        states = section_array(theta, grid.phis, band, chart)
        hol = wilson_loop_phase(StateChain(states, closed=True), tol)
        rows.append((float(theta), chart.value, a, f, hol))
    return Table(("theta", "chart", "a_phi", "f_theta_phi", "holonomy"), tuple(rows))


def run_command(command: str, cfg: dict, tol: Tolerances) -> tuple[dict, Any]:
    """Returns (inputs, results); results is a dict of scalars or a Table."""
    n = cfg["samples"]
    if command in ("bands", "phi"):
        ssh = _ssh(cfg)
        kind = "band-curve" if command == "bands" else ("d-locus" if cfg["locus"] else "phi-curve")
        inputs = {"v": ssh.v, "w": ssh.w, "lattice_const": ssh.a, "samples": n, "figure": kind}
        return inputs, emit_figure_data(kind, ssh, n, tol)
    if command == "berry":
        r, c = parse_grid(cfg["grid"] or "24x24")
        inputs = {"band": cfg["band"], "grid": f"{r}x{c}"}
        return inputs, _berry_table(Band(cfg["band"]), r, c, tol)
    if command == "chern":
        r, c = parse_grid(cfg["grid"]) if cfg["grid"] else (None, None)
        method = ChernMethod(cfg["method"])
        try:
            res = chern_number(Band(cfg["band"]), r, c, method, tol=tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inputs = {"band": cfg["band"], "grid": f"{res.n_theta}x{res.n_phi}", "method": method.value}
        return inputs, {"chern": res.value, "raw_total": res.raw_total, "accepted": res.accepted(tol)}
    if command in ("zak", "winding", "classify"):
        ssh = _ssh(cfg)
        if n < 16:
            raise UsageError("BZ loops need at least 16 samples")
        inputs = {"v": ssh.v, "w": ssh.w, "lattice_const": ssh.a, "samples": n}
        if command == "zak":
            z = zak_phase(ssh, n, tol=tol)
            zak = z.phase if z.snapped_value is None else z.snapped_value
            return inputs, {"zak": zak, "snapped": z.snapped.value, "zak_raw": z.phase}
        if command == "winding":
            return inputs, {"winding": winding_number(ssh, n, tol)}
        rep = classify(ssh, n, tol)
        return inputs, _report_dict(rep)
    if command == "chain":
        ssh = _ssh(cfg)
        boundary = Boundary(cfg["boundary"])
        zero_tol = cfg["zero-tol"] or default_zero_tol(ssh, tol)
        try:
            m = build_chain(cfg["cells"], ssh, boundary)
        except ArgumentError as exc:
            raise UsageError(str(exc)) from None
        spectrum = chain_spectrum(m)
        rep = edge_state_report(spectrum, cfg["cells"], zero_tol)
        inputs = {"v": ssh.v, "w": ssh.w, "cells": cfg["cells"], "boundary": boundary.value,
                  "zero_tol": zero_tol}
        if cfg["format"] == "csv":
            return inputs, Table(("index", "energy"), tuple((i, float(e)) for i, e in enumerate(spectrum.energies)))
        return inputs, {
            "edge_count": rep.count,
            "edge_energies": [float(e) for e in rep.energies],
            "left_weight": [float(x) for x in rep.left_weight],
            "right_weight": [float(x) for x in rep.right_weight],
            "max_residual": spectrum.max_residual,
            "energies": [float(e) for e in spectrum.energies],
        }
    if command == "sweep":
        vs, ws = parse_range(cfg["v-grid"]), parse_range(cfg["w-grid"])
        rows = []
        for v in vs:
            for w in ws:
                try:
                    rep = classify(SshConfig(float(v), float(w), cfg["lattice-const"]), max(n, 16), tol)
                except ArgumentError as exc:
                    raise UsageError(f"v={v}, w={w}: {exc}") from None
                d = _report_dict(rep)
                rows.append(tuple(d.values()))
        inputs = {"v_grid": cfg["v-grid"], "w_grid": cfg["w-grid"], "samples": max(n, 16)}
        return inputs, Table(tuple(_report_dict(rep).keys()), tuple(rows))
    raise UsageError(f"unknown command {command!r}")


def _report_dict(rep) -> dict:
    return {
        "v": rep.v,
        "w": rep.w,
        "gap": rep.gap,
        "gap_location": rep.gap_location,
        "zak": rep.zak,
        "zak_raw": rep.zak_raw,
        "winding": rep.winding,
        "label": rep.label.value,
    }


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(command: str, inputs: dict, results: Any, fmt: str, tol: Tolerances) -> str:
    if fmt == "json":
        doc = {
            "command": command,
            "inputs": inputs,
            "results": results.as_json() if isinstance(results, Table) else results,
            "meta": {"tool": "topobundle", "version": __version__, "tolerances": tol.as_dict()},
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(results, Table):
        writer.writerow(results.columns)
        writer.writerows([[_csv_cell(x) for x in r] for r in results.rows])
    else:
        flat = {k: v for k, v in results.items() if not isinstance(v, list)}
        writer.writerow(flat.keys())
        writer.writerow([_csv_cell(v) for v in flat.values()])
    return buf.getvalue()


def format_config(command: str, cfg: dict) -> str:
    lines = [f"# effective configuration for: {command}"]
    for key in OPTIONS:
        val = cfg[key]
        if val is None:
            continue
        lines.append(f"{key} = {str(val).lower() if isinstance(val, bool) else val}")
    return "\n".join(lines) + "\n"


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        command, cfg, tol, print_config = resolve_config(argv)
        if print_config:
            _write(format_config(command, cfg), cfg["output"])
            return 0
        inputs, results = run_command(command, cfg, tol)
        text = render(command, inputs, results, cfg["format"], tol)
    except UsageError as exc:
        print(f"topobundle: usage error: {exc}", file=sys.stderr)
        return 2
    except TopoBundleError as exc:
        print(f"topobundle: {exc}", file=sys.stderr)
        return 1
    try:
        _write(text, cfg["output"])
    except OSError as exc:
        print(f"topobundle: cannot write {cfg['output']}: {exc.strerror}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
