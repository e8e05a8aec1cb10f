"""Command-line front end.

Three commands: ``list-cases`` prints the registry, ``run`` integrates one
case and writes the final profile as CSV, ``order`` runs a resolution
sweep and writes the error table. Exit codes: 0 success, 1 usage error,
2 scheme abort (lost positivity or a failed wave solve).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cases import CASES, get_case
from .errors import PositivityError, SolverError, UsageError
from .harness import order_study, run_case

_PROFILE_HEADERS = {
    "gas": ("x", "rho", "momentum", "energy", "velocity", "pressure",
            "internal_energy"),
    "isothermal": ("x", "rho", "momentum", "velocity"),
    "burgers": ("x", "u"),
}

# order CSV always carries three error columns; models with fewer
# components leave the trailing ones empty, and the scalar model reports
# its single variable in the l1_rho slot.
_ORDER_HEADER = ("cells", "dx", "l1_rho", "l1_momentum", "l1_energy",
                 "slope")

_CONFIG_KEYS = {
    "case": str, "scheme": str, "cells": str, "cfl": float, "tend": float,
    "gamma": float, "c_sound": float, "safety": float, "selection": str,
    "coupling": str, "out": str,
}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage, which collides with the
    abort exit code here; route usage problems through UsageError."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="solverlab",
                     description="1D finite-volume solver laboratory")
    sub = parser.add_subparsers(dest="command")

    sub.add_parser("list-cases", help="print the benchmark registry")

    def common(p):
        p.add_argument("--case", help="registry case name")
        p.add_argument("--scheme", help="scheme id (default: case scheme)")
        p.add_argument("--cfl", type=float, help="CFL number")
        p.add_argument("--tend", type=float, help="override end time")
        p.add_argument("--gamma", type=float, help="ideal-gas exponent")
        p.add_argument("--c-sound", type=float, dest="c_sound",
                       help="isothermal sound speed")
        p.add_argument("--safety", type=float,
                       help="mesh speed safety factor (>= 1)")
        p.add_argument("--selection", choices=("one-shot", "two-shot"),
                       help="gas wave-selection mode")
        p.add_argument("--coupling", choices=("lxf", "nt"),
                       help="flux family at non-reconstructed interfaces")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--config",
                       help="key=value defaults file (flags win)")

    run_p = sub.add_parser("run", help="run one case, write the profile CSV")
    common(run_p)
    run_p.add_argument("--cells", help="cell count (default: case cells)")

    order_p = sub.add_parser("order",
                             help="resolution sweep, write the error table")
    common(order_p)
    order_p.add_argument("--cells", help="comma-separated cell counts, "
                                         "e.g. 100,200,400")
    return parser


def _read_config(path: str) -> dict[str, str]:
    opts: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err}")
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{ln}: expected key=value, got {raw!r}")
        opts[key.strip().replace("-", "_")] = value.strip()
    return opts


def _merge_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    config = _read_config(args.config)
    unknown = set(config) - set(_CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, conv in _CONFIG_KEYS.items():
        if key in config and getattr(args, key, None) is None:
            try:
                setattr(args, key, conv(config[key]))
            except ValueError:
                raise UsageError(
                    f"config value {key}={config[key]!r} is not a "
                    f"{conv.__name__}")


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _overrides(args) -> dict:
    out = {}
    for key in ("tend", "gamma", "c_sound", "coupling"):
        if getattr(args, key) is not None:
            out[key] = getattr(args, key)
    if args.safety is not None:
        out["safety"] = args.safety
    if args.selection is not None:
        out["selection"] = args.selection
    return out


def _cmd_list() -> int:
    fmt = "{:<22} {:<10} {:>6} {:>5} {:>7}  {:<11} {}"
    print(fmt.format("name", "model", "cells", "cfl", "t_end", "scheme",
                     "reference"))
    for case in CASES.values():
        print(fmt.format(case.name, case.model, case.cells,
                         f"{case.cfl:g}", f"{case.t_end:g}", case.scheme,
                         case.reference))
        print(f"    {case.summary}")
    return 0


def _parse_cells_single(value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"--cells expects an integer, got {value!r}")


def _parse_cells_list(value) -> list[int]:
    try:
        cells = [int(part) for part in str(value).split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"--cells expects comma-separated integers, "
                         f"got {value!r}")
    return cells


def _cmd_run(args) -> int:
    _require(args, "case", "out")
    case = get_case(args.case)
    cells = None if args.cells is None else _parse_cells_single(args.cells)
    result = run_case(case, args.scheme, cells, args.cfl,
                      with_errors=False, **_overrides(args))
    if result.failed is not None:
        print(f"solverlab: {case.name} aborted at step "
              f"{result.failed['step']}: {result.failed['message']}",
              file=sys.stderr)
        return 2
    _write_run_csv(args.out, result)
    steps = len(result.diagnostics["t"])
    print(f"{case.name}: {result.scheme} on {result.cells} cells, "
          f"{steps} steps to t = {result.t:g} "
          f"({result.walltime:.2f} s) -> {args.out}")
    return 0


def _write_run_csv(path: str, result) -> None:
    header = _PROFILE_HEADERS[result.case.model]
    cols = {"x": result.x}
    cols.update(result.model.primitives(result.field))
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(result.x.size):
            fh.write(",".join(f"{cols[name][i]:.17g}" for name in header)
                     + "\n")


def _cmd_order(args) -> int:
    _require(args, "case", "cells", "out")
    case = get_case(args.case)
    cells_list = _parse_cells_list(args.cells)
    rows, slope = order_study(case, args.scheme, cells_list, args.cfl,
                              **_overrides(args))
    _write_order_csv(args.out, rows, slope)
    tail = "exact" if slope is None else f"{slope:.3f}"
    print(f"{case.name}: order study over {cells_list} cells, "
          f"slope {tail} -> {args.out}")
    return 0


def _write_order_csv(path: str, rows, slope) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(_ORDER_HEADER) + "\n")
        for i, row in enumerate(rows):
            errs = list(row["errors"].values())
            cells_txt = [f"{row['cells']}", f"{row['dx']:.17g}"]
            for k in range(3):
                cells_txt.append(f"{errs[k]:.17g}" if k < len(errs) else "")
            if i == len(rows) - 1:
                cells_txt.append("exact" if slope is None
                                 else f"{slope:.17g}")
            else:
                cells_txt.append("")
            fh.write(",".join(cells_txt) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        if args.command == "list-cases":
            return _cmd_list()
        _merge_config(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_order(args)
    except UsageError as err:
        print(f"solverlab: error: {err}", file=sys.stderr)
        return 1
    except PositivityError as err:
        print(f"solverlab: aborted: {err}", file=sys.stderr)
        return 2
    except SolverError as err:
        print(f"solverlab: aborted: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
