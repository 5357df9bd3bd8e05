"""Command-line entry point ``lambshift``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__, analytic, harness
from .errors import ConfigurationError, LambShiftError, NumericFailureError
from .hilbert import FockConfig, SystemParams
from .routes import compute_shifts
from .spectrum import SHIFT_FIELDS, Route, converge

log = logging.getLogger("lambshift")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# config-file keys and their argparse destinations
CONFIG_KEYS = {
    "omega-a": "omega_a",
    "omega-r": "omega_r",
    "lambda": "lambda_",
    "g": "g",
    "normalized": "normalized",
    "n-atom": "n_atom",
    "n-res": "n_res",
    "tol": "tol",
    "routes": "routes",
    "out": "out",
    "format": "format",
    "swept": "swept",
    "start": "start",
    "stop": "stop",
    "count": "count",
    "spacing": "spacing",
    "jobs": "jobs",
}
DEFAULTS = {
    "omega_a": 1.0,
    "omega_r": 1.25,
    "lambda_": harness.FIGURE_LAMBDA,
    "g": harness.FIGURE_G,
    "normalized": True,
    "n_atom": 15,
    "n_res": 15,
    "tol": None,
    "routes": ",".join(r.value for r in Route),
    "out": None,
    "format": "csv",
    "swept": "detuning",
    "start": -0.5,
    "stop": 0.9,
    "count": 181,
    "spacing": "linear",
    "jobs": 1,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lstrip("-").replace("_", "-")
        if not sep or key not in CONFIG_KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unrecognized line {raw!r}")
        out[CONFIG_KEYS[key]] = value.strip()
    return out


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {v!r}")


_CASTS = {
    "omega_a": float, "omega_r": float, "lambda_": float, "g": float,
    "normalized": _bool, "n_atom": int, "n_res": int, "tol": float,
    "start": float, "stop": float, "count": int, "jobs": int,
}


def resolve(args) -> dict:
    """Merge defaults < config file < explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    for key, cast in _CASTS.items():
        if merged[key] is not None:
            try:
                merged[key] = cast(merged[key])
            except ValueError:
                raise ConfigurationError(f"invalid value for {key}: {merged[key]!r}") from None
    return merged


def build_params(opts) -> SystemParams:
    p = SystemParams(opts["omega_a"], opts["omega_r"], opts["lambda_"], opts["g"])
    return p.scaled(p.omega_a) if opts["normalized"] else p


def build_routes(opts):
    names = [s.strip() for s in str(opts["routes"]).split(",") if s.strip()]
    try:
        return tuple(Route(n) for n in names)
    except ValueError as exc:
        raise ConfigurationError(f"{exc}; choose from {[r.value for r in Route]}") from None


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc


def cmd_shifts(args, opts):
    params = build_params(opts)
    cfg = FockConfig(opts["n_atom"], opts["n_res"])
    routes = build_routes(opts)
    columns = ["route", *SHIFT_FIELDS, "vacuum_fraction", "flags"]
    table = []
    for route in routes:
        try:
            if route is Route.NUMERIC and opts["tol"] is not None:
                s = converge(params, cfg, opts["tol"])[0]
            else:
                s = compute_shifts(params, route, cfg)
        except NumericFailureError as exc:
            if len(routes) == 1:
                raise
            log.warning("%s route failed: %s", route.value, exc)
            table.append([route.value, *([None] * (len(columns) - 2)), frozenset({"numeric_failure"})])
            continue
        frac = s.chi_ar / abs(s.delta_omega_a) if s.delta_omega_a else None
        table.append([route.value, *(getattr(s, f) for f in SHIFT_FIELDS), frac, s.flags])
    _emit(harness.render_table(columns, table, opts["format"], "shifts"), opts["out"])


def cmd_sweep(args, opts):
    params = build_params(opts)
    unit = opts["omega_a"] if opts["normalized"] else 1.0
    spec = harness.SweepSpec(
        swept=opts["swept"],
        start=opts["start"] / unit,
        stop=opts["stop"] / unit,
        count=opts["count"],
        spacing=opts["spacing"],
        fixed=params,
        cfg=FockConfig(opts["n_atom"], opts["n_res"]),
        routes=build_routes(opts),
        tol=opts["tol"],
    )
    rows = harness.run_sweep(spec, n_jobs=opts["jobs"])
    columns, table = harness.sweep_table(spec, rows)
    _emit(harness.render_table(columns, table, opts["format"], "sweep"), opts["out"])


def cmd_figure(args, opts):
    overrides = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key in ("n_atom", "n_res", "tol"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    out = opts["out"] or f"{args.which}.{opts['format']}"
    path = harness.figure_data(args.which, overrides, out=out, fmt=opts["format"], n_jobs=opts["jobs"])
    print(path)


def cmd_check(args, opts):
    params = build_params(opts)
    report = harness.check_point(params, FockConfig(opts["n_atom"], opts["n_res"]))
    if opts["format"] == "json":
        _emit(json.dumps(report.as_dict(), indent=1) + "\n", opts["out"])
    else:
        lines = [f"{k}: {harness.format_value(v)}" for k, v in report.as_dict().items()]
        _emit("\n".join(lines) + "\n", opts["out"])


def cmd_convert(args, opts):
    circuit = analytic.TransmonCircuit(args.l_j, args.c)
    omega_a, lambda_, phi_zpf = analytic.transmon_params(circuit)
    rows = {
        "omega_a_rad_s": omega_a,
        "lambda_rad_s": lambda_,
        "omega_a_ghz": omega_a / (2e9 * math.pi),
        "lambda_mhz": lambda_ / (2e6 * math.pi),
        "lambda_over_omega_a": lambda_ / omega_a,
        "phi_zpf_wb": phi_zpf,
    }
    if opts["format"] == "json":
        _emit(json.dumps(rows, indent=1) + "\n", opts["out"])
    else:
        _emit("".join(f"{k}: {harness.format_value(v)}\n" for k, v in rows.items()), opts["out"])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--omega-a", dest="omega_a", type=float)
    common.add_argument("--omega-r", dest="omega_r", type=float)
    common.add_argument("--lambda", dest="lambda_", type=float)
    common.add_argument("--g", type=float)
    common.add_argument("--normalized", action=argparse.BooleanOptionalAction, default=None,
                        help="express frequencies in units of omega-a (default)")
    common.add_argument("--n-atom", dest="n_atom", type=int)
    common.add_argument("--n-res", dest="n_res", type=int)
    common.add_argument("--tol", type=float, help="converge the numeric route to this tolerance")
    common.add_argument("--routes", help="comma-separated subset of " + ",".join(r.value for r in Route))
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--jobs", type=int, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lambshift", description=__doc__)
    parser.add_argument("--version", action="version", version=f"lambshift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shifts", parents=[common], help="all routes at one parameter point")
    p.set_defaults(func=cmd_shifts)

    p = sub.add_parser("sweep", parents=[common], help="one-parameter sweep")
    p.add_argument("--swept", choices=sorted(harness.SWEPT))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--spacing", choices=("linear", "log"))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", parents=[common], help="data file for a published figure")
    p.add_argument("which", choices=sorted(harness.FIGURE_COLUMNS))
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override figure parameters (lambda, g, delta, start, stop, count)")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("check", parents=[common], help="validity report for one point")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convert", parents=[common], help="circuit values to model parameters")
    p.add_argument("--l-j", dest="l_j", type=float, required=True, help="Josephson inductance (H)")
    p.add_argument("--c", type=float, required=True, help="shunt capacitance (F)")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve(args)
        if opts["format"] not in ("csv", "json"):
            raise ConfigurationError(f"format must be csv or json, got {opts['format']!r}")
        args.func(args, opts)
    except ConfigurationError as exc:
        print(f"lambshift: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LambShiftError, ArithmeticError) as exc:
        print(f"lambshift: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"lambshift: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
