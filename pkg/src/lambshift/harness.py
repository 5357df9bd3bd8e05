"""Parameter sweeps, validity reports and figure-data files."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, analytic
from .errors import (
    AmbiguousLabelError,
    ConfigurationError,
    InstabilityError,
    LambShiftError,
    ResonanceError,
)
from .hilbert import FockConfig, SystemParams, coupled_hamiltonian
from .normalmodes import STRADDLE_MARGIN, straddling_ratio
from .routes import compute_shifts
from .spectrum import SHIFT_FIELDS, Route, converge, diagonalize, label_states

SWEPT = {"detuning": "delta", "anharmonicity": "lambda", "coupling": "g"}
FLAG_NAMES = ("near_resonance", "straddling", "unstable", "label_ambiguous")
NULL = "null"

# fixed parameters of the published figures, in units of omega_a
FIGURE_LAMBDA = 0.01
FIGURE_G = 0.02
FIGURE_DETUNING = 0.25

FIGURE_COLUMNS = {
    "fig2a": ("delta_over_wa", "f_atom_numeric", "f_res_numeric", "f_atom_bare",
              "f_res_bare", "f_atom_analytic", "f_res_analytic", "flags"),
    "fig2b": ("delta_over_wa", "delta_omega_a_numeric", "delta_nm", "chi_ar",
              "chi_a_change", "closure_residual", "flags"),
    "fig2c": ("lambda_over_wa", "fraction_numeric", "fraction_analytic", "tls_reference", "flags"),
    "fig3": ("delta_over_wa", "chi_ar_numeric", "chi_ar_eq8", "chi_ar_eq7", "koch_formula", "flags"),
}


@dataclass(frozen=True)
class ValidityReport:
    near_resonance: bool
    straddling: bool
    unstable: bool
    label_ambiguous: bool
    g_over_detuning: float
    lambda_over_detuning: float
    lambda_over_straddle_window: float
    stability_ratio: float
    min_overlap: float | None = None

    @property
    def flags(self) -> frozenset:
        return frozenset(name for name in FLAG_NAMES if getattr(self, name))

    @property
    def clear(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict:
        return {
            **{name: getattr(self, name) for name in FLAG_NAMES},
            "g_over_detuning": self.g_over_detuning,
            "lambda_over_detuning": self.lambda_over_detuning,
            "lambda_over_straddle_window": self.lambda_over_straddle_window,
            "stability_ratio": self.stability_ratio,
            "min_overlap": self.min_overlap,
        }


def _over(num, den):
    if num == 0:
        return 0.0
    return math.inf if den == 0 else num / den


def check_point(params: SystemParams, cfg: FockConfig | None = FockConfig(), max_n: int = 2) -> ValidityReport:
    """Validity flags and the ratios behind them for one parameter point.

    ``label_ambiguous`` comes from actually labeling the spectrum at ``cfg``;
    pass ``cfg=None`` to skip that diagonalization.
    """
    d = abs(params.delta)
    g_ratio = _over(params.g, d)
    lam_ratio = _over(params.lambda_, d)
    strad = straddling_ratio(params)
    unstable = not params.is_stable
    ambiguous, min_overlap = False, None
    if cfg is not None and not unstable:
        try:
            spec = label_states(diagonalize(coupled_hamiltonian(params, cfg)), cfg, max_n)
            min_overlap = spec.min_overlap
        except AmbiguousLabelError as exc:
            ambiguous, min_overlap = True, exc.overlap
    return ValidityReport(
        near_resonance=g_ratio >= analytic.DISPERSIVE_MARGIN or lam_ratio >= STRADDLE_MARGIN,
        straddling=strad >= STRADDLE_MARGIN,
        unstable=unstable,
        label_ambiguous=ambiguous,
        g_over_detuning=g_ratio,
        lambda_over_detuning=lam_ratio,
        lambda_over_straddle_window=strad,
        stability_ratio=params.stability_ratio,
        min_overlap=min_overlap,
    )


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep.

    ``start``/``stop`` are the swept quantity (``Delta``, ``lambda`` or ``g``)
    in the units of ``fixed``; for a detuning sweep ``omega_r = omega_a + Delta``.
    ``tol``, when set, converges the numeric route at every point.
    """

    swept: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"
    fixed: SystemParams = SystemParams(1.0, 1.25, FIGURE_LAMBDA, FIGURE_G)
    cfg: FockConfig = FockConfig()
    routes: tuple = (Route.NUMERIC, Route.NORMAL_MODE, Route.RWA, Route.BEYOND_RWA)
    tol: float | None = None

    def __post_init__(self):
        if self.swept not in SWEPT:
            raise ConfigurationError(f"swept must be one of {sorted(SWEPT)}, got {self.swept!r}")
        if self.spacing not in ("linear", "log"):
            raise ConfigurationError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ConfigurationError(f"count must be an integer >= 2, got {self.count!r}")
        if not self.routes:
            raise ConfigurationError("at least one route is required")
        try:
            routes = tuple(sorted({Route(r) for r in self.routes}, key=list(Route).index))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        object.__setattr__(self, "routes", routes)
        if self.spacing == "log" and not (self.start > 0 and self.stop > 0):
            raise ConfigurationError("log spacing needs positive endpoints")
        for v in (self.start, self.stop):
            self.params_at(v)

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, int(self.count))
        return np.linspace(self.start, self.stop, int(self.count))

    def params_at(self, value: float) -> SystemParams:
        if self.swept == "detuning":
            return self.fixed.replace(omega_r=self.fixed.omega_a + value)
        if self.swept == "anharmonicity":
            return self.fixed.replace(lambda_=value)
        return self.fixed.replace(g=value)


@dataclass(frozen=True)
class SweepRow:
    value: float
    params: SystemParams
    shifts: dict
    flags: frozenset = field(default_factory=frozenset)

    def get(self, route, name):
        s = self.shifts.get(Route(route))
        return None if s is None else getattr(s, name)

    def vacuum_fraction(self, route):
        s = self.shifts.get(Route(route))
        if s is None or s.delta_omega_a == 0:
            return None
        return s.chi_ar / abs(s.delta_omega_a)


def evaluate_point(spec: SweepSpec, value: float) -> SweepRow:
    params = spec.params_at(float(value))
    report = check_point(params, cfg=None)
    flags = set(report.flags)
    shifts = {}
    for route in spec.routes:
        shifts[route] = None
        if report.unstable:
            continue
        try:
            if route is Route.NUMERIC and spec.tol is not None:
                shifts[route] = converge(params, spec.cfg, spec.tol)[0]
            else:
                shifts[route] = compute_shifts(params, route, spec.cfg)
        except AmbiguousLabelError:
            flags.add("label_ambiguous")
        except ResonanceError:
            flags.add("near_resonance")
        except InstabilityError:
            flags.add("unstable")
        except LambShiftError:
            flags.add("numeric_failure")
    return SweepRow(float(value), params, shifts, frozenset(flags))


def run_sweep(spec: SweepSpec, n_jobs: int = 1) -> list[SweepRow]:
    """Evaluate every requested route at every sweep point.

    Routes that fail at a point leave ``None`` in place of their ShiftSet and
    raise the matching flag. Rows come back ordered by the swept value.
    """
    values = spec.values()
    if n_jobs == 1:
        rows = [evaluate_point(spec, v) for v in values]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            rows = list(pool.map(evaluate_point, [spec] * len(values), values))
    return sorted(rows, key=lambda r: r.value)


def sweep_table(spec: SweepSpec, rows) -> tuple[list[str], list[list]]:
    """Flatten sweep rows to columns ``<field>_<route>`` plus vacuum fractions and flags."""
    columns = [SWEPT[spec.swept]]
    for route in spec.routes:
        columns += [f"{name}_{route.value}" for name in SHIFT_FIELDS]
        columns.append(f"vacuum_fraction_{route.value}")
    columns.append("flags")
    table = []
    for row in rows:
        out = [row.value]
        for route in spec.routes:
            out += [row.get(route, name) for name in SHIFT_FIELDS]
            out.append(row.vacuum_fraction(route))
        out.append(row.flags)
        table.append(out)
    return columns, table


# ---------------------------------------------------------------- figures


def figure_spec(which: str, overrides: dict | None = None) -> SweepSpec:
    """Sweep behind one of the published figures, with optional overrides.

    Recognized override keys: ``omega_a``, ``lambda``, ``g``, ``delta``
    (fig2c only), ``start``, ``stop``, ``count``, ``n_atom``, ``n_res``, ``tol``.
    Frequencies are in units of ``omega_a``.
    """
    if which not in FIGURE_COLUMNS:
        raise ConfigurationError(f"unknown figure {which!r}; choose from {sorted(FIGURE_COLUMNS)}")
    o = dict(overrides or {})
    known = {"omega_a", "lambda", "g", "delta", "start", "stop", "count", "n_atom", "n_res", "tol"}
    unknown = set(o) - known
    if unknown:
        raise ConfigurationError(f"unknown override(s) {sorted(unknown)}")
    wa = float(o.get("omega_a", 1.0))
    lam = float(o.get("lambda", FIGURE_LAMBDA)) * wa
    g = float(o.get("g", FIGURE_G)) * wa
    cfg = FockConfig(int(o.get("n_atom", 15)), int(o.get("n_res", 15)))
    tol = o.get("tol")
    tol = None if tol is None else float(tol)
    if which == "fig2c":
        delta = float(o.get("delta", FIGURE_DETUNING)) * wa
        fixed = SystemParams(wa, wa + delta, lam, g)
        return SweepSpec(
            "anharmonicity", float(o.get("start", 1e-4)) * wa, float(o.get("stop", 0.1)) * wa,
            int(o.get("count", 25)), "log", fixed, cfg, (Route.NUMERIC, Route.BEYOND_RWA), tol,
        )
    if "delta" in o:
        raise ConfigurationError(f"'delta' is swept in {which}; use start/stop")
    fixed = SystemParams(wa, wa, lam, g)
    if which == "fig3":
        start, stop, routes = -0.9, 3.0, (Route.NUMERIC, Route.RWA, Route.BEYOND_RWA)
    else:
        start, stop, routes = -0.5, 0.9, (Route.NUMERIC, Route.BEYOND_RWA)
    return SweepSpec(
        "detuning", float(o.get("start", start)) * wa, float(o.get("stop", stop)) * wa,
        int(o.get("count", 181)), "linear", fixed, cfg, routes, tol,
    )


def _scaled(x, unit):
    return None if x is None else x / unit


def figure_table(which: str, rows) -> tuple[tuple, list[list]]:
    columns = FIGURE_COLUMNS[which]
    table = []
    for row in rows:
        p = row.params
        wa = p.omega_a
        num = row.shifts.get(Route.NUMERIC)
        closed = row.shifts.get(Route.BEYOND_RWA)
        if which == "fig2a":
            out = [
                p.delta / wa,
                _scaled(num and num.atom_transition, wa),
                _scaled(num and num.resonator_transition, wa),
                1.0,
                p.omega_r / wa,
                _scaled(closed and closed.atom_transition, wa),
                _scaled(closed and closed.resonator_transition, wa),
            ]
        elif which == "fig2b":
            out = [p.delta / wa]
            if num is None:
                out += [None] * 5
            else:
                out += [
                    num.delta_omega_a / wa,
                    num.delta_nm / wa,
                    num.chi_ar / wa,
                    (num.chi_a - p.lambda_) / wa,
                    num.closure_residual(p.lambda_) / wa,
                ]
        elif which == "fig2c":
            out = [
                p.lambda_ / wa,
                row.vacuum_fraction(Route.NUMERIC),
                row.vacuum_fraction(Route.BEYOND_RWA),
                analytic.TLS_VACUUM_FRACTION,
            ]
        else:
            rwa = row.shifts.get(Route.RWA)
            try:
                pert = analytic.perturbative_stark_shift(p) / wa
            except ResonanceError:
                pert = None
            out = [
                p.delta / wa,
                _scaled(num and num.chi_ar, wa),
                _scaled(closed and closed.chi_ar, wa),
                _scaled(rwa and rwa.chi_ar, wa),
                pert,
            ]
        out.append(row.flags)
        table.append(out)
    return columns, table


def figure_data(which: str, overrides: dict | None = None, out=None, fmt: str = "csv", n_jobs: int = 1):
    """Compute a figure's sweep and write it to ``out`` (default ``<which>.<fmt>``).

    Returns the path written.
    """
    spec = figure_spec(which, overrides)
    rows = run_sweep(spec, n_jobs=n_jobs)
    columns, table = figure_table(which, rows)
    path = Path(out) if out is not None else Path(f"{which}.{fmt}")
    write_table(path, columns, table, fmt=fmt, title=which)
    return path


# ---------------------------------------------------------------- serialization


def format_value(v) -> str:
    if v is None:
        return NULL
    if isinstance(v, str):
        return v
    if isinstance(v, (frozenset, set)):
        return ";".join(sorted(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    v = float(v)
    if math.isnan(v):
        return NULL
    return f"{v:.11e}"


def _json_value(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (frozenset, set)):
        return sorted(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    v = float(v)
    return None if math.isnan(v) or math.isinf(v) else float(f"{v:.11e}")


def render_table(columns, table, fmt: str = "csv", title: str = "") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# lambshift {__version__} {title}".rstrip() + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in table:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "generator": f"lambshift {__version__}",
            "title": title,
            "columns": list(columns),
            "rows": [dict(zip(columns, (_json_value(v) for v in row))) for row in table],
        }
        return json.dumps(doc, indent=1) + "\n"
    raise ConfigurationError(f"format must be 'csv' or 'json', got {fmt!r}")


def write_table(path, columns, table, fmt: str = "csv", title: str = "") -> Path:
    path = Path(path)
    text = render_table(columns, table, fmt, title)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_csv(path) -> list[dict]:
    """Read a CSV written by this module; nulls become ``None``, numbers floats."""
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        row = {}
        for k, v in rec.items():
            if k == "flags":
                row[k] = frozenset(filter(None, v.split(";")))
            elif v == NULL:
                row[k] = None
            else:
                row[k] = float(v)
        out.append(row)
    return out
