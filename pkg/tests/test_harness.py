import json

import numpy as np
import pytest

from lambshift import __version__
from lambshift.errors import ConfigurationError
from lambshift.harness import (
    FIGURE_COLUMNS,
    NULL,
    SweepSpec,
    check_point,
    figure_data,
    figure_spec,
    figure_table,
    format_value,
    read_csv,
    render_table,
    run_sweep,
    sweep_table,
)
from lambshift.hilbert import SystemParams
from lambshift.spectrum import Route


def _detuning_sweep(start=-0.5, stop=0.9, count=15, routes=("numeric", "beyond_rwa"), **kw):
    return SweepSpec("detuning", start, stop, count, routes=routes, **kw)


class TestCheckPoint:
    def test_reference_is_clear(self, reference):
        r = check_point(reference)
        assert r.clear
        assert r.g_over_detuning == pytest.approx(0.08)
        assert r.lambda_over_detuning == pytest.approx(0.04)
        assert r.min_overlap > 0.95

    def test_third_harmonic_straddles(self):
        r = check_point(SystemParams(1.0, 3.0, 0.01, 0.02))
        assert r.straddling and r.lambda_over_straddle_window == np.inf

    def test_strong_resonant_coupling(self):
        r = check_point(SystemParams(1.0, 1.0, 0.0, 0.3))
        assert r.near_resonance and not r.unstable
        assert r.label_ambiguous

    def test_unstable_at_bound(self):
        r = check_point(SystemParams(1.0, 1.0, 0.0, 0.5))
        assert r.unstable
        assert r.stability_ratio == pytest.approx(1.0)

    def test_skip_labeling(self):
        r = check_point(SystemParams(1.0, 1.0, 0.0, 0.3), cfg=None)
        assert not r.label_ambiguous and r.min_overlap is None

    def test_report_dict(self, reference):
        d = check_point(reference).as_dict()
        assert {"near_resonance", "straddling", "unstable", "label_ambiguous"} <= set(d)


class TestSweepSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(swept="frequency"),
            dict(count=1),
            dict(routes=()),
            dict(routes=("exact",)),
            dict(spacing="cubic"),
            dict(spacing="log"),
        ],
    )
    def test_invalid(self, kwargs):
        base = dict(swept="detuning", start=-0.5, stop=0.5, count=5)
        base.update(kwargs)
        with pytest.raises(ConfigurationError):
            SweepSpec(**base)

    def test_log_values(self):
        spec = SweepSpec("anharmonicity", 1e-4, 1e-1, 4, spacing="log")
        np.testing.assert_allclose(spec.values(), [1e-4, 1e-3, 1e-2, 1e-1])

    def test_params_at(self):
        spec = SweepSpec("coupling", 0.0, 0.05, 3)
        assert spec.params_at(0.05).g == 0.05
        assert SweepSpec("detuning", 0.0, 0.5, 3).params_at(0.5).omega_r == 1.5


class TestRunSweep:
    def test_rows_ordered_one_per_point(self):
        spec = _detuning_sweep(count=7)
        rows = run_sweep(spec)
        assert [r.value for r in rows] == sorted(spec.values())
        assert len(rows) == 7

    def test_resonance_row(self):
        rows = run_sweep(_detuning_sweep(-0.1, 0.1, 3))
        mid = rows[1]
        assert mid.value == 0.0
        assert {"near_resonance", "label_ambiguous"} <= mid.flags
        assert mid.shifts[Route.NUMERIC] is None
        assert mid.shifts[Route.BEYOND_RWA] is None

    def test_flag_soundness(self):
        spec = SweepSpec("coupling", 0.0, 0.6, 13, fixed=SystemParams(1.0, 1.2, 0.01, 0.0))
        for row in run_sweep(spec):
            if any(s is None for s in row.shifts.values()):
                assert row.flags

    def test_unstable_rows_null(self):
        spec = SweepSpec("coupling", 0.4, 0.6, 3, fixed=SystemParams(1.0, 1.0, 0.0, 0.0))
        last = run_sweep(spec)[-1]
        assert "unstable" in last.flags
        assert all(s is None for s in last.shifts.values())

    def test_route_independence(self):
        with_numeric = run_sweep(_detuning_sweep(routes=tuple(Route), count=5))
        without = run_sweep(_detuning_sweep(routes=("normal_mode", "rwa", "beyond_rwa"), count=5))
        for a, b in zip(with_numeric, without):
            for route in (Route.NORMAL_MODE, Route.RWA, Route.BEYOND_RWA):
                assert a.shifts[route] == b.shifts[route]

    def test_parallel_matches_serial(self):
        spec = _detuning_sweep(count=6)
        serial, parallel = run_sweep(spec), run_sweep(spec, n_jobs=2)
        assert [r.shifts for r in serial] == [r.shifts for r in parallel]

    def test_converged_numeric(self, reference):
        spec = _detuning_sweep(0.25, 0.3, 2, routes=("numeric",), tol=1e-10)
        assert run_sweep(spec)[0].shifts[Route.NUMERIC].chi_ar == pytest.approx(7.6486e-5, rel=1e-4)

    def test_cross_kerr_agreement_over_detuning(self):
        rows = run_sweep(_detuning_sweep(count=29))
        for r in rows:
            if r.flags:
                continue
            num, ana = r.get("numeric", "chi_ar"), r.get("beyond_rwa", "chi_ar")
            assert abs(num - ana) <= 0.10 * abs(ana)

    @pytest.mark.xfail(strict=True, reason="at negative detuning the numeric cross-Kerr runs 5.0-5.4% above the closed form")
    def test_cross_kerr_agreement_over_detuning_5pct(self):
        rows = run_sweep(_detuning_sweep(count=29))
        for r in rows:
            if not r.flags:
                num, ana = r.get("numeric", "chi_ar"), r.get("beyond_rwa", "chi_ar")
                assert abs(num - ana) <= 0.05 * abs(ana)

    def _fractions(self, stop, count):
        spec = SweepSpec("anharmonicity", 1e-4, stop, count, spacing="log", routes=("numeric",))
        return [r.vacuum_fraction("numeric") for r in run_sweep(spec)]

    def test_vacuum_fraction_increases_at_weak_anharmonicity(self):
        assert np.all(np.diff(self._fractions(2e-2, 40)) > 0)

    @pytest.mark.xfail(strict=True, reason="the numeric fraction peaks near lambda = 0.027 and falls by 0.9% up to 0.03")
    def test_vacuum_fraction_increases_to_3e2(self):
        assert np.all(np.diff(self._fractions(3e-2, 60)) > 0)

    def test_sweep_table_columns(self):
        spec = _detuning_sweep(count=3, routes=("rwa",))
        cols, table = sweep_table(spec, run_sweep(spec))
        assert cols[0] == "delta" and cols[-1] == "flags"
        assert "chi_ar_rwa" in cols and "vacuum_fraction_rwa" in cols
        assert all(len(row) == len(cols) for row in table)


class TestFigures:
    @pytest.mark.parametrize("which", sorted(FIGURE_COLUMNS))
    def test_csv_schema(self, tmp_path, which):
        out = figure_data(which, {"count": 5}, out=tmp_path / f"{which}.csv")
        lines = out.read_text().splitlines()
        assert lines[0] == f"# lambshift {__version__} {which}"
        assert tuple(lines[1].split(",")) == FIGURE_COLUMNS[which]
        assert len(lines) == 7

    def test_fig2a_bare_lines(self, tmp_path):
        rows = read_csv(figure_data("fig2a", {"count": 8}, out=tmp_path / "a.csv"))
        for r in rows:
            assert r["f_atom_bare"] == 1.0
            assert r["f_res_bare"] == pytest.approx(1.0 + r["delta_over_wa"], abs=1e-11)

    def test_fig2b_closure(self, tmp_path):
        for r in read_csv(figure_data("fig2b", {"count": 12}, out=tmp_path / "b.csv")):
            if r["closure_residual"] is not None:
                assert abs(r["closure_residual"]) <= 1e-12

    def test_fig2c_defaults(self):
        spec = figure_spec("fig2c")
        assert spec.spacing == "log" and spec.count == 25
        assert spec.fixed.delta == 0.25
        assert spec.values()[0] == pytest.approx(1e-4) and spec.values()[-1] == pytest.approx(0.1)

    def test_fig2c_tls_reference(self, tmp_path):
        rows = read_csv(figure_data("fig2c", {"count": 4}, out=tmp_path / "c.csv"))
        assert all(r["tls_reference"] == 1.0 for r in rows)

    def test_fig3_flags_third_harmonic(self):
        spec = figure_spec("fig3")
        assert spec.count == 181
        rows = run_sweep(SweepSpec("detuning", 1.99, 2.01, 3, fixed=spec.fixed, routes=spec.routes))
        assert all("straddling" in r.flags for r in rows)
        _, table = figure_table("fig3", rows)
        assert all(row[-1] for row in table)

    def test_fig3_subharmonic_flagged(self):
        spec = figure_spec("fig3")
        rows = run_sweep(SweepSpec("detuning", -2 / 3, -2 / 3 + 1e-9, 2, fixed=spec.fixed, routes=spec.routes))
        assert all("straddling" in r.flags for r in rows)

    def test_overrides(self):
        spec = figure_spec("fig3", {"lambda": 0.02, "g": 0.01, "start": 0.3, "stop": 0.4, "count": 3})
        assert spec.fixed.lambda_ == 0.02 and spec.fixed.g == 0.01
        assert spec.values().tolist() == pytest.approx([0.3, 0.35, 0.4])

    @pytest.mark.parametrize("which, overrides", [("fig9", {}), ("fig3", {"delta": 0.1}), ("fig2a", {"mass": 1})])
    def test_bad_figure_requests(self, which, overrides):
        with pytest.raises(ConfigurationError):
            figure_spec(which, overrides)

    def test_deterministic_bytes(self, tmp_path):
        a = figure_data("fig2b", {"count": 6}, out=tmp_path / "1.csv").read_bytes()
        b = figure_data("fig2b", {"count": 6}, out=tmp_path / "2.csv").read_bytes()
        assert a == b

    def test_json_output(self, tmp_path):
        doc = json.loads(figure_data("fig3", {"count": 5, "start": -0.1, "stop": 0.1}, out=tmp_path / "f.json", fmt="json").read_text())
        assert doc["columns"] == list(FIGURE_COLUMNS["fig3"])
        mid = doc["rows"][2]
        assert mid["chi_ar_numeric"] is None and "near_resonance" in mid["flags"]

    def test_io_error_names_path(self, tmp_path):
        target = tmp_path / "missing" / "f.csv"
        with pytest.raises(OSError, match="missing"):
            figure_data("fig2c", {"count": 2}, out=target)


class TestSerialization:
    def test_format_value(self):
        assert format_value(None) == NULL
        assert format_value(float("nan")) == NULL
        assert format_value(1.0) == "1.00000000000e+00"
        assert format_value(frozenset({"b", "a"})) == "a;b"
        assert format_value(True) == "true"

    def test_twelve_significant_digits(self):
        assert float(format_value(1 / 3)) == pytest.approx(1 / 3, rel=1e-11)
        assert float(format_value(7.901234567891e-5)) == 7.90123456789e-5

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(render_table(("x", "y", "flags"), [[1.5, None, frozenset({"unstable"})]]))
        assert read_csv(path) == [{"x": 1.5, "y": None, "flags": frozenset({"unstable"})}]

    def test_bad_format(self):
        with pytest.raises(ConfigurationError):
            render_table(("x",), [[1.0]], fmt="xml")
