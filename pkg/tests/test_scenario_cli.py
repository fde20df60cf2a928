import csv
import math
import os

import numpy as np
import pytest

from accelpair import scenario as sc
from accelpair.cli import main
from accelpair.errors import UnknownPreset
from accelpair.params import ModelParams


def small_scenario(**kw):
    p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-5.0)
    defaults = dict(params=p, sweep=sc.TimeSeries(-5.0, 3.0, 5),
                    outputs=("c_minus", "sigma", "log_neg"), quad_tol=1e-8)
    defaults.update(kw)
    return sc.Scenario(**defaults)


class TestScenarioFormat:
    def test_round_trip(self):
        s = small_scenario()
        text = sc.scenario_to_text(s)
        s2 = sc.parse_scenario_text(text, name=s.name)
        assert s2.params == s.params
        assert s2.sweep == s.sweep
        assert s2.outputs == s.outputs
        assert s2.quad_tol == s.quad_tol
        assert sc.scenario_to_text(s2) == text

    def test_preset_metadata_round_trips(self):
        for name in sc.PRESET_NAMES:
            s = sc.figure_preset(name)
            s2 = sc.parse_scenario_text(sc.scenario_to_text(s), name=s.name)
            assert s2.params == s.params
            assert s2.sweep == s.sweep
            assert s2.outputs == s.outputs

    def test_comments_and_ground_keyword(self):
        text = """
        # a scenario
        gamma = 0.01
        omega = 1.3       # natural frequency
        accel = 2.0
        tau0 = -5.0
        alpha = ground
        sweep = time_series
        tau_start = -5.0
        tau_end = 0.0
        n_points = 3
        outputs = c_minus
        """
        s = sc.parse_scenario_text(text)
        assert s.params.alpha == pytest.approx(math.sqrt(s.params.omega_r))

    def test_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="unrecognized"):
            sc.parse_scenario_text("gamma = 0.01\nomega = 1.3\naccel = 1.0\n"
                                   "tau0 = 0.0\nbogus = 1\nsweep = window_search\n")

    def test_validation(self):
        with pytest.raises(ValueError):
            small_scenario(outputs=())
        with pytest.raises(ValueError):
            small_scenario(sweep=sc.TimeSeries(-5.0, 3.0, 1))
        with pytest.raises(ValueError):
            small_scenario(sweep=sc.TimeSeries(-9.0, 3.0, 5))

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset):
            sc.figure_preset("fig99")


class TestRunner:
    def test_degenerate_two_point_series(self):
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-5.0)
        s = sc.Scenario(p, sc.TimeSeries(-5.0, -5.0, 2), ("c_minus",),
                        quad_tol=1e-8)
        cols, rows = sc.run_scenario(s)
        assert len(rows) == 2
        assert rows[0] == rows[1]

    def test_window_search_row(self):
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12)
        s = sc.Scenario(p, sc.WindowSearch(), ())
        cols, rows = sc.run_scenario(s)
        row = rows[0]
        assert row["window_exists"]
        assert row["tau_e"] == pytest.approx(1.0e3, rel=0.1)
        assert row["tau_de"] == pytest.approx(2.8e5, rel=0.1)
        assert row["band_upper"] == pytest.approx(10.238, abs=1e-3)

    def test_field_grid(self):
        p = ModelParams(gamma=0.01, omega=1.3, accel=1.0, tau0=-10.0)
        s = sc.Scenario(p, sc.FieldGrid(-2.0, 2.0, 5, math.exp(-8.0)), ())
        cols, rows = sc.run_scenario(s)
        assert len(rows) == 25
        center = [r for r in rows if r["s"] == 0.0 and r["s_prime"] == 0.0][0]
        assert center["abs_cross_kernel"] == pytest.approx(1.0 / (16 * math.pi**2),
                                                           rel=1e-6)

    def test_alpha_beta_grid_minimum_at_ground_state(self):
        p = ModelParams(gamma=0.01, omega=1.3, accel=2.0, tau0=-60.0)
        w = math.sqrt(p.omega_r)
        s = sc.Scenario(p, sc.AlphaBetaGrid(0.7 * w, 1.43 * w, 0.7 * w, 1.43 * w,
                                            3, 20.0, 60.0, 41), ("sigma",),
                        quad_tol=1e-8)
        cols, rows = sc.run_scenario(s)
        assert len(rows) == 9
        best = min(rows, key=lambda r: r["sigma_min"])
        # middle grid point is exactly the ground state
        assert best["alpha"] == pytest.approx(1.065 * w, rel=1e-12)
        assert best["beta"] == pytest.approx(1.065 * w, rel=1e-12)


class TestCliFiles:
    def test_run_and_determinism(self, tmp_path):
        scen_file = tmp_path / "scen.txt"
        scen_file.write_text(sc.scenario_to_text(small_scenario()))
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["run", "--scenario", str(scen_file), "--out", str(out1)]) == 0
        assert main(["run", "--scenario", str(scen_file), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "a.csv.meta").exists()
        with open(out1) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert set(rows[0]) == {"tau", "c_minus", "c_plus", "sigma", "log_neg"}

    def test_metadata_reproduces_run(self, tmp_path):
        scen_file = tmp_path / "scen.txt"
        scen_file.write_text(sc.scenario_to_text(small_scenario()))
        out1 = tmp_path / "a.csv"
        main(["run", "--scenario", str(scen_file), "--out", str(out1)])
        out2 = tmp_path / "b.csv"
        main(["run", "--scenario", str(out1) + ".meta", "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()

    def test_preset_with_figure(self, tmp_path):
        out = tmp_path / "w.csv"
        fig = tmp_path / "w.png"
        p = ModelParams(gamma=1e-5, omega=2.3, accel=1.0, tau0=-1e12)
        s = sc.Scenario(p, sc.WindowSearch(), (), name="window")
        sc.run_to_files(s, str(out), str(fig))
        assert out.exists() and fig.exists() and fig.stat().st_size > 1000

    def test_parallel_rows_match_serial(self, tmp_path):
        scen_file = tmp_path / "scen.txt"
        scen_file.write_text(sc.scenario_to_text(small_scenario()))
        out1 = tmp_path / "serial.csv"
        out2 = tmp_path / "par.csv"
        main(["run", "--scenario", str(scen_file), "--out", str(out1)])
        os.environ["ACCELPAIR_THREADS"] = "2"
        try:
            main(["run", "--scenario", str(scen_file), "--out", str(out2)])
        finally:
            del os.environ["ACCELPAIR_THREADS"]
        assert out1.read_bytes() == out2.read_bytes()
