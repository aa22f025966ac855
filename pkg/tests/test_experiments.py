import csv
import json
import math

import numpy as np
import pytest

from rydsteady import experiments, model
from rydsteady.experiments import (SWEEP_COLUMNS, TRAJECTORY_COLUMNS,
                                   SweepSpec, apply_rules, cli_main,
                                   reproduce_figure, rerun_from_metadata,
                                   run_sweep, run_trajectory, write_table)

TWO_PI = 2 * math.pi


def small_sweep(n_delta=3, n_gamma=2):
    return SweepSpec(
        base=model.two_atom_config(1.0),
        axes=(("delta_mhz", tuple(np.linspace(0.5, 1.5, n_delta))),
              ("gamma_khz", (1.0, 4.0)[:n_gamma])),
    )


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def rows_without_wall(path):
    rows = read_csv(path)
    w = rows[0].index("wall_ms")
    return [r[:w] + r[w + 1:] for r in rows]


class TestSweep:
    def test_grid_bookkeeping_and_order(self):
        table = run_sweep(small_sweep())
        assert len(table.rows) == 6
        deltas = [r["delta_mhz"] for r in table.rows]
        gammas = [r["gamma_khz"] for r in table.rows]
        assert deltas == [0.5, 0.5, 1.0, 1.0, 1.5, 1.5]   # row-major
        assert gammas == [1.0, 4.0] * 3
        assert all(r["status"] == "ok" for r in table.rows)

    def test_derived_rules_hold_in_every_row(self):
        sweep = small_sweep()
        for cfg in sweep.point_configs():
            spec = model.spec_from_config(cfg)
            omega = spec.omega_drive[0].real
            mw = spec.microwave[0].real
            assert abs(mw * 4 * spec.delta - 3 * omega**2) < 1e-12
            assert abs(spec.u_table[0, 1] - 2 * spec.delta) < 1e-12
            assert abs(spec.u_table[0, 0] - 4 * spec.delta) < 1e-12

    def test_serial_and_parallel_agree(self, tmp_path):
        sweep = small_sweep()
        t1 = run_sweep(sweep, jobs=1)
        t2 = run_sweep(sweep, jobs=2)
        p1 = write_table(t1, tmp_path, "serial")["data"]
        p2 = write_table(t2, tmp_path, "parallel")["data"]
        assert rows_without_wall(p1) == rows_without_wall(p2)

    def test_solver_failure_recorded_in_row(self):
        # a three-atom base cannot use the superoperator path
        sweep = SweepSpec(base=model.three_atom_config(0.5),
                          axes=(("delta_mhz", (0.5,)),),
                          rules=("same-resonant-u", "microwave-lock"))
        table = run_sweep(sweep)
        assert len(table.rows) == 1
        assert table.rows[0]["status"].startswith("error")
        assert math.isnan(table.rows[0]["negativity"])

    def test_degenerate_status(self):
        sweep = SweepSpec(
            base=model.two_atom_config(1.0, flavor="effective",
                                       collapse_variant="paper-effective"),
            axes=(("delta_mhz", (1.0,)),))
        table = run_sweep(sweep)
        assert table.rows[0]["status"] == "degenerate"

    def test_axis_validation(self):
        with pytest.raises(ValueError, match="axis"):
            SweepSpec(base=model.two_atom_config(1.0),
                      axes=(("nope_mhz", (1.0,)),))
        with pytest.raises(ValueError, match="empty"):
            SweepSpec(base=model.two_atom_config(1.0),
                      axes=(("delta_mhz", ()),))

    def test_unknown_rule_named(self):
        with pytest.raises(model.ConfigError, match="frobnicate"):
            apply_rules(model.two_atom_config(1.0), ("frobnicate",))


class TestSerialization:
    def test_csv_schema(self, tmp_path):
        table = run_sweep(SweepSpec(base=model.two_atom_config(1.0),
                                    axes=(("delta_mhz", (1.0,)),)))
        paths = write_table(table, tmp_path, "t", "csv")
        rows = read_csv(paths["data"])
        assert rows[0] == list(SWEEP_COLUMNS)
        assert len(rows) == 2
        meta = json.loads(paths["meta"].read_text())
        assert meta["kind"] == "sweep"
        assert meta["base_config"]["delta_mhz"] == 1.0

    def test_json_schema(self, tmp_path):
        table = run_sweep(SweepSpec(base=model.two_atom_config(1.0),
                                    axes=(("delta_mhz", (1.0,)),)))
        paths = write_table(table, tmp_path, "t", "json")
        doc = json.loads(paths["data"].read_text())
        assert doc["columns"] == list(SWEEP_COLUMNS)
        assert doc["metadata"]["kind"] == "sweep"
        assert len(doc["rows"]) == 1

    def test_rerun_from_metadata_reproduces_files(self, tmp_path):
        table = run_sweep(small_sweep(2, 1))
        p1 = write_table(table, tmp_path, "a")["data"]
        meta = json.loads((tmp_path / "a.meta.json").read_text())
        again = rerun_from_metadata(meta)
        p2 = write_table(again, tmp_path, "b")["data"]
        assert rows_without_wall(p1) == rows_without_wall(p2)

    def test_trajectory_rerun_bit_identical(self, tmp_path):
        cfg = model.two_atom_config(0.5, flavor="effective",
                                    collapse_variant="independent")
        kw = dict(initial="ground-mixture", t_final_ms=0.5,
                  observe_every_ms=0.25, target="Psi",
                  stepper={"kind": "rk4-fixed"})
        t1 = run_trajectory(cfg, **kw)
        p1 = write_table(t1, tmp_path, "r1")["data"]
        meta = json.loads((tmp_path / "r1.meta.json").read_text())
        t2 = rerun_from_metadata(meta)
        p2 = write_table(t2, tmp_path, "r2")["data"]
        assert p1.read_bytes() == p2.read_bytes()   # no volatile columns here


class TestTrajectoryTable:
    def test_schema_and_content(self):
        cfg = model.two_atom_config(0.5, flavor="effective",
                                    collapse_variant="independent")
        table = run_trajectory(cfg, initial="ground-mixture", t_final_ms=1.0,
                               observe_every_ms=0.5, target="Psi",
                               stepper={"kind": "rk4-fixed"})
        assert table.columns == TRAJECTORY_COLUMNS
        assert [r["t_ms"] for r in table.rows] == [0.0, 0.5, 1.0]
        first = table.rows[0]
        assert first["fidelity_target"] == pytest.approx(1 / 9, abs=1e-12)
        assert first["p_ground"] == pytest.approx(1.0, abs=1e-12)
        assert abs(first["p_psi"] - first["fidelity_target"]) < 1e-12

    def test_three_atom_rows_blank_pair_populations(self):
        cfg = model.three_atom_config(0.5)
        table = run_trajectory(cfg, initial="gLgLgL", t_final_ms=0.02,
                               observe_every_ms=0.02, target="S3",
                               stepper={"kind": "rk-adaptive",
                                        "rel_tol": 1e-6, "abs_tol": 1e-9})
        assert math.isnan(table.rows[0]["p_psi"])
        assert table.rows[0]["fidelity_target"] == pytest.approx(0.0, abs=1e-12)
        assert table.metadata["engine"] == "reduced-symmetric"


class TestFigurePipelines:
    def test_fig2_small_grid(self, tmp_path):
        paths = reproduce_figure("fig2", out_dir=tmp_path, grid=(2, 2), jobs=2)
        rows = read_csv(paths["data"])
        assert rows[0] == list(SWEEP_COLUMNS)
        assert len(rows) == 5
        meta = json.loads(paths["meta"].read_text())
        assert meta["rules"] == ["cross-resonant-u", "microwave-lock"]

    def test_fig3_inset_short(self, tmp_path):
        paths = reproduce_figure("fig3-inset", out_dir=tmp_path, horizon_ms=2.0)
        rows = read_csv(paths["data"])
        assert rows[0] == list(TRAJECTORY_COLUMNS)
        assert len(rows) == 4   # t = 0, 1, 2 ms
        meta = json.loads(paths["meta"].read_text())
        assert meta["config"]["flavor"] == "effective"
        assert meta["config"]["collapse_variant"] == "independent"

    def test_fig4_short(self, tmp_path):
        paths = reproduce_figure("fig4", out_dir=tmp_path, horizon_ms=1.0)
        meta = json.loads(paths["meta"].read_text())
        assert meta["config"]["atoms"] == 3
        assert meta["config"]["gamma_angular"] is False
        assert meta["config"]["u_table_mhz"]["LL"] == pytest.approx(1.0)
        assert meta["config"]["u_table_mhz"]["L0"] == pytest.approx(0.1)

    def test_unknown_figure(self):
        with pytest.raises(ValueError, match="fig9"):
            reproduce_figure("fig9")

    def test_override_validation(self):
        with pytest.raises(model.ConfigError, match="bogus"):
            reproduce_figure("fig2", {"bogus": 1})


class TestCli:
    @pytest.fixture
    def config_path(self, tmp_path):
        p = tmp_path / "two_atom.json"
        p.write_text(json.dumps(model.two_atom_config(5.0)))
        return str(p)

    def test_steady_summary(self, config_path, capsys):
        assert cli_main(["steady", "--config", config_path]) == 0
        out = capsys.readouterr().out
        assert "negativity=0.999" in out
        assert "residual=" in out and "wall_ms=" in out

    def test_missing_config_names_path(self, capsys):
        assert cli_main(["steady", "--config", "/tmp/does-not-exist.json"]) == 2
        assert "/tmp/does-not-exist.json" in capsys.readouterr().err

    def test_unknown_key_names_key(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({**model.two_atom_config(1.0), "oops": 3}))
        assert cli_main(["steady", "--config", str(p)]) == 2
        assert "oops" in capsys.readouterr().err

    def test_unknown_figure_exits_2(self, capsys):
        assert cli_main(["figure", "fig7"]) == 2

    def test_evolve_and_outputs(self, tmp_path, capsys):
        p = tmp_path / "eff.json"
        p.write_text(json.dumps(model.two_atom_config(
            0.5, flavor="effective", collapse_variant="independent")))
        code = cli_main(["evolve", "--config", str(p), "--t-final-ms", "0.4",
                         "--observe-every-ms", "0.2", "--stepper", "rk4-fixed",
                         "--out", str(tmp_path), "--format", "csv"])
        assert code == 0
        out = capsys.readouterr().out
        assert "fidelity_psi=" in out
        assert (tmp_path / "trajectory.csv").exists()
        assert (tmp_path / "trajectory.meta.json").exists()

    def test_sweep_cli(self, config_path, tmp_path, capsys):
        code = cli_main(["sweep", "--config", config_path,
                         "--axis", "delta_mhz=1:2:2", "--jobs", "1",
                         "--out", str(tmp_path)])
        assert code == 0
        assert "points=2" in capsys.readouterr().out
        assert (tmp_path / "sweep.csv").exists()

    def test_bad_axis_string(self, config_path, capsys):
        assert cli_main(["sweep", "--config", config_path,
                         "--axis", "delta_mhz"]) == 2

    def test_variant_flag_overrides_config(self, config_path, capsys):
        code = cli_main(["steady", "--config", config_path,
                         "--flavor", "effective",
                         "--collapse-variant", "independent"])
        assert code == 0
        assert "negativity=1.000000" in capsys.readouterr().out

    def test_jobs_env_fallback(self, monkeypatch):
        monkeypatch.setenv(experiments.JOBS_ENV, "3")
        assert experiments._jobs_default() == 3
        monkeypatch.setenv(experiments.JOBS_ENV, "junk")
        assert experiments._jobs_default() == 1
