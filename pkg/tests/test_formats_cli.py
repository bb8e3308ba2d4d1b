import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from penning_tomo import formats
from penning_tomo.analysis import compare, oracle_wigner
from penning_tomo.cli import OUTDIR_ENV, main
from penning_tomo.config import ConfigError, RunConfig, build_state, load_config
from penning_tomo.fock import QuantumState, odd_cat_state, thermal_state
from penning_tomo.grids import PointGrid, default_pnt_grid, grid_from_dict, square_grid
from penning_tomo.measurement import OhtProtocol, PntProtocol, run_protocol
from penning_tomo.pnt import reconstruct_grid

CAT = odd_cat_state(1.5)


def run(*argv):
    return main([str(a) for a in argv])


class TestRoundTrips:
    def test_pure_state(self, tmp_path):
        s = odd_cat_state(1.1 + 0.4j)
        path = formats.write_json(tmp_path / "s.json", formats.state_to_json(s))
        back = formats.state_from_json(formats.read_json(path, "penning-tomo/state"))
        assert np.array_equal(back.vector, s.vector)

    def test_mixed_state(self, tmp_path):
        s = thermal_state(0.4, dim=24)
        path = formats.write_json(tmp_path / "s.json", formats.state_to_json(s))
        back = formats.state_from_json(formats.read_json(path))
        assert back.vector is None
        assert np.array_equal(back.matrix, s.matrix)

    def test_oht_measurement(self, tmp_path):
        recs = run_protocol(CAT, OhtProtocol(3, 50), 0.9, 4)
        path = formats.write_json(tmp_path / "m.json", formats.measurement_to_json(recs, {"seed": 4}))
        back = formats.measurement_from_json(formats.read_json(path, "penning-tomo/measurement"))
        assert all(a.phi == b.phi and a.seed == b.seed and np.array_equal(a.samples, b.samples) for a, b in zip(recs, back))

    def test_pnt_measurement(self, tmp_path):
        recs = run_protocol(CAT, PntProtocol([0.1 + 0.3j, -1.7], 100), 1.0, 4)
        path = formats.write_json(tmp_path / "m.json", formats.measurement_to_json(recs))
        assert formats.measurement_from_json(formats.read_json(path)) == recs

    @pytest.mark.parametrize("grid", [default_pnt_grid(), square_grid(3.0, 7), PointGrid.from_points([0.1, 1 / 3 + 2j])])
    def test_grid_bit_exact(self, tmp_path, grid):
        wg = oracle_wigner(CAT, grid, -0.25)
        wg.stderr = np.full(wg.values.size, 1 / 7)
        path = formats.write_json(tmp_path / "g.json", formats.grid_to_json(wg))
        back = formats.grid_from_json(formats.read_json(path, "penning-tomo/wigner-grid"))
        assert back.grid == grid
        assert np.array_equal(back.points, wg.points)
        assert np.array_equal(back.values, wg.values)
        assert np.array_equal(back.stderr, wg.stderr)
        assert back.meta == wg.meta
        assert grid_from_dict(json.loads(json.dumps(grid.to_dict()))) == grid

    def test_csv(self):
        recs = run_protocol(CAT, PntProtocol(default_pnt_grid(), 20), 1.0, 0)
        wg = reconstruct_grid(recs, 0.0, grid=default_pnt_grid())
        lines = formats.grid_to_csv(wg).splitlines()
        assert lines[0] == "re,im,value,stderr"
        assert len(lines) == 256
        row = [float(v) for v in lines[1].split(",")]
        assert row == [-3.2, -2.8, wg.values[0], wg.stderr[0]]

    def test_csv_without_stderr(self):
        wg = oracle_wigner(CAT, square_grid(1.0, 3), 0.0)
        assert formats.grid_to_csv(wg).splitlines()[0] == "re,im,value"

    def test_matrix_text(self):
        wg = oracle_wigner(CAT, default_pnt_grid(), 0.0)
        lines = formats.grid_to_matrix_text(wg).splitlines()
        assert len(lines) == 16
        assert lines[0].split()[0] == "17"
        assert len(lines[1].split()) == 18

    def test_wrong_format_rejected(self, tmp_path):
        path = formats.write_json(tmp_path / "s.json", formats.state_to_json(CAT))
        with pytest.raises(ValueError):
            formats.read_json(path, "penning-tomo/wigner-grid")

    def test_version_checked(self, tmp_path):
        doc = formats.state_to_json(CAT)
        doc["format_version"] = 99
        path = formats.write_json(tmp_path / "s.json", doc)
        with pytest.raises(ValueError):
            formats.read_json(path)

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        formats.atomic_write(tmp_path / "a" / "x.txt", "hi\n")
        assert [p.name for p in (tmp_path / "a").iterdir()] == ["x.txt"]


class TestConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg["state"]["kind"] == "odd_cat"
        assert cfg["reconstruction"]["s"] == -0.25

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("reconstruction:\n  smoothing: 0.1\n")
        with pytest.raises(ConfigError, match="reconstruction.smoothing"):
            load_config(path)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="seeds"):
            RunConfig.from_dict({"seeds": 3})

    def test_complex_alpha(self):
        s = build_state({"kind": "coherent", "alpha": [0.5, -0.25], "dim": 16})
        assert isinstance(s, QuantumState)
        assert np.vdot(s.vector, np.arange(16) * s.vector).real == pytest.approx(0.3125, abs=1e-9)

    @pytest.mark.parametrize("over", [{"efficiency": 0}, {"protocol": {"kind": "xyz"}}, {"state": {"kind": "squeezed"}}])
    def test_invalid_values(self, over):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(over)


class TestCli:
    def test_state_and_oracle(self, tmp_path):
        assert run("--out-dir", tmp_path, "state", "--kind", "odd_cat", "--alpha", 1.5) == 0
        assert run("--out-dir", tmp_path, "oracle", "--state", tmp_path / "state.json", "--s", 0,
                   "--grid", "default255", "--csv", "o.csv") == 0
        wg = formats.grid_from_json(formats.read_json(tmp_path / "grid.json"))
        assert wg.value_at(0) == pytest.approx(-2.0, abs=1e-10)
        assert (tmp_path / "o.csv").exists()

    def test_simulate_reconstruct_compare(self, tmp_path):
        assert run("--out-dir", tmp_path, "simulate", "--protocol", "pnt", "--samples", 200, "--seed", 3) == 0
        assert run("--out-dir", tmp_path, "reconstruct", tmp_path / "measurement.json", "--s", 0, "-o", "r.json",
                   "--matrix", "r.dat") == 0
        assert run("--out-dir", tmp_path, "oracle", "--s", 0, "--grid", "default255", "-o", "o.json") == 0
        assert run("--out-dir", tmp_path, "compare", tmp_path / "o.json", tmp_path / "r.json") == 0
        rep = formats.read_json(tmp_path / "report.json", "penning-tomo/comparison")
        assert rep["pointwise_z_pass"] >= 0.9

    def test_compare_identical(self, tmp_path, capsys):
        run("--out-dir", tmp_path, "oracle", "--n-grid", 5)
        assert run("--out-dir", tmp_path, "compare", tmp_path / "grid.json", tmp_path / "grid.json") == 0
        assert formats.read_json(tmp_path / "report.json")["rmse"] == 0

    def test_oht_at_zero_s_is_constraint_error(self, tmp_path, capsys):
        run("--out-dir", tmp_path, "simulate", "--protocol", "oht", "--phases", 4, "--samples", 100)
        code = run("--out-dir", tmp_path, "reconstruct", tmp_path / "measurement.json", "--s", 0)
        assert code == 2
        assert "s < 0" in capsys.readouterr().err

    def test_cutoff_error_exit_code(self, tmp_path):
        assert run("--out-dir", tmp_path, "state", "--kind", "fock", "--n", 40) == 2

    def test_missing_input(self, tmp_path):
        assert run("reconstruct", tmp_path / "nope.json") == 1

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.yaml"
        cfg.write_text("protocol:\n  shots: 5\n")
        assert run("--config", cfg, "--out-dir", tmp_path, "state") == 1
        assert "protocol.shots" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [["bogus"], ["simulate", "--samples", "0"], []])
    def test_usage_errors(self, argv):
        with pytest.raises(SystemExit) as exc:
            run(*argv)
        assert exc.value.code == 1

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTDIR_ENV, str(tmp_path))
        assert run("state", "-o", "env.json") == 0
        assert (tmp_path / "env.json").exists()

    def test_config_output_dir(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(yaml.safe_dump({"output_dir": str(tmp_path / "from_cfg"), "state": {"kind": "thermal", "nbar": 0.2}}))
        assert run("--config", cfg, "state") == 0
        doc = formats.read_json(tmp_path / "from_cfg" / "state.json")
        assert doc["provenance"]["config"]["kind"] == "thermal"

    def test_config_echo(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(yaml.safe_dump({"protocol": {"kind": "pnt", "samples": 50, "grid": "default255"}, "seed": 11,
                                       "efficiency": 0.9}))
        assert run("--config", cfg, "--out-dir", tmp_path, "simulate") == 0
        doc = formats.read_json(tmp_path / "measurement.json")
        expected = load_config(cfg).to_dict()
        assert doc["config"] == json.loads(json.dumps(expected))
        assert doc["records"][0]["efficiency"] == 0.9

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "penning_tomo", "--out-dir", str(tmp_path), "state"],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "state.json").exists()


class TestFigures:
    @pytest.mark.parametrize("name", ["figure1", "figure2"])
    def test_byte_identical_reruns(self, tmp_path, name):
        assert run("--out-dir", tmp_path / "a", name, "--seed", 5) == 0
        assert run("--out-dir", tmp_path / "b", name, "--seed", 5) == 0
        for f in ("grid.json", "grid.csv", "grid.dat", "measurement.json", "report.json"):
            assert (tmp_path / "a" / name / f).read_bytes() == (tmp_path / "b" / name / f).read_bytes(), f

    def test_figure1_reports_rmse(self, tmp_path):
        assert run("--out-dir", tmp_path, "figure1") == 0
        rep = formats.read_json(tmp_path / "figure1" / "report.json")
        assert rep["relative_rmse"] <= 0.15
        assert rep["config"]["protocol"]["phases"] == 27
        assert rep["config"]["reconstruction"]["s"] == -0.25

    def test_figure2_efficiency_flagged(self, tmp_path):
        assert run("--out-dir", tmp_path, "figure2", "--efficiency", 0.8) == 0
        rep = formats.read_json(tmp_path / "figure2" / "report.json")
        assert rep["smoothed"] is True
        assert rep["efficiency"] == 0.8
        grid = formats.read_json(tmp_path / "figure2" / "grid.json")
        assert grid["meta"]["smoothed"] is True
        assert grid["config"]["efficiency"] == 0.8

    def test_outputs_embed_config(self, tmp_path):
        run("--out-dir", tmp_path, "figure2")
        docs = [formats.read_json(tmp_path / "figure2" / f) for f in ("grid.json", "oracle.json", "measurement.json", "report.json")]
        configs = [d["config"] for d in docs]
        assert all(c == configs[0] for c in configs)
        assert configs[0]["seed"] == 7
        state_doc = formats.read_json(tmp_path / "figure2" / "state.json")
        assert state_doc["provenance"]["config"] == configs[0]["state"]

    def test_grid_compare_from_files_matches_report(self, tmp_path):
        run("--out-dir", tmp_path, "figure2")
        d = tmp_path / "figure2"
        a = formats.grid_from_json(formats.read_json(d / "oracle.json"))
        b = formats.grid_from_json(formats.read_json(d / "grid.json"))
        assert compare(a, b).rmse == formats.read_json(d / "report.json")["rmse"]
