"""
Tests for the command line interface.
"""

import json

import pytest

from cli import main
from experiments.config_file import ExperimentConfig
from graphs.graph_io import read_graph


def _write_config(tmp_path, body: str):
    path = tmp_path / "run.ini"
    path.write_text(body + f"\n[output]\ndir = {tmp_path / 'runs'}\nlabel = cli\n", encoding="utf-8")
    return path


class TestConfigCommand:
    """Tests for `config`."""

    def test_defaults(self, capsys):
        """The printed defaults parse back to the default config."""
        assert main(["--log-level", "ERROR", "config", "--defaults"]) == 0
        printed = capsys.readouterr().out
        assert ExperimentConfig.from_text(printed) == ExperimentConfig()

    def test_check_good_file(self, tmp_path, capsys):
        """A valid file is reported as ok."""
        path = _write_config(tmp_path, "[problem]\np = 2.5\n")
        assert main(["config", "--check", str(path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_check_bad_file(self, tmp_path):
        """Config errors exit with code 2."""
        path = _write_config(tmp_path, "[problem]\nkind = system\n")
        assert main(["config", "--check", str(path)]) == 2


class TestGraphCommands:
    """Tests for `lattice`, `validate` and `bounds`."""

    def test_lattice(self, tmp_path):
        """A lattice file is written and reads back."""
        out = tmp_path / "z1.graph"
        assert main(["lattice", "--dim", "1", "--radius", "16", "--out", str(out)]) == 0
        assert read_graph(out).num_vertices == 33

    def test_validate(self, tmp_path):
        """Z^1 passes the structure and decay checks with volume exponent 1."""
        out = tmp_path / "validate"
        code = main(["validate", "--dim", "1", "--radius", "64", "--radii", "8,16,32,64", "--out", str(out)])
        assert code == 0
        summary = json.loads((out / "validate.json").read_text(encoding="utf-8"))
        assert summary["structure_passed"]
        assert summary["decay_passed"]
        assert summary["volume_exponent"] == pytest.approx(1.0, abs=0.05)
        assert (out / "volumes.csv").exists()

    def test_bounds(self, tmp_path):
        """Bound ratios are written per radius and bound."""
        out = tmp_path / "bounds.csv"
        code = main(["bounds", "--dim", "1", "--radius", "96", "--radii", "8,16,32", "--out", str(out)])
        assert code == 0
        lines = out.read_bytes().split(b"\r\n")
        assert lines[0].startswith(b"R,name")
        assert len([line for line in lines[1:] if line]) == 9

    def test_bad_radii(self, tmp_path):
        """Malformed number lists are config errors."""
        assert main(["bounds", "--radii", "8,x", "--out", str(tmp_path / "b.csv")]) == 2


class TestRunCommands:
    """Tests for `simulate` and `functionals`."""

    def test_simulate(self, tmp_path):
        """A blow-up run writes its trajectory and record."""
        path = _write_config(tmp_path, "[graph]\nlattice_radius = 64\n[solver]\nt_max = 100\n")
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(path), "--epsilon", "1", "--out", str(out)]) == 0
        record = json.loads((out / "record_eps1.json").read_text(encoding="utf-8"))
        assert record["verdict"] == "blowup"
        assert (out / "trajectory_eps1.csv").exists()

    def test_simulate_contaminated(self, tmp_path):
        """Runs reaching the truncation exit with code 4."""
        path = _write_config(tmp_path, "[graph]\nlattice_radius = 4\n[solver]\nt_max = 50\n")
        code = main(["simulate", "--config", str(path), "--epsilon", "0.1", "--out", str(tmp_path / "sim")])
        assert code == 4

    def test_functionals(self, tmp_path):
        """The functional report of a small-data run is written as CSV and JSON."""
        path = _write_config(
            tmp_path, "[graph]\nlattice_radius = 64\n[solver]\nt_max = 80\n[cutoff]\nradii = 4,8\nquad_points = 32\n"
        )
        out = tmp_path / "fn"
        assert main(["functionals", "--config", str(path), "--epsilon", "0.05", "--out", str(out)]) == 0
        report = json.loads((out / "functionals_eps0.05.json").read_text(encoding="utf-8"))
        assert len(report["residuals"]) == 2
        assert all(r["relative_residual"] < 1e-3 for r in report["residuals"])


@pytest.mark.slow
class TestSweepCommands:
    """Tests for `sweep` followed by `fit`."""

    def test_sweep_then_fit(self, tmp_path):
        """Five blow-up runs give a power fit with a negative slope."""
        path = _write_config(
            tmp_path,
            "[graph]\nlattice_radius = 64\n[solver]\nt_max = 100\n"
            "[epsilon]\nmin = 1\nmax = 3\ncount = 5\n[run]\nworkers = 1\n",
        )
        assert main(["sweep", "--config", str(path)]) == 0
        run_dir = tmp_path / "runs" / "cli"
        assert (run_dir / "lifespans.csv").exists()
        assert main(["fit", "--config", str(path)]) == 0
        fit = json.loads((run_dir / "fit_power.json").read_text(encoding="utf-8"))
        assert fit["points_used"] == 5
        assert fit["slope"] < 0
        assert (run_dir / "scaling_power.svg").exists()

    def test_fit_without_sweep(self, tmp_path):
        """Fitting before sweeping is an error."""
        path = _write_config(tmp_path, "[problem]\np = 2\n")
        assert main(["fit", "--config", str(path)]) == 1
