"""
Tests for application settings and experiment config files.
"""

import pytest

from config import Settings
from experiments.config_file import ExperimentConfig, defaults_text
from solver.problem import ProblemKind
from utils.exceptions import ConfigError


class TestSettings:
    """Tests for environment-driven settings."""

    def test_defaults(self):
        """Defaults match the documented values."""
        s = Settings()
        assert s.trend_tolerance == 0.10
        assert s.c_bound == 1.0
        assert s.solver_snapshot_dt == 0.25

    def test_environment_override(self, monkeypatch):
        """LAB_ variables override defaults; comma strings become lists."""
        monkeypatch.setenv("LAB_SOLVER_RTOL", "1e-6")
        monkeypatch.setenv("LAB_ALLOWED_ORIGINS", "http://a.test,http://b.test")
        s = Settings()
        assert s.solver_rtol == 1e-6
        assert s.allowed_origins == ["http://a.test", "http://b.test"]


class TestConfigFile:
    """Tests for parsing and rendering experiment configs."""

    def test_empty_file_is_default(self):
        """Missing keys fall back to the defaults."""
        assert ExperimentConfig.from_text("") == ExperimentConfig()

    def test_defaults_round_trip(self):
        """The rendered defaults parse back to an equal config."""
        config = ExperimentConfig.from_text(defaults_text())
        assert config == ExperimentConfig()
        assert config.signature() == ExperimentConfig().signature()

    def test_custom_values_round_trip(self):
        """A config with every section set survives to_text / from_text."""
        text = """
        [graph]
        lattice_dim = 2
        lattice_radius = 32
        metric = euclidean

        [problem]
        kind = system
        p = 2
        q = 3   # inline comment

        [epsilon]
        min = 0.5
        max = 2
        count = 3

        [solver]
        t_max = 500
        thresholds = 1e4,1e3

        [cutoff]
        radii = 16, 4, 8
        """
        config = ExperimentConfig.from_text("\n".join(line.strip() for line in text.splitlines()))
        assert config.graph.metric == "euclidean"
        assert config.problem.kind == ProblemKind.SYSTEM
        assert config.problem.q == 3.0
        assert config.solver.thresholds == [1e3, 1e4]
        assert config.cutoff.radii == [4.0, 8.0, 16.0]
        assert config.epsilon.values() == pytest.approx([0.5, 1.0, 2.0])
        assert ExperimentConfig.from_text(config.to_text()) == config

    def test_unknown_section(self):
        """Unknown sections are errors, not silently ignored."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text("[plots]\ncolor = red\n")

    def test_unknown_key(self):
        """Unknown keys inside a section are errors too."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_text("[problem]\nexponent = 2\n")
        assert "problem" in str(exc_info.value)

    def test_system_needs_q(self):
        """kind = system without q is invalid."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text("[problem]\nkind = system\np = 2\n")

    def test_invalid_values(self):
        """Range violations name the offending key."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_text("[problem]\np = 1\n")
        assert "problem.p" in str(exc_info.value)
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text("[epsilon]\nmin = 2\nmax = 1\n")

    def test_syntax_error(self):
        """Lines outside any section cannot be parsed."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_text("p = 2\n")

    def test_missing_file(self, tmp_path):
        """Unreadable files raise ConfigError."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file(tmp_path / "missing.ini")

    def test_signature_ignores_outputs(self):
        """Output location and worker count do not change results."""
        a = ExperimentConfig.from_text("[output]\ndir = /tmp/a\n[run]\nworkers = 1\n")
        b = ExperimentConfig.from_text("[output]\ndir = /tmp/b\n[run]\nworkers = 8\n")
        c = ExperimentConfig.from_text("[run]\nseed = 3\n")
        assert a.signature() == b.signature()
        assert a.signature() != c.signature()
