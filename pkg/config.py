"""
Configuration management for Graph Blowup Lab using Pydantic Settings.

This module holds the application-wide defaults: logging, output location,
resource guards, solver controls and the HTTP API settings. Experiment config
files (see experiments/config_file.py) fall back to these values for every key
they leave out.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import field_validator
from typing import List, Union


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.

    All settings can be configured via .env file or environment variables
    (prefix ``LAB_``), e.g. ``LAB_LOG_LEVEL=DEBUG``.
    """

    # Logging
    log_level: str = "INFO"

    # Outputs
    output_dir: str = "runs"

    # Resource guards
    max_vertices: int = 2_000_000        # build_lattice / file loading cap
    sweep_workers: int = 4               # bounded worker pool for sweeps

    # Assumption checks
    c_bound: float = 1.0                 # sup sum omega / mu must stay below this
    decay_threshold: float = 10.0        # pass/fail constant for sup |Lap d| d^nu
    trend_tolerance: float = 0.10        # "no monotone growth beyond 10%"

    # Solver defaults
    solver_rtol: float = 1e-8
    solver_atol: float = 1e-10
    solver_initial_dt: float = 1e-2
    solver_dt_min: float = 1e-12
    solver_t_max: float = 2.0e4
    solver_threshold_ladder: Union[List[float], str] = [1e3, 1e4, 1e5, 1e6]
    solver_boundary_tolerance: float = 1e-6
    solver_snapshot_dt: float = 0.25
    # dt <= c / ||u||^((p-1)/2), or c / ||u||^(1/(2 Gamma)) for systems.
    # sup|u| ~ (T - t)^(-2/(p-1)), so each step stays below c (T - t).
    solver_growth_cap: float = 0.1

    # API Configuration
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    api_reload: bool = False

    # CORS Settings (can be comma-separated string or list)
    allowed_origins: Union[List[str], str] = ["http://localhost:3000"]

    @field_validator('allowed_origins', mode='before')
    @classmethod
    def parse_origins(cls, v):
        """Parse comma-separated string into list"""
        if isinstance(v, str):
            return [x.strip() for x in v.split(',')]
        return v

    @field_validator('solver_threshold_ladder', mode='before')
    @classmethod
    def parse_ladder(cls, v):
        """Parse comma-separated thresholds into a sorted float list"""
        if isinstance(v, str):
            v = [float(x) for x in v.split(',') if x.strip()]
        return sorted(float(x) for x in v)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="LAB_",
        case_sensitive=False,
        extra='ignore'
    )


# Global settings instance
settings = Settings()
