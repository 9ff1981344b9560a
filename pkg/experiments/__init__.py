"""
Experiments package for Graph Blowup Lab.

Lifespan laws and fits, experiment config files, epsilon sweeps,
critical-curve scans and output writers.
"""

from experiments.scaling import (
    gamma,
    fujita,
    predicted_lifespan_model,
    fit_scaling,
    implicit_lifespan_check,
)
from experiments.config_file import ExperimentConfig, defaults_text
from experiments.sweep import build_graph, build_problem, lifespan_sweep, run_directory
from experiments.curve import curve_margin, critical_curve_scan
from experiments.exporters import (
    write_csv,
    write_json,
    write_records_csv,
    plot_scaling,
    plot_phase_diagram,
)

__all__ = [
    # Scaling laws
    'gamma',
    'fujita',
    'predicted_lifespan_model',
    'fit_scaling',
    'implicit_lifespan_check',

    # Configuration
    'ExperimentConfig',
    'defaults_text',

    # Runs
    'build_graph',
    'build_problem',
    'lifespan_sweep',
    'run_directory',
    'curve_margin',
    'critical_curve_scan',

    # Outputs
    'write_csv',
    'write_json',
    'write_records_csv',
    'plot_scaling',
    'plot_phase_diagram',
]
