from src.experiments.config_file import FORMAT_VERSION_LINE, load_config, parse_config
from src.experiments.runner import (
    ExperimentSpec,
    RunPlan,
    RunResult,
    SweepKind,
    configure_run,
    parse_sweep,
    plan_runs,
    run_experiment,
)

__all__ = [
    "FORMAT_VERSION_LINE",
    "ExperimentSpec",
    "RunPlan",
    "RunResult",
    "SweepKind",
    "configure_run",
    "load_config",
    "parse_config",
    "parse_sweep",
    "plan_runs",
    "run_experiment",
]
