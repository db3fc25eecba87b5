"""Experiment sweeps: every (policy, sweep value, replication) is one independent run."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from multiprocessing import Pool
from pathlib import Path

import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import PolicyName, SimConfig, isolate_query, scaled_read_weights, settings
from src.engine.simulator import Simulator
from src.errors import ConfigError
from src.utils.metrics import MetricsReport

logger = structlog.get_logger()


class SweepKind(StrEnum):
    DB_SIZE = "db_size"
    BUFFER = "buffer"
    RW_RATIO = "rw_ratio"
    QUERY_ISOLATION = "query_isolation"
    SINGLE = "single"


# parameter each sweep varies, as written to the sweep_param column
SWEEP_PARAM: dict[SweepKind, str] = {
    SweepKind.DB_SIZE: "NOBJ",
    SweepKind.BUFFER: "BUFSIZE",
    SweepKind.RW_RATIO: "r",
    SweepKind.QUERY_ISOLATION: "query",
    SweepKind.SINGLE: "-",
}

# default sweep bounds (the documented parameter ranges)
SWEEP_RANGES: dict[SweepKind, tuple[float, float]] = {
    SweepKind.DB_SIZE: (100, 1000),
    SweepKind.BUFFER: (10, 100),
    SweepKind.QUERY_ISOLATION: (1, 12),
}


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sweep_kind: SweepKind = SweepKind.SINGLE
    sweep_values: list[float] = Field(default_factory=list)
    policies: list[PolicyName] = Field(default_factory=lambda: list(PolicyName))
    base: SimConfig = Field(default_factory=SimConfig)
    seeds: int | None = Field(None, ge=1)  # replications; None = base.replications
    output: Path = Path("results/experiment.csv")
    baseline: PolicyName | None = PolicyName.CK
    dump_layout: bool = False
    enforce_ranges: bool = True

    @model_validator(mode="after")
    def _check_values(self) -> ExperimentSpec:
        if not self.policies:
            raise ValueError("at least one policy is required")
        kind = self.sweep_kind
        if kind in (SweepKind.DB_SIZE, SweepKind.BUFFER, SweepKind.QUERY_ISOLATION):
            for value in self.sweep_values:
                if value != int(value):
                    raise ValueError(f"{kind} sweep values must be integers, got {value}")
        if kind == SweepKind.RW_RATIO and any(v < 0 for v in self.sweep_values):
            raise ValueError("read scaling factors must be >= 0")
        bounds = SWEEP_RANGES.get(kind)
        if bounds is not None and (self.enforce_ranges or kind == SweepKind.QUERY_ISOLATION):
            lo, hi = bounds
            outside = [v for v in self.sweep_values if not lo <= v <= hi]
            if outside:
                raise ValueError(f"{kind} values {outside} outside [{lo:g}, {hi:g}]")
        return self

    @property
    def replications(self) -> int:
        return self.seeds if self.seeds is not None else self.base.replications

    @property
    def values(self) -> list[float | None]:
        if self.sweep_kind == SweepKind.SINGLE:
            return [None]
        if self.sweep_kind == SweepKind.QUERY_ISOLATION and not self.sweep_values:
            return [float(i) for i in range(1, 13)]
        return list(self.sweep_values)


def parse_sweep(text: str) -> tuple[SweepKind, list[float]]:
    """Parse ``KIND=lo..hi:step``, ``KIND=v1,v2,...`` or a bare ``KIND``."""
    name, sep, body = text.partition("=")
    try:
        kind = SweepKind(name.strip())
    except ValueError:
        choices = ", ".join(k.value for k in SweepKind)
        raise ConfigError(f"unknown sweep {name.strip()!r} (choose from {choices})") from None
    body = body.strip()
    if not sep or not body:
        return kind, []

    try:
        if ".." in body:
            bounds, _, step_text = body.partition(":")
            lo_text, _, hi_text = bounds.partition("..")
            lo, hi = float(lo_text), float(hi_text)
            step = float(step_text) if step_text else 1.0
            if step <= 0 or hi < lo:
                raise ConfigError(f"empty sweep range {body!r}")
            count = math.floor((hi - lo) / step + 1e-9) + 1
            return kind, [round(lo + i * step, 10) for i in range(count)]
        return kind, [float(item) for item in body.split(",") if item.strip()]
    except ValueError:
        raise ConfigError(f"malformed sweep values {body!r}") from None


@dataclass
class RunPlan:
    policy: PolicyName
    sweep_param: str
    sweep_value: float | None
    seed: int
    config: SimConfig
    dump_layout: bool = False


@dataclass
class RunResult:
    plan: RunPlan
    report: MetricsReport
    layout: list[str] | None = None


def configure_run(
    base: SimConfig, policy: PolicyName, kind: SweepKind, value: float | None, seed: int
) -> SimConfig:
    config = base.model_copy(update={"policy": policy, "seed": seed})
    match kind:
        case SweepKind.DB_SIZE:
            return config.model_copy(update={"NOBJ": int(value)})
        case SweepKind.BUFFER:
            return config.model_copy(update={"BUFSIZE": int(value)})
        case SweepKind.RW_RATIO:
            return scaled_read_weights(config, value)
        case SweepKind.QUERY_ISOLATION:
            return isolate_query(config, int(value))
    return config


def plan_runs(spec: ExperimentSpec) -> list[RunPlan]:
    """Runs in output order: policy, then sweep value, then replication."""
    plans: list[RunPlan] = []
    for policy in spec.policies:
        for value in spec.values:
            for rep in range(spec.replications):
                seed = spec.base.seed + rep
                plans.append(
                    RunPlan(
                        policy=policy,
                        sweep_param=SWEEP_PARAM[spec.sweep_kind],
                        sweep_value=value,
                        seed=seed,
                        config=configure_run(spec.base, policy, spec.sweep_kind, value, seed),
                        dump_layout=spec.dump_layout,
                    )
                )
    return plans


def execute_run(plan: RunPlan) -> RunResult:
    from src.experiments.output import dump_layout

    simulator = Simulator(plan.config)
    report = simulator.run()
    layout = dump_layout(simulator.graph, simulator.store) if plan.dump_layout else None
    return RunResult(plan, report, layout)


def run_plans(plans: list[RunPlan], workers: int | None = None) -> list[RunResult]:
    workers = settings.concurrent_runs if workers is None else workers
    if workers > 1 and len(plans) > 1:
        # Pool.map keeps input order, so output stays deterministic
        with Pool(processes=workers) as pool:
            return pool.map(execute_run, plans)
    return [execute_run(plan) for plan in plans]


def run_experiment(spec: ExperimentSpec) -> list[Path]:
    """Run every planned run and write the CSV files; returns the paths written."""
    from src.experiments.output import write_experiment

    plans = plan_runs(spec)
    logger.info(
        "experiment_started",
        sweep=spec.sweep_kind,
        policies=[str(p) for p in spec.policies],
        runs=len(plans),
        workers=settings.concurrent_runs,
    )
    results = run_plans(plans)
    paths = write_experiment(spec, results)
    logger.info("experiment_written", runs=len(results), files=[str(p) for p in paths])
    return paths
