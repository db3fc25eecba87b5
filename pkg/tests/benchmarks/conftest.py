"""Acceptance benchmark infrastructure.

The benchmarks rerun the policy comparisons at full desk scale (5 seeds per
point) and check orderings and trends rather than absolute numbers. Every
measured mean is collected and written to a human-readable report in
benchmarks_output/ at the end of the session.

Run with ``pytest tests/benchmarks -m benchmark -o addopts=""``.
"""

from __future__ import annotations

import datetime
import time
from dataclasses import dataclass, field
from pathlib import Path

import pytest

from src.config import PolicyName, SimConfig
from src.experiments.runner import (
    SWEEP_PARAM,
    RunPlan,
    RunResult,
    SweepKind,
    configure_run,
    execute_run,
)
from src.utils.metrics import MetricSummary, aggregate

SEEDS = 5


@dataclass
class BenchmarkResult:
    """Seed-averaged criteria of one (policy, sweep point)."""

    policy: str
    sweep: str
    value: float | None
    summary: dict[str, MetricSummary]
    wall_time_s: float

    def mean(self, metric: str) -> float:
        return self.summary[metric].mean


@dataclass
class BenchmarkCollector:
    """Accumulates benchmark results across the entire test session."""

    results: list[BenchmarkResult] = field(default_factory=list)
    session_start: float = field(default_factory=time.monotonic)

    def add(self, result: BenchmarkResult) -> None:
        self.results.append(result)

    def format_report(self) -> str:
        session_duration = time.monotonic() - self.session_start
        now = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")

        lines: list[str] = []
        lines.append("=" * 100)
        lines.append(f"ACCEPTANCE BENCHMARKS -- {now}")
        lines.append(f"Total session time: {session_duration:.1f}s")
        lines.append(f"Sweep points measured: {len(self.results)}")
        lines.append("=" * 100)
        lines.append("")

        sweeps: dict[str, list[BenchmarkResult]] = {}
        for r in self.results:
            sweeps.setdefault(r.sweep, []).append(r)

        for sweep, results in sorted(sweeps.items()):
            lines.append(f"--- {sweep.upper()} ---")
            lines.append(
                f"  {'Policy':<8} {'Value':<8} {'Resp ms':<12} {'Txn I/O':<10} "
                f"{'Clust I/O':<10} {'Pages':<8} {'Tx/s':<8} {'Wall s':<8}"
            )
            lines.append(f"  {'-' * 80}")
            for r in sorted(results, key=lambda r: (r.policy, r.value or 0)):
                value = "-" if r.value is None else f"{r.value:g}"
                lines.append(
                    f"  {r.policy:<8} {value:<8} {r.mean('mean_response_ms'):<12.2f} "
                    f"{r.mean('txn_ios'):<10.1f} {r.mean('clust_ios'):<10.1f} "
                    f"{r.mean('mean_pages_used'):<8.1f} {r.mean('throughput_tps'):<8.4f} "
                    f"{r.wall_time_s:<8.1f}"
                )
            lines.append("")

        lines.append("=" * 100)
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Session-scoped collector
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def benchmark_collector():
    """Collect all benchmark results across the session."""
    return BenchmarkCollector()


@pytest.fixture(scope="session", autouse=True)
def _write_benchmark_report(benchmark_collector: BenchmarkCollector):
    """Write the benchmark report to a file after all tests complete."""
    yield

    if not benchmark_collector.results:
        return

    report = benchmark_collector.format_report()
    print("\n\n" + report)

    output_dir = Path("benchmarks_output")
    output_dir.mkdir(exist_ok=True)

    timestamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
    (output_dir / f"acceptance_{timestamp}.txt").write_text(report, encoding="utf-8")
    (output_dir / "acceptance_latest.txt").write_text(report, encoding="utf-8")


# ---------------------------------------------------------------------------
# Per-test measurement fixture
# ---------------------------------------------------------------------------


class _SweepRunner:
    """Helper object returned by the `measure` fixture; memoizes sweep points."""

    def __init__(self, collector: BenchmarkCollector):
        self._collector = collector
        self._cache: dict[tuple[PolicyName, SweepKind, float | None], BenchmarkResult] = {}

    def __call__(
        self,
        policy: PolicyName,
        kind: SweepKind = SweepKind.SINGLE,
        value: float | None = None,
        base: SimConfig | None = None,
    ) -> BenchmarkResult:
        key = (policy, kind, value)
        cached = base is None
        if cached and key in self._cache:
            return self._cache[key]

        base = base or SimConfig()
        start = time.perf_counter()
        results: list[RunResult] = []
        for seed in range(SEEDS):
            config = configure_run(base, policy, kind, value, base.seed + seed)
            plan = RunPlan(policy, SWEEP_PARAM[kind], value, config.seed, config)
            results.append(execute_run(plan))
        result = BenchmarkResult(
            policy=str(policy),
            sweep=str(kind),
            value=value,
            summary=aggregate([r.report for r in results]),
            wall_time_s=time.perf_counter() - start,
        )
        self._collector.add(result)
        if cached:
            self._cache[key] = result
        return result


@pytest.fixture(scope="session")
def measure(benchmark_collector: BenchmarkCollector) -> _SweepRunner:
    return _SweepRunner(benchmark_collector)
