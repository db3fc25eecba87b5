"""CSV emission for experiment results.

Three files per experiment, each led by the format version line:

- ``<out>``: one row per run
- ``<out stem>.summary.csv``: mean and stddev per (policy, sweep value)
- ``<out stem>.comparison.csv``: each policy's mean over the baseline policy's mean
"""

from __future__ import annotations

import csv
from collections.abc import Iterable
from pathlib import Path

import structlog

from src.experiments.config_file import FORMAT_VERSION_LINE
from src.experiments.runner import ExperimentSpec, RunResult, SweepKind
from src.model.objects import Direction, ObjectGraph
from src.storage.pages import PageStore
from src.utils.metrics import SUMMARY_FIELDS, aggregate
from src.workload.transactions import ALL_KINDS

logger = structlog.get_logger()

RUN_COLUMNS: list[str] = [
    "policy",
    "sweep_param",
    "sweep_value",
    "seed",
    "mean_response_ms",
    "txn_ios",
    "clust_ios",
    "pages_used",
    "throughput_tps",
    "peak_pages",
    "buffer_fraction",
    "rw_ratio",
    "completed",
    *(f"response_{kind}" for kind in ALL_KINDS),
    *(f"txn_ios_{kind}" for kind in ALL_KINDS),
]

_KIND_CODES = {"version": "v", "configuration": "c", "equivalence": "e"}


def _fmt(value: object) -> object:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return value


def run_row(result: RunResult) -> dict[str, object]:
    report = result.report
    row: dict[str, object] = {
        "policy": str(result.plan.policy),
        "sweep_param": result.plan.sweep_param,
        "sweep_value": result.plan.sweep_value,
        "seed": result.plan.seed,
        "mean_response_ms": report.mean_response_ms,
        "txn_ios": report.txn_ios,
        "clust_ios": report.clust_ios,
        "pages_used": report.mean_pages_used,
        "throughput_tps": report.throughput_tps,
        "peak_pages": report.peak_pages,
        "buffer_fraction": report.buffer_fraction,
        "rw_ratio": report.rw_ratio,
        "completed": report.completed,
    }
    for kind in ALL_KINDS:
        row[f"response_{kind}"] = report.response_by_kind.get(str(kind))
        row[f"txn_ios_{kind}"] = report.txn_ios_by_kind.get(str(kind), 0)
    return row


def _write_csv(path: Path, columns: list[str], rows: Iterable[dict[str, object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(FORMAT_VERSION_LINE + "\n")
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k)) for k in columns})
    return path


def write_rows(path: Path, results: list[RunResult]) -> Path:
    return _write_csv(path, RUN_COLUMNS, (run_row(r) for r in results))


def summary_rows(spec: ExperimentSpec, results: list[RunResult]) -> list[dict[str, object]]:
    groups: dict[tuple[str, float | None], list[RunResult]] = {}
    for result in results:
        key = (str(result.plan.policy), result.plan.sweep_value)
        groups.setdefault(key, []).append(result)

    rows: list[dict[str, object]] = []
    for (policy, value), members in groups.items():
        summary = aggregate([m.report for m in members])
        row: dict[str, object] = {
            "policy": policy,
            "sweep_param": members[0].plan.sweep_param,
            "sweep_value": value,
            "n": len(members),
        }
        for name, stats in summary.items():
            row[f"{name}_mean"] = stats.mean
            row[f"{name}_std"] = stats.stddev
        rows.append(row)

    if spec.sweep_kind == SweepKind.BUFFER:
        _add_improvement(rows)
    return rows


def _add_improvement(rows: list[dict[str, object]]) -> None:
    """Response-time gain relative to each policy's smallest buffer, in percent."""
    reference: dict[object, float] = {}
    for row in sorted(rows, key=lambda r: r["sweep_value"]):
        base = reference.setdefault(row["policy"], row["mean_response_ms_mean"])
        current = row["mean_response_ms_mean"]
        row["improvement_pct"] = 100.0 * (base - current) / base if base else 0.0


def summary_columns(rows: list[dict[str, object]]) -> list[str]:
    columns = ["policy", "sweep_param", "sweep_value", "n"]
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    return columns


def write_summary(path: Path, rows: list[dict[str, object]]) -> Path:
    return _write_csv(path, summary_columns(rows), rows)


def comparison_rows(
    rows: list[dict[str, object]], baseline: str
) -> list[dict[str, object]]:
    """Per sweep value and criterion: every policy's mean divided by the baseline's."""
    by_value: dict[object, dict[str, dict[str, object]]] = {}
    for row in rows:
        by_value.setdefault(row["sweep_value"], {})[str(row["policy"])] = row

    out: list[dict[str, object]] = []
    for value, policies in by_value.items():
        reference = policies.get(baseline)
        if reference is None:
            continue
        for metric in SUMMARY_FIELDS:
            entry: dict[str, object] = {"sweep_value": value, "metric": metric}
            denominator = reference[f"{metric}_mean"]
            for policy, row in policies.items():
                numerator = row[f"{metric}_mean"]
                entry[policy] = numerator / denominator if denominator else None
            out.append(entry)
    return out


def write_comparison(
    path: Path, rows: list[dict[str, object]], policies: list[str]
) -> Path:
    return _write_csv(path, ["sweep_value", "metric", *policies], rows)


def dump_layout(graph: ObjectGraph, store: PageStore) -> list[str]:
    """One line per object: ``oid class page edges``."""
    lines: list[str] = []
    for oid in sorted(graph.objects):
        obj = graph.objects[oid]
        edges = ",".join(
            f"{_KIND_CODES[e.kind]}{'>' if e.direction == Direction.FORWARD else '<'}{e.target_oid}"
            for e in obj.edges
        )
        lines.append(f"{oid} {obj.class_id} {store.page_of(oid)} {edges or '-'}")
    return lines


def layout_path(out: Path, result: RunResult) -> Path:
    plan = result.plan
    parts = [out.name, "layout", str(plan.policy)]
    if plan.sweep_value is not None:
        parts.append(f"{plan.sweep_value:g}")
    parts.extend([str(plan.seed), "txt"])
    return out.with_name(".".join(parts))


def write_experiment(spec: ExperimentSpec, results: list[RunResult]) -> list[Path]:
    out = spec.output
    paths = [write_rows(out, results)]

    rows = summary_rows(spec, results)
    paths.append(write_summary(out.with_name(f"{out.stem}.summary.csv"), rows))

    baseline = spec.baseline
    if baseline is not None and baseline in spec.policies:
        policies = [str(p) for p in spec.policies]
        comparison = comparison_rows(rows, str(baseline))
        paths.append(
            write_comparison(out.with_name(f"{out.stem}.comparison.csv"), comparison, policies)
        )

    for result in results:
        if result.layout is not None:
            path = layout_path(out, result)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text("\n".join(result.layout) + "\n", encoding="utf-8")
            paths.append(path)
    logger.debug("experiment_files", count=len(paths))
    return paths
