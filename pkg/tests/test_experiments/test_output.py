from __future__ import annotations

import csv
from pathlib import Path

import pytest

from src.config import PolicyName, SimConfig
from src.experiments.config_file import FORMAT_VERSION_LINE
from src.experiments.output import (
    RUN_COLUMNS,
    comparison_rows,
    dump_layout,
    layout_path,
    summary_rows,
    write_experiment,
)
from src.experiments.runner import ExperimentSpec, RunPlan, RunResult, SweepKind
from src.model.objects import RelKind
from src.storage.pages import PageStore
from src.utils.metrics import MetricsReport
from tests.conftest import make_graph


def _result(policy: PolicyName, value: float | None, seed: int, response: float) -> RunResult:
    plan = RunPlan(
        policy=policy,
        sweep_param="BUFSIZE",
        sweep_value=value,
        seed=seed,
        config=SimConfig(policy=policy, seed=seed),
    )
    report = MetricsReport(
        policy=str(policy),
        seed=seed,
        completed=10,
        mean_response_ms=response,
        txn_reads=int(response),
        mean_pages_used=20.0,
        response_by_kind={"Q1": response},
    )
    return RunResult(plan, report)


def _read(path: Path) -> tuple[str, list[dict[str, str]]]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


def test_summary_groups_replications():
    spec = ExperimentSpec(sweep_kind=SweepKind.BUFFER, sweep_values=[10, 20])
    results = [
        _result(PolicyName.CK, 10, 0, 100.0),
        _result(PolicyName.CK, 10, 1, 120.0),
        _result(PolicyName.CK, 20, 0, 80.0),
        _result(PolicyName.CK, 20, 1, 80.0),
    ]
    rows = summary_rows(spec, results)

    assert [(r["sweep_value"], r["n"]) for r in rows] == [(10, 2), (20, 2)]
    assert rows[0]["mean_response_ms_mean"] == 110.0
    assert rows[1]["mean_response_ms_std"] == 0.0
    assert rows[0]["improvement_pct"] == 0.0
    assert rows[1]["improvement_pct"] == pytest.approx(100 * 30 / 110)


def test_comparison_is_relative_to_baseline():
    spec = ExperimentSpec(policies=[PolicyName.CACTIS, PolicyName.CK])
    rows = summary_rows(
        spec,
        [_result(PolicyName.CACTIS, None, 0, 50.0), _result(PolicyName.CK, None, 0, 100.0)],
    )
    comparison = {r["metric"]: r for r in comparison_rows(rows, "ck")}
    assert comparison["mean_response_ms"]["cactis"] == 0.5
    assert comparison["mean_response_ms"]["ck"] == 1.0
    assert comparison["clust_ios"]["ck"] is None  # zero baseline


def test_write_experiment(tmp_path: Path):
    out = tmp_path / "nested" / "buffer.csv"
    spec = ExperimentSpec(
        sweep_kind=SweepKind.BUFFER,
        sweep_values=[10],
        policies=[PolicyName.CACTIS, PolicyName.CK],
        output=out,
    )
    results = [
        _result(PolicyName.CACTIS, 10, 0, 40.0),
        _result(PolicyName.CACTIS, 10, 1, 60.0),
        _result(PolicyName.CK, 10, 0, 100.0),
    ]
    results[0].layout = ["1 1 1 -"]

    paths = write_experiment(spec, results)

    assert paths[:3] == [
        out,
        out.with_name("buffer.summary.csv"),
        out.with_name("buffer.comparison.csv"),
    ]
    version, rows = _read(out)
    assert version == FORMAT_VERSION_LINE
    assert list(rows[0]) == RUN_COLUMNS
    assert len(rows) == 3
    assert rows[0]["response_Q1"] == "40"
    assert rows[0]["response_U2"] == "-"

    _, summary = _read(paths[1])
    assert [r["n"] for r in summary] == ["2", "1"]

    _, comparison = _read(paths[2])
    response = next(r for r in comparison if r["metric"] == "mean_response_ms")
    assert float(response["cactis"]) == 0.5

    assert paths[3] == out.with_name("buffer.csv.layout.cactis.10.0.txt")
    assert paths[3].read_text() == "1 1 1 -\n"


def test_layout_path_without_sweep_value(tmp_path: Path):
    result = _result(PolicyName.ORION, None, 3, 1.0)
    assert layout_path(tmp_path / "single.csv", result).name == "single.csv.layout.orion.3.txt"


def test_dump_layout_lines(config: SimConfig):
    graph = make_graph(3)
    graph.link(2, 1, RelKind.VERSION)
    graph.link(2, 3, RelKind.EQUIVALENCE)
    store = PageStore(config)
    page = store.allocate_page()
    for oid in graph.objects:
        store.place_object(graph.objects[oid], page)

    assert dump_layout(graph, store) == [
        "1 1 1 v<2",
        "2 1 1 v>1,e>3",
        "3 1 1 e<2",
    ]
