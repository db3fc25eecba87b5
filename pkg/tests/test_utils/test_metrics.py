from __future__ import annotations

import math

import pytest
import simpy

from src.config import SimConfig
from src.errors import EmptyAggregateError
from src.storage.pages import PageStore
from src.utils.metrics import (
    SUMMARY_FIELDS,
    MetricsCollector,
    MetricsReport,
    aggregate,
    summarize,
)
from src.workload.transactions import Transaction, TransactionKind
from tests.conftest import make_object


def _report(**values: float) -> MetricsReport:
    return MetricsReport(policy="cactis", seed=0, **values)


class TestAggregate:
    def test_mean_and_sample_stddev(self):
        summary = aggregate([_report(mean_response_ms=2.0), _report(mean_response_ms=4.0)])
        stats = summary["mean_response_ms"]
        assert stats.mean == 3.0
        assert stats.stddev == pytest.approx(math.sqrt(2))
        assert stats.n == 2

    def test_single_report_has_zero_stddev(self):
        assert aggregate([_report(txn_reads=5)])["txn_ios"].stddev == 0.0

    def test_covers_every_criterion_and_kind(self):
        report = _report(response_by_kind={"Q1": 3.0, "U2": 9.0})
        summary = aggregate([report])
        assert set(SUMMARY_FIELDS) <= set(summary)
        assert summary["response_Q1"].mean == 3.0
        assert summary["response_U2"].mean == 9.0

    def test_empty_input(self):
        with pytest.raises(EmptyAggregateError):
            aggregate([])
        with pytest.raises(EmptyAggregateError):
            summarize([])

    def test_non_finite_values_are_rejected(self):
        with pytest.raises(ValueError):
            aggregate([_report(throughput_tps=math.inf)])


class TestMetricsCollector:
    def test_time_averaged_page_count(self, config: SimConfig):
        env = simpy.Environment()
        store = PageStore(config)
        collector = MetricsCollector(config, env, store)

        page = store.allocate_page()
        store.place_object(make_object(1), page)  # one page in use from t=0
        env.run(until=10.0)
        second = store.allocate_page()
        store.place_object(make_object(2), second)  # two pages from t=10
        env.run(until=30.0)

        report = collector.report()
        assert report.mean_pages_used == pytest.approx((1 * 10 + 2 * 20) / 30)
        assert report.peak_pages == 2
        assert report.buffer_fraction == pytest.approx(config.BUFSIZE / report.mean_pages_used)

    def test_completions(self, config: SimConfig):
        env = simpy.Environment()
        collector = MetricsCollector(config, env, PageStore(config))
        for i, (kind, done) in enumerate(
            [(TransactionKind.Q1, 10.0), (TransactionKind.Q1, 30.0), (TransactionKind.U1, 20.0)]
        ):
            txn = Transaction(txn_id=i, kind=kind, t_complete=done, txn_ios=i)
            collector.record_completion(txn)
        env.run(until=2000.0)

        report = collector.report()
        assert report.completed == 3
        assert report.mean_response_ms == pytest.approx(20.0)
        assert report.response_by_kind == {"Q1": 20.0, "U1": 20.0}
        assert report.txn_ios_by_kind == {"Q1": 1, "U1": 2}
        assert report.throughput_tps == pytest.approx(1.5)
        assert report.rw_ratio == 2.0

    def test_empty_run(self, config: SimConfig):
        report = MetricsCollector(config, simpy.Environment(), PageStore(config)).report()
        assert report.completed == 0
        assert report.throughput_tps == 0.0
        assert report.mean_pages_used == 0.0
