"""Run-level performance criteria and their aggregation over replications."""

from __future__ import annotations

import math
import statistics
from collections import defaultdict
from dataclasses import asdict, dataclass, field

import simpy

from src.config import SimConfig
from src.errors import EmptyAggregateError
from src.storage.pages import PageStore
from src.workload.transactions import Transaction, TransactionKind

# scalar report fields that are averaged across replications
SUMMARY_FIELDS: tuple[str, ...] = (
    "mean_response_ms",
    "txn_ios",
    "clust_ios",
    "mean_pages_used",
    "peak_pages",
    "throughput_tps",
    "buffer_fraction",
    "rw_ratio",
)


@dataclass
class MetricsReport:
    policy: str
    seed: int
    completed: int = 0
    end_ms: float = 0.0
    mean_response_ms: float = 0.0
    response_by_kind: dict[str, float] = field(default_factory=dict)
    count_by_kind: dict[str, int] = field(default_factory=dict)
    txn_ios_by_kind: dict[str, int] = field(default_factory=dict)
    txn_reads: int = 0
    txn_writes: int = 0
    clust_reads: int = 0
    clust_writes: int = 0
    mean_pages_used: float = 0.0
    peak_pages: int = 0
    throughput_tps: float = 0.0
    buffer_fraction: float = 0.0
    rw_ratio: float = 0.0

    @property
    def txn_ios(self) -> int:
        return self.txn_reads + self.txn_writes

    @property
    def clust_ios(self) -> int:
        return self.clust_reads + self.clust_writes

    @property
    def total_ios(self) -> int:
        return self.txn_ios + self.clust_ios

    def as_dict(self) -> dict[str, object]:
        data = asdict(self)
        data["txn_ios"] = self.txn_ios
        data["clust_ios"] = self.clust_ios
        return data


class MetricsCollector:
    """Accumulates completions and samples the page count on every store change."""

    def __init__(self, config: SimConfig, clock: simpy.Environment, store: PageStore) -> None:
        self._config = config
        self._clock = clock
        self._store = store
        self._responses: dict[TransactionKind, list[float]] = defaultdict(list)
        self._txn_ios: dict[TransactionKind, int] = defaultdict(int)
        self._last_change = clock.now
        self._last_pages = store.pages_used
        self._page_area = 0.0
        self._peak_pages = store.pages_allocated
        store.subscribe(self.on_pages_changed)

    @property
    def completed(self) -> int:
        return sum(len(v) for v in self._responses.values())

    def on_pages_changed(self) -> None:
        now = self._clock.now
        self._page_area += (now - self._last_change) * self._last_pages
        self._last_change = now
        self._last_pages = self._store.pages_used
        self._peak_pages = max(self._peak_pages, self._store.pages_allocated)

    def record_completion(self, txn: Transaction) -> None:
        self._responses[txn.kind].append(txn.response_ms)
        self._txn_ios[txn.kind] += txn.txn_ios

    def report(self) -> MetricsReport:
        end = self._clock.now
        counters = self._store.counters
        area = self._page_area + (end - self._last_change) * self._last_pages
        mean_pages = area / end if end > 0 else float(self._store.pages_used)

        all_responses = [r for rs in self._responses.values() for r in rs]
        completed = len(all_responses)
        queries = sum(len(rs) for kind, rs in self._responses.items() if kind.is_query)
        updates = sum(len(rs) for kind, rs in self._responses.items() if kind.is_update)

        return MetricsReport(
            policy=str(self._config.policy),
            seed=self._config.seed,
            completed=completed,
            end_ms=end,
            mean_response_ms=statistics.fmean(all_responses) if all_responses else 0.0,
            response_by_kind={
                str(kind): statistics.fmean(rs) for kind, rs in self._responses.items() if rs
            },
            count_by_kind={str(kind): len(rs) for kind, rs in self._responses.items()},
            txn_ios_by_kind={str(kind): n for kind, n in self._txn_ios.items()},
            txn_reads=counters.txn_reads,
            txn_writes=counters.txn_writes,
            clust_reads=counters.clust_reads,
            clust_writes=counters.clust_writes,
            mean_pages_used=mean_pages,
            peak_pages=self._peak_pages,
            throughput_tps=completed / (end / 1000.0) if end > 0 else 0.0,
            buffer_fraction=self._config.BUFSIZE / mean_pages if mean_pages > 0 else 0.0,
            rw_ratio=queries / max(updates, 1),
        )


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    stddev: float
    n: int


def summarize(values: list[float]) -> MetricSummary:
    if not values:
        raise EmptyAggregateError("cannot summarize an empty list of values")
    stddev = statistics.stdev(values) if len(values) > 1 else 0.0
    return MetricSummary(statistics.fmean(values), stddev, len(values))


def aggregate(reports: list[MetricsReport]) -> dict[str, MetricSummary]:
    """Sample mean and (n-1) standard deviation of every scalar criterion."""
    if not reports:
        raise EmptyAggregateError("cannot aggregate zero reports")
    summary = {
        name: summarize([float(getattr(r, name)) for r in reports]) for name in SUMMARY_FIELDS
    }
    kinds = sorted({k for r in reports for k in r.response_by_kind})
    for kind in kinds:
        values = [r.response_by_kind[kind] for r in reports if kind in r.response_by_kind]
        summary[f"response_{kind}"] = summarize(values)
    for name, value in summary.items():
        if not (math.isfinite(value.mean) and math.isfinite(value.stddev)):
            raise ValueError(f"non-finite summary for {name}")
    return summary
