"""Discrete-event run of one policy over one generated database.

Runs on a simpy environment. Transactions arrive as a single exponential
renewal stream and queue first come first served for one of MULTI service
slots. Service is a sequence of steps (transaction set-up, one step per
object access, object creation); the state changes of a step happen when it
starts and its device time elapses before the next step begins. A reorganization
closes admission, waits for the transactions in service to finish, and then
runs alone.
"""

from __future__ import annotations

from collections.abc import Generator, Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
import simpy
import structlog

from src.clustering import ClusteringPolicy, make_policy
from src.config import SimConfig, settings
from src.engine.events import Event, EventKind
from src.model.generator import VALUE_DOMAIN, create_instance, generate_database, generate_schema
from src.model.objects import AttrImpl, ObjectGraph
from src.storage.disk import IoCause, Stopwatch
from src.storage.pages import PageStore
from src.utils.metrics import MetricsCollector, MetricsReport
from src.workload.resolver import AccessMode, PlanEntry, resolve_targets
from src.workload.transactions import (
    Transaction,
    TransactionKind,
    draw_transaction,
    normalized_weights,
)

logger = structlog.get_logger()

STREAM_NAMES = ("schema", "database", "arrivals", "workload", "service")


@dataclass(frozen=True)
class Streams:
    schema: np.random.Generator
    database: np.random.Generator
    arrivals: np.random.Generator
    workload: np.random.Generator
    service: np.random.Generator


def derive_streams(seed: int) -> Streams:
    """Independent generators per concern, so changing one input leaves the others' draws intact."""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return Streams(*(np.random.default_rng(child) for child in children))


@contextmanager
def _metered(txn: Transaction, store: PageStore) -> Iterator[Stopwatch]:
    counters = store.counters
    txn_before, clust_before = counters.txn_total, counters.clust_total
    watch = Stopwatch()
    yield watch
    txn.txn_ios += counters.txn_total - txn_before
    txn.clust_ios += counters.clust_total - clust_before


def _access(
    entry: PlanEntry,
    txn: Transaction,
    graph: ObjectGraph,
    store: PageStore,
    config: SimConfig,
    rng: np.random.Generator,
    watch: Stopwatch,
) -> None:
    obj = graph.objects[entry.oid]
    page_id = store.lookup_page(entry.oid, watch)
    store.fetch_page(page_id, IoCause.TRANSACTION, watch)

    if entry.mode == AccessMode.WRITE:
        attr = obj.attr_values[txn.attr_index or 0]
        attr.value = int(rng.integers(VALUE_DOMAIN))
        watch.advance(config.ACCM * attr.size_words)
        store.mark_dirty(page_id)
        return

    watch.advance(config.ACCM * obj.value_words)
    # values inherited by reference are read where they are physically held
    remote: set[int] = set()
    for attr in obj.attr_values:
        if attr.impl != AttrImpl.BY_REFERENCE or attr.source_oid is None:
            continue
        source_page = store.lookup_page(attr.source_oid, watch)
        if source_page != page_id and source_page not in remote:
            remote.add(source_page)
            store.fetch_page(source_page, IoCause.TRANSACTION, watch)


def execute_transaction(
    txn: Transaction,
    graph: ObjectGraph,
    store: PageStore,
    policy: ClusteringPolicy,
    config: SimConfig,
    rng: np.random.Generator,
) -> Generator[float, None, None]:
    """Perform *txn* step by step, yielding the device time of each step."""
    with _metered(txn, store) as watch:
        watch.advance(config.CCT)
    yield watch.elapsed_ms

    if txn.kind == TransactionKind.U2:
        with _metered(txn, store) as watch:
            obj = create_instance(graph, txn.class_id, rng, config)
            policy.on_instance_created(graph, store, obj, watch)
        yield watch.elapsed_ms
        return

    plan = resolve_targets(txn, graph, rng, record=False)
    policy.observe_access(graph, plan)
    for entry in plan:
        with _metered(txn, store) as watch:
            _access(entry, txn, graph, store, config, rng, watch)
        yield watch.elapsed_ms


@dataclass
class _Reorganization:
    done: simpy.Event
    waiters: list[Transaction] = field(default_factory=list)
    running: bool = False


class Simulator:
    def __init__(self, config: SimConfig, trace: bool = False) -> None:
        self.config = config
        streams = derive_streams(config.seed)
        self._streams = streams

        schema = generate_schema(config, streams.schema)
        self.graph = generate_database(schema, config.NOBJ, streams.database, config)
        self.store = PageStore(config)
        self.policy = make_policy(config)
        self.policy.initial_load(self.graph, self.store)

        self.env = simpy.Environment()
        self.slots = simpy.Resource(self.env, capacity=config.MULTI)
        self.metrics = MetricsCollector(config, self.env, self.store)
        self.trace: list[Event] | None = [] if trace else None

        self._probabilities = normalized_weights(config) if config.horizon_transactions else None
        self._in_service = 0
        self._reorganization: _Reorganization | None = None
        self._progress_every = max(1, config.horizon_transactions // 10)

    @property
    def admission_open(self) -> bool:
        return self._reorganization is None

    @property
    def in_service(self) -> int:
        return self._in_service

    @property
    def recluster_waiters(self) -> list[Transaction]:
        return [] if self._reorganization is None else list(self._reorganization.waiters)

    def run(self) -> MetricsReport:
        config = self.config
        logger.info(
            "simulation_started",
            policy=config.policy,
            seed=config.seed,
            nobj=config.NOBJ,
            bufsize=config.BUFSIZE,
            horizon=config.horizon_transactions,
        )
        if config.horizon_transactions > 0:
            self.env.process(self._arrivals())
        self.env.run()

        report = self.metrics.report()
        logger.info(
            "run_finished",
            policy=report.policy,
            seed=report.seed,
            completed=report.completed,
            mean_response_ms=round(report.mean_response_ms, 3),
            txn_ios=report.txn_ios,
            clust_ios=report.clust_ios,
            pages_used=round(report.mean_pages_used, 1),
            throughput_tps=round(report.throughput_tps, 4),
        )
        return report

    def submit(self, txn: Transaction) -> simpy.Process:
        """Hand *txn* to the admission queue at the current simulated time."""
        txn.t_submit = self.env.now
        self._record(EventKind.ARRIVAL, txn)
        return self.env.process(self._serve(txn))

    def _record(self, kind: EventKind, txn: Transaction | None = None) -> None:
        if self.trace is not None:
            self.trace.append(Event(self.env.now, kind, txn))

    # -- arrivals and service ----------------------------------------------

    def _arrivals(self) -> Generator[simpy.Event, None, None]:
        for txn_id in range(1, self.config.horizon_transactions + 1):
            yield self.env.timeout(float(self._streams.arrivals.exponential(self.config.minter_ms)))
            txn = draw_transaction(
                self.config,
                self._streams.workload,
                self.graph,
                txn_id=txn_id,
                probabilities=self._probabilities,
            )
            self.submit(txn)

    def _serve(self, txn: Transaction) -> Generator[simpy.Event, None, None]:
        with self.slots.request() as slot:
            yield slot
            # admission stays closed until a pending reorganization has ended
            while self._reorganization is not None:
                yield self._reorganization.done

            txn.t_start = self.env.now
            self._in_service += 1
            steps = execute_transaction(
                txn, self.graph, self.store, self.policy, self.config, self._streams.service
            )
            for duration in steps:
                if settings.debug_mode:
                    logger.debug(
                        "txn_step",
                        txn_id=txn.txn_id,
                        kind=txn.kind,
                        at_ms=round(self.env.now, 4),
                        duration_ms=round(duration, 4),
                    )
                yield self.env.timeout(duration)

            if txn.kind == TransactionKind.CLUST and self.policy.reorganizes:
                yield self._request_reorganization(txn)
            self._finish(txn)

    def _finish(self, txn: Transaction) -> None:
        txn.t_complete = self.env.now
        self._in_service -= 1
        self.metrics.record_completion(txn)
        self._record(EventKind.TXN_COMPLETE, txn)

        horizon = self.config.horizon_transactions
        completed = self.metrics.completed
        if horizon and completed % self._progress_every == 0:
            logger.info(
                "progress",
                policy=self.config.policy,
                completed=completed,
                pct=round(100 * completed / horizon),
                sim_time_s=round(self.env.now / 1000, 1),
            )
        self._maybe_reorganize()

    # -- exclusive reorganization ------------------------------------------

    def _request_reorganization(self, txn: Transaction) -> simpy.Event:
        # concurrent requests are served by one reorganization
        if self._reorganization is None:
            self._reorganization = _Reorganization(self.env.event())
        pending = self._reorganization
        pending.waiters.append(txn)
        self._maybe_reorganize()
        return pending.done

    def _maybe_reorganize(self) -> None:
        pending = self._reorganization
        if pending is None or pending.running:
            return
        if self._in_service == len(pending.waiters):
            pending.running = True
            self.env.process(self._reorganize(pending))

    def _reorganize(self, pending: _Reorganization) -> Generator[simpy.Event, None, None]:
        self._record(EventKind.RECLUSTER_BEGIN)
        with _metered(pending.waiters[0], self.store) as watch:
            recluster_exclusive(self.policy, self.graph, self.store, watch)
        yield self.env.timeout(watch.elapsed_ms)
        self._record(EventKind.RECLUSTER_END)
        self._reorganization = None
        pending.done.succeed()


def recluster_exclusive(
    policy: ClusteringPolicy, graph: ObjectGraph, store: PageStore, watch: Stopwatch
) -> None:
    """Run a full reorganization; the caller guarantees nothing else is in service."""
    before = store.counters.clust_total
    policy.on_recluster(graph, store, watch)
    logger.info(
        "recluster_finished",
        policy=policy.name,
        clust_ios=store.counters.clust_total - before,
        duration_ms=round(watch.elapsed_ms, 3),
        pages_used=store.pages_used,
    )


def run_simulation(config: SimConfig) -> MetricsReport:
    return Simulator(config).run()
