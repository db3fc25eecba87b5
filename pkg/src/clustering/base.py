from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar

import structlog

from src.config import PolicyName, SimConfig
from src.errors import PageFullError
from src.model.objects import ObjectGraph, ObjectInstance
from src.storage.disk import IoCause, Stopwatch, Timer
from src.storage.pages import PageStore
from src.workload.resolver import AccessPlan, record_access

logger = structlog.get_logger()


class ClusteringPolicy(ABC):
    """Abstract base class for the clustering managers.

    Subclasses implement `load` (initial placement), `place_instance` (where a
    new object goes) and `on_recluster` (a full reorganization). After any call
    every object resides on exactly one page.
    """

    name: ClassVar[PolicyName]
    reorganizes: ClassVar[bool] = True  # False: CLUST transactions are no-ops

    def __init__(self, config: SimConfig) -> None:
        self._config = config

    def initial_load(self, graph: ObjectGraph, store: PageStore) -> None:
        """Place the generated database, then start cold (empty buffer, zero I/O)."""
        self.load(graph, store, Stopwatch())
        store.reset_io()
        logger.info(
            "initial_load_done",
            policy=self.name,
            objects=len(graph),
            pages_used=store.pages_used,
        )

    @abstractmethod
    def load(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None: ...

    def on_instance_created(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> int:
        """Place a newly created object and re-account the partners whose edges it grew."""
        page_id = self.place_instance(graph, store, obj, clock)
        partners = dict.fromkeys(e.target_oid for e in obj.edges)
        for oid in partners:
            self._accommodate(graph, store, graph.objects[oid], clock)
        return page_id

    @abstractmethod
    def place_instance(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> int:
        """Choose a page for *obj*, bring it in and store the object there."""

    @abstractmethod
    def on_recluster(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None: ...

    def observe_access(self, graph: ObjectGraph, plan: AccessPlan) -> None:
        """Usage statistics feed: object access counts and relationship crossings."""
        record_access(graph, plan)

    def _put(
        self,
        store: PageStore,
        obj: ObjectInstance,
        page_id: int,
        clock: Timer,
        fresh: bool = False,
    ) -> None:
        if fresh:
            store.install_page(page_id, IoCause.TRANSACTION, clock)
        else:
            store.fetch_page(page_id, IoCause.TRANSACTION, clock)
        store.place_object(obj, page_id)

    def _accommodate(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> None:
        page_id = store.lookup_page(obj.oid, clock)
        store.fetch_page(page_id, IoCause.TRANSACTION, clock)
        try:
            store.refresh(obj)
        except PageFullError:
            logger.debug("object_relocated", policy=self.name, oid=obj.oid, page=page_id)
            self.place_instance(graph, store, obj, clock)
