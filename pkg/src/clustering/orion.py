"""Class-segment clustering driven by explicit Cluster messages.

Each class lives in a segment; by default a class has a segment of its own.
A Cluster message merges several classes into one fresh segment. The pages
already written are left alone until the next reorganization, which scans
every old page once and repacks each segment class by class in oid order.
"""

from __future__ import annotations

import structlog

from src.clustering.base import ClusteringPolicy
from src.config import OrionReclusterMode, PolicyName, SimConfig
from src.errors import ClusterConflictError
from src.model.objects import ObjectGraph, ObjectInstance
from src.storage.disk import IoCause, Timer
from src.storage.pages import PageStore, Segment

logger = structlog.get_logger()


class OrionPolicy(ClusteringPolicy):
    name = PolicyName.ORION

    def __init__(self, config: SimConfig) -> None:
        super().__init__(config)
        self._pending: set[int] = set()  # segments created since the last reorganization

    def load(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        for classes in self._config.orion.cluster_messages:
            self.cluster_message(store, classes)
        for oid in sorted(graph.objects):
            obj = graph.objects[oid]
            page_id, _ = self._first_fit(store, obj)
            store.place_object(obj, page_id)
        self._pending.clear()

    def segment_for(self, store: PageStore, class_id: int) -> Segment:
        segment = store.segment_of_class(class_id)
        if segment is None:
            segment = store.create_segment([class_id])
        return segment

    def _first_fit(self, store: PageStore, obj: ObjectInstance) -> tuple[int, bool]:
        segment = self.segment_for(store, obj.class_id)
        for page_id in segment.pages:
            if store.fits(obj, page_id):
                return page_id, False
        return store.allocate_page(segment.segment_id), True

    def place_instance(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> int:
        """First page of the class's segment with room, else a new page in that segment."""
        page_id, fresh = self._first_fit(store, obj)
        self._put(store, obj, page_id, clock, fresh=fresh)
        return page_id

    def cluster_message(self, store: PageStore, classes: list[int]) -> Segment:
        """Place *classes* together in a new segment.

        A class that already shares a segment with other classes cannot join a
        second multi-class segment. Existing objects do not move until the
        next reorganization.
        """
        members = list(dict.fromkeys(classes))
        if len(members) <= 1:
            return self.segment_for(store, members[0]) if members else store.create_segment([])

        for class_id in members:
            current = store.segment_of_class(class_id)
            if current is not None and len(current.member_classes) > 1:
                raise ClusterConflictError(
                    f"class {class_id} already shares segment {current.segment_id} "
                    f"with classes {sorted(current.member_classes - {class_id})}"
                )

        segment = store.create_segment(members)
        self._pending.add(segment.segment_id)
        logger.info("orion_cluster_message", classes=members, segment=segment.segment_id)
        return segment

    def on_recluster(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        mode = self._config.orion.recluster_mode
        old_pages = store.page_ids()
        targets = [
            store.segments[sid]
            for sid in sorted(store.segments)
            if store.segments[sid].member_classes
        ]
        if mode == OrionReclusterMode.MESSAGES_ONLY:
            targets = [s for s in targets if s.segment_id in self._pending]

        found = self._scan(graph, store, old_pages, targets, clock) if targets else {}
        for segment in targets:
            if mode == OrionReclusterMode.REPACK:
                self._repack(graph, store, segment, found[segment.segment_id], clock)
            else:
                self._migrate(graph, store, segment, found[segment.segment_id], clock)

        for page_id in old_pages:
            if page_id in store.pages and not store.pages[page_id].residents:
                store.free_page(page_id)
        for segment_id in sorted(store.segments):
            segment = store.segments[segment_id]
            if not segment.member_classes and not segment.pages:
                store.drop_segment(segment_id)

        logger.info(
            "orion_reclustered",
            mode=mode,
            segments=len(targets),
            pages_before=len(old_pages),
            pages_after=store.pages_used,
        )
        self._pending.clear()

    def _scan(
        self,
        graph: ObjectGraph,
        store: PageStore,
        old_pages: list[int],
        targets: list[Segment],
        clock: Timer,
    ) -> dict[int, list[int]]:
        """Read every old page once and bucket its residents by target segment."""
        owner = {
            class_id: segment.segment_id
            for segment in targets
            for class_id in segment.member_classes
        }
        found: dict[int, list[int]] = {segment.segment_id: [] for segment in targets}
        for page_id in old_pages:
            if page_id not in store.pages:
                continue
            store.fetch_page(page_id, IoCause.CLUSTERING, clock)
            for oid in store.pages[page_id].residents:
                segment_id = owner.get(graph.objects[oid].class_id)
                if segment_id is not None:
                    found[segment_id].append(oid)
        return found

    def _repack(
        self,
        graph: ObjectGraph,
        store: PageStore,
        segment: Segment,
        found: list[int],
        clock: Timer,
    ) -> None:
        ordered = sorted(found, key=lambda oid: (graph.objects[oid].class_id, oid))
        current: int | None = None
        for oid in ordered:
            obj = graph.objects[oid]
            if current is None or not store.fits(obj, current):
                if current is not None:
                    store.write_page(current, IoCause.CLUSTERING, clock)
                current = store.allocate_page(segment.segment_id)
            store.place_object(obj, current)
        if current is not None:
            store.write_page(current, IoCause.CLUSTERING, clock)

    def _migrate(
        self,
        graph: ObjectGraph,
        store: PageStore,
        segment: Segment,
        found: list[int],
        clock: Timer,
    ) -> None:
        touched: list[int] = []
        for oid in sorted(found):
            if store.page_of(oid) in segment.pages:
                continue
            obj = graph.objects[oid]
            page_id, _ = self._first_fit(store, obj)
            store.place_object(obj, page_id)
            if page_id not in touched:
                touched.append(page_id)
        for page_id in touched:
            store.write_page(page_id, IoCause.CLUSTERING, clock)
