"""Usage-driven greedy packing.

The most referenced unassigned object seeds a new block; the block then grows
along the most used relationship that leads out of it to an unassigned object,
until the chosen object does not fit or no such relationship is left. Ties go
to the smallest oid.
"""

from __future__ import annotations

from collections.abc import Callable, Collection

import structlog

from src.clustering.base import ClusteringPolicy
from src.config import PolicyName, SimConfig
from src.model.objects import ObjectGraph, ObjectInstance, object_size_bytes
from src.storage.disk import IoCause, Timer
from src.storage.pages import PageStore

logger = structlog.get_logger()


def _best_relationship(
    graph: ObjectGraph, block: list[int], unassigned: Collection[int]
) -> int | None:
    """Target of the most used relationship from *block* to an unassigned object."""
    best_key: tuple[int, int] | None = None
    for member in block:
        for edge in graph.objects[member].edges:
            if edge.target_oid not in unassigned:
                continue
            key = (-graph.relationship_usage(member, edge), edge.target_oid)
            if best_key is None or key < best_key:
                best_key = key
    return None if best_key is None else best_key[1]


def cactis_blocks(
    graph: ObjectGraph, capacity_bytes: int, size_of: Callable[[int], int]
) -> list[list[int]]:
    """Pack every object of *graph* into blocks of at most *capacity_bytes*."""
    order = sorted(graph.objects, key=lambda oid: (-graph.objects[oid].access_count, oid))
    unassigned = set(graph.objects)
    blocks: list[list[int]] = []

    for seed in order:
        if seed not in unassigned:
            continue
        unassigned.discard(seed)
        block = [seed]
        used = size_of(seed)
        while True:
            target = _best_relationship(graph, block, unassigned)
            if target is None:
                break
            size = size_of(target)
            if used + size > capacity_bytes:
                break
            block.append(target)
            unassigned.discard(target)
            used += size
        blocks.append(block)
    return blocks


class CactisPolicy(ClusteringPolicy):
    name = PolicyName.CACTIS

    def __init__(self, config: SimConfig) -> None:
        super().__init__(config)
        self._tail_page: int | None = None

    def load(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        self._reorganize(graph, store, clock, charge=False)

    def on_recluster(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        self._reorganize(graph, store, clock, charge=True)

    def place_instance(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> int:
        # between reorganizations new objects are appended to the newest page
        tail = self._tail_page
        if tail is not None and tail in store.pages and store.fits(obj, tail):
            self._put(store, obj, tail, clock)
            return tail
        page_id = store.allocate_page()
        self._put(store, obj, page_id, clock, fresh=True)
        self._tail_page = page_id
        return page_id

    def _reorganize(
        self, graph: ObjectGraph, store: PageStore, clock: Timer, charge: bool
    ) -> None:
        config = self._config
        blocks = cactis_blocks(
            graph,
            config.PGSIZE,
            lambda oid: object_size_bytes(graph.objects[oid], config),
        )
        old_pages = store.page_ids()

        # the new page set is built completely before the old one is released
        for block in blocks:
            new_page = store.allocate_page()
            for oid in block:
                if charge:
                    old_page = store.lookup_page(oid, clock)
                    store.fetch_page(old_page, IoCause.CLUSTERING, clock)
                store.place_object(graph.objects[oid], new_page)
            if charge:
                store.write_page(new_page, IoCause.CLUSTERING, clock)
            self._tail_page = new_page

        for page_id in old_pages:
            store.free_page(page_id)

        logger.info(
            "cactis_reorganized",
            blocks=len(blocks),
            pages_before=len(old_pages),
            pages_after=store.pages_used,
        )
