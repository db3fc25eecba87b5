"""Cost-model placement of a single new object.

Every page that holds an object related to the target is a candidate. Its
cost weighs, by the inverse access probability of the strongest relationship
anchoring it, the directory lookups the target would need for inherited data
stored elsewhere, plus the storage of copied data. Two variants are costed
per page: variant 1 turns copied attributes into references, variant 2 keeps
the copies.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import structlog

from src.clustering.base import ClusteringPolicy
from src.config import PolicyName, SimConfig, SplitPolicy
from src.model.objects import (
    AttrImpl,
    AttrValue,
    ObjectGraph,
    ObjectInstance,
    RelKind,
    object_size_bytes,
)
from src.storage.disk import IoCause, Timer
from src.storage.pages import PageStore

logger = structlog.get_logger()

VARIANTS = (1, 2)


@dataclass
class CkCostTable:
    lookup_cost: float
    storage_cost: float
    weight: dict[int, float] = field(default_factory=dict)
    ref_lookup: dict[int, float] = field(default_factory=lambda: defaultdict(float))
    copy_lookup: dict[int, float] = field(default_factory=lambda: defaultdict(float))
    copy_storage: dict[int, float] = field(default_factory=lambda: defaultdict(float))

    @property
    def page_set(self) -> list[int]:
        return sorted(self.weight)

    def total(self, page_id: int, variant: int) -> float:
        lookups = self.ref_lookup[page_id]
        if variant == 1:
            lookups += self.copy_lookup[page_id]
            return self.lookup_cost * lookups
        return self.lookup_cost * lookups + self.storage_cost * self.copy_storage[page_id]

    def ranking(self) -> list[tuple[float, int, int]]:
        """(cost, page, variant) ascending; ties go to the lower page id, then variant 1."""
        return sorted(
            (self.total(page_id, variant), page_id, variant)
            for page_id in self.page_set
            for variant in VARIANTS
        )


def _page(store: PageStore, oid: int | None, clock: Timer | None) -> int | None:
    if oid is None or store.page_of(oid) is None:
        return None
    if clock is None:
        return store.page_of(oid)
    return store.lookup_page(oid, clock)


def ck_cost_table(
    graph: ObjectGraph,
    store: PageStore,
    target: ObjectInstance,
    config: SimConfig,
    clock: Timer | None = None,
) -> CkCostTable:
    """Build the cost table for *target*; directory lookups are charged to *clock*."""
    copy_set = [a for a in target.attr_values if a.impl == AttrImpl.BY_COPY]
    ref_set = [a for a in target.attr_values if a.impl == AttrImpl.BY_REFERENCE]
    source_page = {id(a): _page(store, a.source_oid, clock) for a in copy_set + ref_set}

    # strongest relationship anchoring each candidate page; inherited sources count as versions
    anchor: dict[int, float] = {}
    for page_id in source_page.values():
        if page_id is not None:
            prob = graph.access_probs[RelKind.VERSION]
            anchor[page_id] = max(anchor.get(page_id, 0.0), prob)
    for edge in target.edges:
        page_id = _page(store, edge.target_oid, clock)
        if page_id is not None:
            anchor[page_id] = max(anchor.get(page_id, 0.0), edge.access_prob)

    table = CkCostTable(lookup_cost=config.ck.lookup_cost, storage_cost=config.ck_storage_cost())
    for page_id, prob in anchor.items():
        if prob <= 0:
            continue
        weight = 1.0 / prob
        table.weight[page_id] = weight
        table.ref_lookup[page_id] += sum(weight for a in ref_set if source_page[id(a)] != page_id)
        for attr in copy_set:
            if source_page[id(attr)] != page_id:
                table.copy_lookup[page_id] += weight
                table.copy_storage[page_id] += attr.size_words * config.WDSIZE
    return table


def _apply_variant(
    target: ObjectInstance, originals: list[tuple[AttrValue, AttrImpl]], variant: int
) -> None:
    for attr, impl in originals:
        attr.impl = AttrImpl.BY_REFERENCE if variant == 1 and impl == AttrImpl.BY_COPY else impl


def split_page(graph: ObjectGraph, store: PageStore, page_id: int, clock: Timer) -> int:
    """Move the larger half (by bytes) of *page_id*'s residents to a fresh page."""
    residents = list(store.pages[page_id].residents)
    total = sum(store.size_of(oid) for oid in residents)
    running = 0
    cut = 0
    while cut < len(residents) and running < total / 2:
        running += store.size_of(residents[cut])
        cut += 1
    first, second = residents[:cut], residents[cut:]
    first_bytes = sum(store.size_of(oid) for oid in first)
    movers = first if first_bytes > total - first_bytes else second

    new_page = store.allocate_page()
    store.install_page(new_page, IoCause.TRANSACTION, clock)
    for oid in movers:
        store.place_object(graph.objects[oid], new_page)
    store.write_page(new_page, IoCause.CLUSTERING, clock)
    logger.debug("ck_page_split", page=page_id, new_page=new_page, moved=len(movers))
    return new_page


def _commit(
    store: PageStore, target: ObjectInstance, page_id: int, fresh: bool, clock: Timer
) -> None:
    if fresh:
        store.install_page(page_id, IoCause.TRANSACTION, clock)
    else:
        store.fetch_page(page_id, IoCause.TRANSACTION, clock)
    store.place_object(target, page_id)
    store.write_page(page_id, IoCause.CLUSTERING, clock)


def ck_cluster_object(
    graph: ObjectGraph,
    store: PageStore,
    target: ObjectInstance,
    config: SimConfig,
    clock: Timer,
) -> int:
    """Place *target* on the cheapest candidate page and return that page."""
    table = ck_cost_table(graph, store, target, config, clock)

    if not table.page_set:
        page_id = store.least_filled_page(object_size_bytes(target, config))
        fresh = page_id is None
        if page_id is None:
            page_id = store.allocate_page()
        _commit(store, target, page_id, fresh, clock)
        return page_id

    originals = [(a, a.impl) for a in target.attr_values]
    ranking = table.ranking()
    _, best_page, best_variant = ranking[0]

    if config.ck.cluster_policy == SplitPolicy.NO_SPLIT:
        for _, page_id, variant in ranking:
            _apply_variant(target, originals, variant)
            if store.fits(target, page_id):
                _commit(store, target, page_id, False, clock)
                return page_id
        _apply_variant(target, originals, best_variant)
        page_id = store.allocate_page()
        _commit(store, target, page_id, True, clock)
        return page_id

    _apply_variant(target, originals, best_variant)
    store.fetch_page(best_page, IoCause.TRANSACTION, clock)
    if store.fits(target, best_page):
        page_id = best_page
    elif 2 * object_size_bytes(target, config) > config.PGSIZE:
        # the half left behind cannot make room; one fresh page, no split
        page_id = store.allocate_page()
        store.install_page(page_id, IoCause.TRANSACTION, clock)
    else:
        split = split_page(graph, store, best_page, clock)
        page_id = best_page if store.fits(target, best_page) else split
    store.place_object(target, page_id)
    store.write_page(page_id, IoCause.CLUSTERING, clock)
    return page_id


class CkPolicy(ClusteringPolicy):
    name = PolicyName.CK
    reorganizes = False

    def load(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        for oid in sorted(graph.objects):
            ck_cluster_object(graph, store, graph.objects[oid], self._config, clock)

    def place_instance(
        self, graph: ObjectGraph, store: PageStore, obj: ObjectInstance, clock: Timer
    ) -> int:
        return ck_cluster_object(graph, store, obj, self._config, clock)

    def on_recluster(self, graph: ObjectGraph, store: PageStore, clock: Timer) -> None:
        logger.debug("ck_recluster_skipped")
