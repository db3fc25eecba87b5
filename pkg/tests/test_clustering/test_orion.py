from __future__ import annotations

import pytest

from src.clustering.orion import OrionPolicy
from src.config import OrionConfig, OrionReclusterMode, SimConfig
from src.errors import ClusterConflictError
from src.model.objects import ObjectGraph
from src.storage.disk import Stopwatch
from src.storage.pages import PageStore
from tests.conftest import make_graph, make_object


def _setup(
    n_objects: int = 0, n_classes: int = 1, **orion: object
) -> tuple[ObjectGraph, PageStore, OrionPolicy]:
    config = SimConfig(orion=OrionConfig(**orion))
    graph = make_graph(n_objects, n_classes=n_classes)
    store = PageStore(config)
    policy = OrionPolicy(config)
    policy.initial_load(graph, store)
    return graph, store, policy


def _create(graph: ObjectGraph, store: PageStore, policy: OrionPolicy, class_id: int) -> int:
    obj = make_object(graph.new_oid(), class_id)
    graph.add_object(obj)
    return policy.place_instance(graph, store, obj, Stopwatch())


class TestPlacement:
    def test_same_class_shares_a_page(self):
        graph, store, policy = _setup(n_classes=2)
        assert _create(graph, store, policy, 1) == _create(graph, store, policy, 1)

    def test_classes_get_distinct_segments(self):
        graph, store, policy = _setup(n_classes=2)
        first = _create(graph, store, policy, 1)
        second = _create(graph, store, policy, 2)
        assert first != second
        assert store.pages[first].segment_id != store.pages[second].segment_id

    def test_forty_third_object_opens_second_page(self):
        graph, store, policy = _setup()
        # 42 objects of 48 bytes fill 2016 of 2048 bytes
        pages = [_create(graph, store, policy, 1) for _ in range(43)]
        assert len(set(pages[:42])) == 1
        assert pages[42] != pages[0]
        assert store.segment_of_class(1).pages == [pages[0], pages[42]]

    def test_initial_load_honours_configured_messages(self):
        graph, store, _ = _setup(20, n_classes=2, cluster_messages=[[1, 2]])
        assert {store.page_of(oid) for oid in graph.objects} == {1}


class TestClusterMessage:
    def test_single_class_is_a_no_op(self):
        graph, store, policy = _setup(4, n_classes=2)
        before = store.segment_of_class(1)
        assert policy.cluster_message(store, [1]) is before
        assert policy.cluster_message(store, [1, 1]) is before

    def test_class_cannot_join_second_multi_class_segment(self):
        _, store, policy = _setup(6, n_classes=3)
        policy.cluster_message(store, [1, 2])
        with pytest.raises(ClusterConflictError):
            policy.cluster_message(store, [2, 3])

    def test_new_instances_follow_the_merged_segment(self):
        graph, store, policy = _setup(4, n_classes=2)
        segment = policy.cluster_message(store, [1, 2])
        page = _create(graph, store, policy, 2)
        assert page in segment.pages
        assert _create(graph, store, policy, 1) == page

    def test_existing_objects_stay_until_reorganization(self):
        graph, store, policy = _setup(4, n_classes=2)
        layout = {oid: store.page_of(oid) for oid in graph.objects}
        policy.cluster_message(store, [1, 2])
        assert {oid: store.page_of(oid) for oid in graph.objects} == layout


class TestRecluster:
    def test_sparse_class_repacks_to_one_page(self):
        config = SimConfig()
        graph = make_graph(42)
        store = PageStore(config)
        policy = OrionPolicy(config)
        segment = policy.segment_for(store, 1)
        for oid in graph.objects:
            store.place_object(graph.objects[oid], store.allocate_page(segment.segment_id))
        store.reset_io()

        policy.on_recluster(graph, store, Stopwatch())

        assert store.pages_used == 1
        assert store.pages_allocated == 1
        assert store.counters.clust_reads == 42
        assert store.counters.clust_writes == 1

    def test_each_old_page_is_read_once_across_segments(self):
        config = SimConfig(BUFSIZE=10)
        graph = make_graph(48, n_classes=4)
        store = PageStore(config)
        policy = OrionPolicy(config)
        for oid in graph.objects:
            segment = policy.segment_for(store, graph.objects[oid].class_id)
            store.place_object(graph.objects[oid], store.allocate_page(segment.segment_id))
        old_pages = store.page_ids()
        store.reset_io()

        policy.on_recluster(graph, store, Stopwatch())

        assert len(old_pages) > config.BUFSIZE
        assert store.counters.clust_reads == len(old_pages)
        assert store.counters.clust_writes == 4
        assert store.pages_used == 4

    def test_dense_layout_keeps_page_count(self):
        graph, store, policy = _setup(100, n_classes=4)
        before = store.pages_used
        policy.on_recluster(graph, store, Stopwatch())
        assert store.pages_used == before
        assert sorted(store.placed_oids()) == sorted(graph.objects)

    def test_merged_classes_become_co_resident(self):
        graph, store, policy = _setup(20, n_classes=2)
        assert len({store.page_of(oid) for oid in graph.objects}) == 2

        policy.cluster_message(store, [1, 2])
        policy.on_recluster(graph, store, Stopwatch())

        assert len({store.page_of(oid) for oid in graph.objects}) == 1
        assert store.pages_used == 1

    def test_messages_only_leaves_other_segments_alone(self):
        graph, store, policy = _setup(
            30, n_classes=3, recluster_mode=OrionReclusterMode.MESSAGES_ONLY
        )
        untouched = {oid: store.page_of(oid) for oid in graph.extents[3]}

        policy.cluster_message(store, [1, 2])
        policy.on_recluster(graph, store, Stopwatch())

        assert {oid: store.page_of(oid) for oid in graph.extents[3]} == untouched
        merged = {store.page_of(oid) for oid in graph.extents[1] + graph.extents[2]}
        assert len(merged) == 1
        assert merged.isdisjoint(untouched.values())

    def test_messages_only_without_pending_messages_moves_nothing(self):
        graph, store, policy = _setup(
            30, n_classes=3, recluster_mode=OrionReclusterMode.MESSAGES_ONLY
        )
        layout = {oid: store.page_of(oid) for oid in graph.objects}
        policy.on_recluster(graph, store, Stopwatch())
        assert {oid: store.page_of(oid) for oid in graph.objects} == layout
        assert store.counters.clust_total == 0
