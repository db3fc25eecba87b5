from __future__ import annotations

import numpy as np
import pytest

from src.config import SimConfig
from src.errors import ConfigError
from src.model.generator import (
    VALUE_DOMAIN,
    create_instance,
    generate_database,
    generate_schema,
    uniform_around,
)
from src.model.objects import AttrImpl, Direction, ObjectGraph, RelKind


def _database(config: SimConfig, seed: int = 7) -> ObjectGraph:
    rng = np.random.default_rng(seed)
    return generate_database(generate_schema(config, rng), config.NOBJ, rng, config)


class TestGenerateSchema:
    def test_default_class_count(self, config: SimConfig, rng):
        assert len(generate_schema(config, rng)) == 20

    def test_classes_in_index_order(self, config: SimConfig, rng):
        assert [c.class_id for c in generate_schema(config, rng)] == list(range(1, 21))

    def test_zero_probabilities_give_no_links(self, rng):
        config = SimConfig(PSUPER=0, PCOMP=0, PEQUI=0)
        for cls in generate_schema(config, rng):
            assert cls.superclass is None
            assert cls.component_of is None
            assert cls.equivalent_to is None

    def test_forced_superclass(self, rng):
        classes = generate_schema(SimConfig(PSUPER=1, NCL=5), rng)
        assert classes[0].superclass is None
        for cls in classes[1:]:
            assert cls.superclass is not None
            assert 1 <= cls.superclass < cls.class_id

    def test_links_point_backwards(self, rng):
        config = SimConfig(PSUPER=1, PCOMP=1, PEQUI=1, NCL=50)
        for cls in generate_schema(config, rng):
            for link in (cls.superclass, cls.component_of, cls.equivalent_to):
                assert link is None or link < cls.class_id

    def test_attr_specs_positive(self, config: SimConfig, rng):
        for cls in generate_schema(config, rng):
            assert cls.attr_specs
            assert all(spec.size_words >= 1 for spec in cls.attr_specs)

    def test_zero_classes_rejected(self, config: SimConfig, rng):
        with pytest.raises(ConfigError):
            generate_schema(config.model_copy(update={"NCL": 0}), rng)

    def test_superclass_fraction_converges(self):
        config = SimConfig(NCL=2000, PSUPER=0.9)
        classes = generate_schema(config, np.random.default_rng(3))[1:]
        fraction = sum(c.superclass is not None for c in classes) / len(classes)
        assert fraction == pytest.approx(0.9, abs=0.05)


def test_uniform_around_mean_and_bounds(rng):
    draws = [uniform_around(rng, 3) for _ in range(5000)]
    assert set(draws) <= {1, 2, 3, 4, 5}
    assert np.mean(draws) == pytest.approx(3.0, abs=0.1)


class TestGenerateDatabase:
    def test_object_count(self, config: SimConfig):
        assert len(_database(config)) == 400

    def test_single_object_has_no_edges(self):
        graph = _database(SimConfig(NOBJ=1))
        assert len(graph) == 1
        assert graph.objects[1].edges == []

    def test_edges_symmetric_and_resolving(self, config: SimConfig):
        graph = _database(config)
        assert graph.asymmetric_edges() == []

    def test_attr_values_in_domain(self, config: SimConfig):
        graph = _database(config)
        for obj in graph.objects.values():
            assert all(0 <= a.value < VALUE_DOMAIN for a in obj.attr_values)

    def test_attrs_match_class_specs(self, config: SimConfig):
        graph = _database(config)
        for obj in graph.objects.values():
            specs = graph.class_def(obj.class_id).attr_specs
            assert [a.attr_id for a in obj.attr_values] == [s.attr_id for s in specs]

    def test_inherited_attrs_name_a_version_ancestor(self, config: SimConfig):
        graph = _database(config)
        for obj in graph.objects.values():
            ancestors = _version_ancestors(graph, obj.oid)
            for attr in obj.attr_values:
                if attr.inherited:
                    assert attr.source_oid in ancestors

    def test_mean_chain_length_near_mnver(self):
        config = SimConfig(NCL=200, NOBJ=20_000)
        graph = _database(config, seed=11)
        per_class = [
            np.mean([len(chain) for chain in chains])
            for chains in graph.chains.values()
            if chains
        ]
        assert len(per_class) >= 30
        assert 2.5 <= np.mean(per_class) <= 3.5

    def test_chain_lengths_vary_within_a_class(self):
        config = SimConfig(NCL=10, NOBJ=2_000)
        graph = _database(config, seed=3)
        varied = [
            chains
            for chains in graph.chains.values()
            if len({len(chain) for chain in chains[:-1]}) > 1
        ]
        assert varied

    def test_same_seed_same_graph(self, config: SimConfig):
        assert _database(config, seed=5) == _database(config, seed=5)

    def test_zero_objects_rejected(self, config: SimConfig, rng):
        with pytest.raises(ConfigError):
            generate_database(generate_schema(config, rng), 0, rng, config)


def _version_ancestors(graph: ObjectGraph, oid: int) -> set[int]:
    seen: set[int] = set()
    frontier = [oid]
    while frontier:
        current = frontier.pop()
        for edge in graph.objects[current].edges_of(RelKind.VERSION, Direction.REVERSE):
            if edge.target_oid not in seen:
                seen.add(edge.target_oid)
                frontier.append(edge.target_oid)
    return seen


class TestCreateInstance:
    def test_empty_class_gets_owned_attrs(self, config: SimConfig, rng):
        graph = _database(SimConfig(NOBJ=1, NCL=3))
        empty = next(c.class_id for c in graph.classes if not graph.extents[c.class_id])
        obj = create_instance(graph, empty, rng, config)
        assert all(a.impl == AttrImpl.OWNED for a in obj.attr_values)
        assert graph.chains[empty] == [[obj.oid]]

    def test_full_copy_from_latest_version(self, rng):
        config = SimConfig(p_copy=1.0)
        graph = _database(config)
        class_id = next(c for c, chains in graph.chains.items() if chains)
        obj = create_instance(graph, class_id, rng, config)

        ancestor = next(
            e.target_oid for e in obj.edges_of(RelKind.VERSION, Direction.REVERSE)
        )
        assert all(a.impl == AttrImpl.BY_COPY for a in obj.attr_values)
        assert all(a.source_oid == ancestor for a in obj.attr_values)
        assert any(ancestor == chain[-2] for chain in graph.chains[class_id] if len(chain) > 1)

    def test_copy_fraction_follows_p_copy(self):
        config = SimConfig(p_copy=0.5, NCL=4, NOBJ=40)
        graph = _database(config)
        rng = np.random.default_rng(99)
        copies = total = 0
        for _ in range(1000):
            class_id = int(rng.integers(1, 5))
            obj = create_instance(graph, class_id, rng, config)
            for attr in obj.attr_values:
                if attr.inherited:
                    total += 1
                    copies += attr.impl == AttrImpl.BY_COPY
        assert copies / total == pytest.approx(0.5, abs=0.05)

    def test_creation_keeps_edges_symmetric(self, config: SimConfig, rng):
        graph = _database(config)
        for class_id in range(1, 21):
            create_instance(graph, class_id, rng, config)
        assert graph.asymmetric_edges() == []
        assert len(graph) == 420
