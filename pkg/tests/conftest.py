from __future__ import annotations

import os

import numpy as np
import pytest

# Keep runtime settings independent of a developer's .env file
os.environ.setdefault("ENV_FILE", "tests/.env.test")

from src.config import SimConfig  # noqa: E402
from src.model.objects import (  # noqa: E402
    AttrImpl,
    AttrSpec,
    AttrValue,
    ClassDef,
    ObjectGraph,
    ObjectInstance,
)
from src.storage.pages import PageStore  # noqa: E402


@pytest.fixture
def config() -> SimConfig:
    return SimConfig()


@pytest.fixture
def small_config() -> SimConfig:
    """A database small enough for end-to-end runs in well under a second."""
    return SimConfig(NOBJ=60, NCL=5, horizon_transactions=120, MINTER=0.5, replications=2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def store(config: SimConfig) -> PageStore:
    return PageStore(config)


def make_object(
    oid: int,
    class_id: int = 1,
    n_attrs: int = 10,
    impl: AttrImpl = AttrImpl.OWNED,
    source_oid: int | None = None,
) -> ObjectInstance:
    """Object with *n_attrs* one-word attributes (48 bytes with defaults, no edges)."""
    attrs = [
        AttrValue(attr_id=i, value=i, size_words=1, impl=impl, source_oid=source_oid)
        for i in range(n_attrs)
    ]
    return ObjectInstance(oid=oid, class_id=class_id, attr_values=attrs)


def make_graph(n_objects: int, n_classes: int = 1, n_attrs: int = 10) -> ObjectGraph:
    """Hand-built graph: objects 1..n assigned round-robin to classes 1..n_classes, no edges."""
    classes = [
        ClassDef(class_id=c, attr_specs=[AttrSpec(i, 1) for i in range(n_attrs)])
        for c in range(1, n_classes + 1)
    ]
    graph = ObjectGraph(classes=classes)
    for oid in range(1, n_objects + 1):
        class_id = (oid - 1) % n_classes + 1
        graph.add_object(make_object(oid, class_id, n_attrs))
        graph.chains[class_id].append([oid])
    return graph
