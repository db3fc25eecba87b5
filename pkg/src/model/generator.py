"""Synthetic schema and database generation.

Every "mean" parameter (MNVER, MNATTR, MSATTR) is drawn as a uniform integer on
``[1, 2*mean - 1]``: the mean is exact and draws stay positive. Attribute values
are uniform on ``[0, 99]``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import structlog

from src.config import SimConfig
from src.errors import ConfigError
from src.model.objects import (
    AttrImpl,
    AttrSpec,
    AttrValue,
    ClassDef,
    ObjectGraph,
    ObjectInstance,
    RelKind,
    access_probs_from,
)

logger = structlog.get_logger()

VALUE_DOMAIN = 100  # attribute values are drawn from [0, VALUE_DOMAIN - 1]


def uniform_around(rng: np.random.Generator, mean: int) -> int:
    """Uniform integer on [1, 2*mean - 1]."""
    return int(rng.integers(1, 2 * mean))


def generate_schema(config: SimConfig, rng: np.random.Generator) -> list[ClassDef]:
    if config.NCL < 1:
        raise ConfigError(f"NCL must be >= 1, got {config.NCL}")
    for name in ("PSUPER", "PCOMP", "PEQUI"):
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name} must be a probability, got {value}")

    classes: list[ClassDef] = []
    for class_id in range(1, config.NCL + 1):
        n_attrs = uniform_around(rng, config.MNATTR)
        specs = [
            AttrSpec(attr_id, uniform_around(rng, config.MSATTR)) for attr_id in range(n_attrs)
        ]
        cls = ClassDef(class_id=class_id, attr_specs=specs)
        if class_id >= 2:
            if rng.random() < config.PSUPER:
                cls.superclass = int(rng.integers(1, class_id))
            if rng.random() < config.PCOMP:
                cls.component_of = int(rng.integers(1, class_id))
            if rng.random() < config.PEQUI:
                cls.equivalent_to = int(rng.integers(1, class_id))
        cls.mean_versions = uniform_around(rng, config.MNVER)
        classes.append(cls)

    logger.debug("schema_generated", classes=len(classes))
    return classes


def _owned_values(cls: ClassDef, rng: np.random.Generator) -> list[AttrValue]:
    values = rng.integers(0, VALUE_DOMAIN, size=len(cls.attr_specs))
    return [
        AttrValue(attr_id=spec.attr_id, value=int(v), size_words=spec.size_words)
        for spec, v in zip(cls.attr_specs, values)
    ]


def _inherit(
    ancestor: ObjectInstance, target: ObjectInstance, rng: np.random.Generator, p_copy: float
) -> None:
    """Make every attribute of *target* inherit its value from the version *ancestor*."""
    for attr, source in zip(target.attr_values, ancestor.attr_values):
        attr.value = source.value
        if rng.random() < p_copy:
            attr.impl = AttrImpl.BY_COPY
            attr.source_oid = ancestor.oid
        else:
            attr.impl = AttrImpl.BY_REFERENCE
            # a reference points at the object that physically holds the value
            if source.impl == AttrImpl.BY_REFERENCE and source.source_oid is not None:
                attr.source_oid = source.source_oid
            else:
                attr.source_oid = ancestor.oid


def _pick(extent: Sequence[int], rng: np.random.Generator, exclude: int) -> int | None:
    candidates = [oid for oid in extent if oid != exclude]
    if not candidates:
        return None
    return candidates[int(rng.integers(len(candidates)))]


def _wire_structure(
    graph: ObjectGraph, cls: ClassDef, oid: int, rng: np.random.Generator
) -> None:
    """Attach *oid* to a composite and an equivalent instance when its class is so linked."""
    if cls.component_of is not None:
        owner = _pick(graph.extents.get(cls.component_of, []), rng, oid)
        if owner is not None:
            graph.link(owner, oid, RelKind.CONFIGURATION)
    if cls.equivalent_to is not None:
        partner = _pick(graph.extents.get(cls.equivalent_to, []), rng, oid)
        if partner is not None:
            graph.link(oid, partner, RelKind.EQUIVALENCE)


def generate_database(
    schema: Sequence[ClassDef],
    nobj: int,
    rng: np.random.Generator,
    config: SimConfig | None = None,
) -> ObjectGraph:
    """Create *nobj* instances over *schema* with mirrored structural edges."""
    if not schema:
        raise ConfigError("schema must contain at least one class")
    if nobj < 1:
        raise ConfigError(f"NOBJ must be >= 1, got {nobj}")
    config = config or SimConfig()

    graph = ObjectGraph(classes=list(schema), access_probs=access_probs_from(config))
    for idx in rng.integers(0, len(schema), size=nobj):
        cls = schema[int(idx)]
        graph.add_object(ObjectInstance(graph.new_oid(), cls.class_id, _owned_values(cls, rng)))

    for cls in schema:
        extent = graph.extents[cls.class_id]
        start = 0
        while start < len(extent):
            length = uniform_around(rng, cls.mean_versions)
            chain = list(extent[start : start + length])
            start += length
            graph.chains[cls.class_id].append(chain)
            for ancestor, descendant in zip(chain, chain[1:]):
                _inherit(graph.objects[ancestor], graph.objects[descendant], rng, config.p_copy)
                graph.link(ancestor, descendant, RelKind.VERSION)

    for cls in schema:
        for oid in graph.extents[cls.class_id]:
            _wire_structure(graph, cls, oid, rng)

    logger.debug(
        "database_generated",
        objects=len(graph),
        edges=sum(len(o.edges) for o in graph.objects.values()) // 2,
    )
    return graph


def create_instance(
    graph: ObjectGraph,
    class_id: int,
    rng: np.random.Generator,
    config: SimConfig | None = None,
) -> ObjectInstance:
    """Create a new latest version in a random chain of *class_id* (or a new chain)."""
    config = config or SimConfig()
    cls = graph.class_def(class_id)
    obj = ObjectInstance(graph.new_oid(), class_id, _owned_values(cls, rng))
    chains = graph.chains.setdefault(class_id, [])

    if chains:
        chain = chains[int(rng.integers(len(chains)))]
        ancestor = graph.objects[chain[-1]]
        _inherit(ancestor, obj, rng, config.p_copy)
        graph.add_object(obj)
        graph.link(ancestor.oid, obj.oid, RelKind.VERSION)
        chain.append(obj.oid)
    else:
        graph.add_object(obj)
        chains.append([obj.oid])

    _wire_structure(graph, cls, obj.oid, rng)
    return obj
