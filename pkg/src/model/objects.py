from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

from src.config import SimConfig


class RelKind(StrEnum):
    VERSION = "version"
    CONFIGURATION = "configuration"
    EQUIVALENCE = "equivalence"


class Direction(StrEnum):
    FORWARD = "forward"
    REVERSE = "reverse"


class AttrImpl(StrEnum):
    OWNED = "owned"
    BY_COPY = "inherited_by_copy"
    BY_REFERENCE = "inherited_by_reference"


@dataclass(frozen=True)
class AttrSpec:
    attr_id: int
    size_words: int


@dataclass
class ClassDef:
    """A class of the synthetic schema.

    Links only ever point to classes with a smaller id, so the three link
    kinds can never form a cycle.
    """

    class_id: int
    attr_specs: list[AttrSpec]
    superclass: int | None = None
    component_of: int | None = None
    equivalent_to: int | None = None
    mean_versions: int = 1


@dataclass
class AttrValue:
    attr_id: int
    value: int
    size_words: int = 1
    impl: AttrImpl = AttrImpl.OWNED
    source_oid: int | None = None  # object physically holding the value when inherited

    @property
    def inherited(self) -> bool:
        return self.impl != AttrImpl.OWNED


@dataclass
class RelEdge:
    kind: RelKind
    direction: Direction
    target_oid: int
    usage_count: int = 0
    access_prob: float = 1.0


@dataclass
class ObjectInstance:
    oid: int
    class_id: int
    attr_values: list[AttrValue] = field(default_factory=list)
    edges: list[RelEdge] = field(default_factory=list)
    access_count: int = 0

    def edges_of(self, kind: RelKind, direction: Direction | None = None) -> list[RelEdge]:
        return [
            e
            for e in self.edges
            if e.kind == kind and (direction is None or e.direction == direction)
        ]

    @property
    def value_words(self) -> int:
        """Words of attribute data read when the whole object is accessed."""
        return sum(a.size_words for a in self.attr_values)


def default_access_probs() -> dict[RelKind, float]:
    return {RelKind.VERSION: 0.4, RelKind.CONFIGURATION: 0.4, RelKind.EQUIVALENCE: 0.2}


def access_probs_from(config: SimConfig) -> dict[RelKind, float]:
    return {
        RelKind.VERSION: config.ck.prob_version,
        RelKind.CONFIGURATION: config.ck.prob_configuration,
        RelKind.EQUIVALENCE: config.ck.prob_equivalence,
    }


@dataclass
class ObjectGraph:
    """Schema plus instances, with class extents and version chains kept alongside."""

    classes: list[ClassDef]
    objects: dict[int, ObjectInstance] = field(default_factory=dict)
    next_oid: int = 1
    access_probs: dict[RelKind, float] = field(default_factory=default_access_probs)
    extents: dict[int, list[int]] = field(default_factory=dict)
    chains: dict[int, list[list[int]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for cls in self.classes:
            self.extents.setdefault(cls.class_id, [])
            self.chains.setdefault(cls.class_id, [])

    def __len__(self) -> int:
        return len(self.objects)

    def class_def(self, class_id: int) -> ClassDef:
        # classes are generated in id order starting at 1
        cls = self.classes[class_id - 1]
        if cls.class_id != class_id:
            cls = next(c for c in self.classes if c.class_id == class_id)
        return cls

    def new_oid(self) -> int:
        oid = self.next_oid
        self.next_oid += 1
        return oid

    def add_object(self, obj: ObjectInstance) -> None:
        self.objects[obj.oid] = obj
        self.extents.setdefault(obj.class_id, []).append(obj.oid)
        self.next_oid = max(self.next_oid, obj.oid + 1)

    def link(self, src: int, dst: int, kind: RelKind) -> RelEdge:
        """Create ``src -kind-> dst`` and its mirror on *dst*; return the forward edge."""
        prob = self.access_probs[kind]
        forward = RelEdge(kind, Direction.FORWARD, dst, access_prob=prob)
        self.objects[src].edges.append(forward)
        self.objects[dst].edges.append(RelEdge(kind, Direction.REVERSE, src, access_prob=prob))
        return forward

    def mirror(self, holder: int, edge: RelEdge) -> RelEdge | None:
        other = self.objects.get(edge.target_oid)
        if other is None:
            return None
        wanted = Direction.REVERSE if edge.direction == Direction.FORWARD else Direction.FORWARD
        for candidate in other.edges:
            if (
                candidate.kind == edge.kind
                and candidate.direction == wanted
                and candidate.target_oid == holder
            ):
                return candidate
        return None

    def relationship_usage(self, holder: int, edge: RelEdge) -> int:
        """Usage of the relationship summed over both of its mirrored edges."""
        mirrored = self.mirror(holder, edge)
        return edge.usage_count + (mirrored.usage_count if mirrored is not None else 0)

    def asymmetric_edges(self) -> list[tuple[int, RelEdge]]:
        """Edges whose mirror is missing or whose target does not resolve."""
        broken: list[tuple[int, RelEdge]] = []
        for oid, obj in self.objects.items():
            for edge in obj.edges:
                if self.mirror(oid, edge) is None:
                    broken.append((oid, edge))
        return broken


def object_size_bytes(obj: ObjectInstance, config: SimConfig) -> int:
    """Stored size: header, attribute data (a reference costs one word), one word per edge."""
    words = config.OBJHDR_WORDS + len(obj.edges)
    for attr in obj.attr_values:
        words += 1 if attr.impl == AttrImpl.BY_REFERENCE else attr.size_words
    return words * config.WDSIZE
