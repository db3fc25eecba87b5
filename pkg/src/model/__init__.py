from src.model.generator import create_instance, generate_database, generate_schema
from src.model.objects import (
    AttrImpl,
    AttrSpec,
    AttrValue,
    ClassDef,
    Direction,
    ObjectGraph,
    ObjectInstance,
    RelEdge,
    RelKind,
    object_size_bytes,
)

__all__ = [
    "AttrImpl",
    "AttrSpec",
    "AttrValue",
    "ClassDef",
    "Direction",
    "ObjectGraph",
    "ObjectInstance",
    "RelEdge",
    "RelKind",
    "create_instance",
    "generate_database",
    "generate_schema",
    "object_size_bytes",
]
