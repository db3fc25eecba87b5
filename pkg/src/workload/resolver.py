"""Turn a transaction into the ordered list of object accesses it performs.

Closure traversals read every object they cross, not only the last one:
crossing a relationship means reading the object that holds it. Equivalence
is a symmetric pairing, so its group lookup is a single hop in both
directions.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from src.model.objects import Direction, ObjectGraph, RelEdge, RelKind
from src.workload.transactions import Transaction, TransactionKind


class AccessMode(StrEnum):
    READ = "read"
    WRITE = "write"


@dataclass(frozen=True)
class PlanEntry:
    oid: int
    mode: AccessMode = AccessMode.READ


@dataclass
class AccessPlan:
    entries: list[PlanEntry] = field(default_factory=list)
    edges_crossed: list[RelEdge] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PlanEntry]:
        return iter(self.entries)

    @property
    def oids(self) -> list[int]:
        return [e.oid for e in self.entries]


def _step_edges(graph: ObjectGraph, oid: int, kind: RelKind) -> list[RelEdge]:
    """Edges a traversal may follow out of *oid* along *kind*."""
    obj = graph.objects[oid]
    if kind == RelKind.EQUIVALENCE:
        return obj.edges_of(kind)
    return obj.edges_of(kind, Direction.FORWARD)


def _closure(
    graph: ObjectGraph, start: int, kind: RelKind, direction: Direction
) -> AccessPlan:
    """Breadth-first transitive closure from *start* along one edge kind and direction."""
    plan = AccessPlan(entries=[PlanEntry(start)])
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for edge in graph.objects[current].edges_of(kind, direction):
            if edge.target_oid in seen:
                continue
            seen.add(edge.target_oid)
            plan.entries.append(PlanEntry(edge.target_oid))
            plan.edges_crossed.append(edge)
            queue.append(edge.target_oid)
    return plan


def _one_hop(graph: ObjectGraph, start: int, edges: list[RelEdge]) -> AccessPlan:
    plan = AccessPlan(entries=[PlanEntry(start)])
    seen = {start}
    for edge in edges:
        if edge.target_oid in seen:
            continue
        seen.add(edge.target_oid)
        plan.entries.append(PlanEntry(edge.target_oid))
        plan.edges_crossed.append(edge)
    return plan


def _traverse(
    graph: ObjectGraph,
    start: int,
    depth: int,
    kind: RelKind | None,
    rng: np.random.Generator,
) -> AccessPlan:
    """Follow one relationship (or a random one per step) up to *depth* hops."""
    plan = AccessPlan(entries=[PlanEntry(start)])
    kinds = list(RelKind)
    current = start
    for _ in range(depth):
        step_kind = kind if kind is not None else kinds[int(rng.integers(len(kinds)))]
        candidates = _step_edges(graph, current, step_kind)
        if not candidates:
            break
        edge = candidates[int(rng.integers(len(candidates)))]
        plan.entries.append(PlanEntry(edge.target_oid))
        plan.edges_crossed.append(edge)
        current = edge.target_oid
    return plan


def record_access(graph: ObjectGraph, plan: AccessPlan) -> None:
    """Feed the usage statistics: one count per object access, one per edge crossed."""
    for entry in plan.entries:
        graph.objects[entry.oid].access_count += 1
    for edge in plan.edges_crossed:
        edge.usage_count += 1


def resolve_targets(
    txn: Transaction,
    graph: ObjectGraph,
    rng: np.random.Generator,
    record: bool = True,
) -> AccessPlan:
    kind = txn.kind
    start = txn.start_oid

    match kind:
        case TransactionKind.Q1:
            plan = AccessPlan(entries=[PlanEntry(start)])
        case TransactionKind.Q2:
            lo, hi = txn.value_range
            plan = AccessPlan(
                entries=[
                    PlanEntry(oid)
                    for oid in graph.extents.get(txn.class_id, [])
                    if lo <= graph.objects[oid].attr_values[0].value <= hi
                ]
            )
        case TransactionKind.Q3 | TransactionKind.Q4:
            plan = _closure(graph, start, kind.relationship, Direction.FORWARD)
        case TransactionKind.Q5:
            plan = _one_hop(graph, start, graph.objects[start].edges_of(RelKind.EQUIVALENCE))
        case TransactionKind.Q6:
            plan = _closure(graph, start, RelKind.VERSION, Direction.REVERSE)
        case TransactionKind.Q7:
            edges = graph.objects[start].edges_of(RelKind.CONFIGURATION, Direction.REVERSE)
            plan = _one_hop(graph, start, edges)
        case TransactionKind.Q8:
            extent = graph.extents.get(txn.class_id, [])
            plan = AccessPlan(entries=[PlanEntry(oid) for oid in extent])
        case TransactionKind.Q9 | TransactionKind.Q10 | TransactionKind.Q11 | TransactionKind.Q12:
            plan = _traverse(graph, start, txn.depth or 1, kind.relationship, rng)
        case TransactionKind.U1:
            plan = AccessPlan(entries=[PlanEntry(start, AccessMode.WRITE)])
        case _:
            plan = AccessPlan()

    if record:
        record_access(graph, plan)
    return plan
