from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from src.config import SimConfig
from src.errors import ConfigError
from src.model.generator import VALUE_DOMAIN
from src.model.objects import ObjectGraph, RelKind


class TransactionKind(StrEnum):
    Q1 = "Q1"  # name lookup
    Q2 = "Q2"  # range lookup
    Q3 = "Q3"  # group lookup along versions
    Q4 = "Q4"  # group lookup along configurations
    Q5 = "Q5"  # group lookup along equivalences
    Q6 = "Q6"  # reference lookup along versions
    Q7 = "Q7"  # reference lookup along configurations
    Q8 = "Q8"  # sequential scan
    Q9 = "Q9"  # closure traversal along versions
    Q10 = "Q10"  # closure traversal along configurations
    Q11 = "Q11"  # closure traversal along equivalences
    Q12 = "Q12"  # random closure traversal
    U1 = "U1"  # attribute update
    U2 = "U2"  # instance creation
    CLUST = "CLUST"  # reclustering

    @property
    def is_query(self) -> bool:
        return self in QUERY_KINDS

    @property
    def is_update(self) -> bool:
        return self in (TransactionKind.U1, TransactionKind.U2)

    @property
    def relationship(self) -> RelKind | None:
        return _KIND_RELATIONSHIP.get(self)


QUERY_KINDS: tuple[TransactionKind, ...] = tuple(TransactionKind)[:12]
ALL_KINDS: tuple[TransactionKind, ...] = tuple(TransactionKind)

_KIND_RELATIONSHIP: dict[TransactionKind, RelKind] = {
    TransactionKind.Q3: RelKind.VERSION,
    TransactionKind.Q4: RelKind.CONFIGURATION,
    TransactionKind.Q5: RelKind.EQUIVALENCE,
    TransactionKind.Q6: RelKind.VERSION,
    TransactionKind.Q7: RelKind.CONFIGURATION,
    TransactionKind.Q9: RelKind.VERSION,
    TransactionKind.Q10: RelKind.CONFIGURATION,
    TransactionKind.Q11: RelKind.EQUIVALENCE,
}

_START_OBJECT_KINDS = frozenset(
    {
        TransactionKind.Q1,
        TransactionKind.Q3,
        TransactionKind.Q4,
        TransactionKind.Q5,
        TransactionKind.Q6,
        TransactionKind.Q7,
        TransactionKind.Q9,
        TransactionKind.Q10,
        TransactionKind.Q11,
        TransactionKind.Q12,
        TransactionKind.U1,
    }
)
_CLASS_KINDS = frozenset({TransactionKind.Q2, TransactionKind.Q8, TransactionKind.U2})
CLOSURE_KINDS = frozenset(
    {TransactionKind.Q9, TransactionKind.Q10, TransactionKind.Q11, TransactionKind.Q12}
)


@dataclass
class Transaction:
    txn_id: int
    kind: TransactionKind
    start_oid: int | None = None
    class_id: int | None = None
    value_range: tuple[int, int] | None = None
    depth: int | None = None
    rel_kind: RelKind | None = None
    attr_index: int | None = None
    t_submit: float = 0.0
    t_start: float | None = None
    t_complete: float | None = None
    txn_ios: int = 0
    clust_ios: int = 0

    @property
    def response_ms(self) -> float:
        if self.t_complete is None:
            raise ValueError(f"transaction {self.txn_id} has not completed")
        return self.t_complete - self.t_submit


def transaction_weights(config: SimConfig) -> dict[TransactionKind, float]:
    weights = dict(zip(QUERY_KINDS, config.query_weights))
    weights[TransactionKind.U1] = config.effective_pu1()
    weights[TransactionKind.U2] = config.PU2
    weights[TransactionKind.CLUST] = config.effective_pclust()
    return weights


def normalized_weights(config: SimConfig) -> np.ndarray:
    weights = np.array(list(transaction_weights(config).values()), dtype=float)
    total = weights.sum()
    if total <= 0:
        raise ConfigError("all transaction weights are zero")
    return weights / total


def draw_transaction(
    config: SimConfig,
    rng: np.random.Generator,
    graph: ObjectGraph,
    txn_id: int = 0,
    probabilities: np.ndarray | None = None,
) -> Transaction:
    """Draw a transaction kind by weight, then its parameters uniformly."""
    if probabilities is None:
        probabilities = normalized_weights(config)
    kind = ALL_KINDS[int(rng.choice(len(ALL_KINDS), p=probabilities))]
    txn = Transaction(txn_id=txn_id, kind=kind)

    if kind in _START_OBJECT_KINDS:
        oids = list(graph.objects)
        txn.start_oid = oids[int(rng.integers(len(oids)))]
    if kind in _CLASS_KINDS:
        txn.class_id = graph.classes[int(rng.integers(len(graph.classes)))].class_id
    if kind == TransactionKind.Q2:
        width = max(1, round(config.RANGE_SEL * VALUE_DOMAIN))
        lo = int(rng.integers(0, VALUE_DOMAIN - width + 1))
        txn.value_range = (lo, lo + width - 1)
    if kind in CLOSURE_KINDS:
        txn.depth = int(rng.integers(1, config.MAXDEPTH + 1))
    if kind.relationship is not None:
        txn.rel_kind = kind.relationship
    if kind == TransactionKind.U1:
        n_attrs = len(graph.objects[txn.start_oid].attr_values)
        txn.attr_index = int(rng.integers(n_attrs))
    return txn
