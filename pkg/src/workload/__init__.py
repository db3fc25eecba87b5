from src.workload.resolver import (
    AccessMode,
    AccessPlan,
    PlanEntry,
    record_access,
    resolve_targets,
)
from src.workload.transactions import (
    ALL_KINDS,
    QUERY_KINDS,
    Transaction,
    TransactionKind,
    draw_transaction,
    normalized_weights,
    transaction_weights,
)

__all__ = [
    "ALL_KINDS",
    "QUERY_KINDS",
    "AccessMode",
    "AccessPlan",
    "PlanEntry",
    "Transaction",
    "TransactionKind",
    "draw_transaction",
    "normalized_weights",
    "record_access",
    "resolve_targets",
    "transaction_weights",
]
