from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from src.workload.transactions import Transaction


class EventKind(StrEnum):
    ARRIVAL = "arrival"
    TXN_COMPLETE = "txn_complete"
    RECLUSTER_BEGIN = "recluster_begin"
    RECLUSTER_END = "recluster_end"


@dataclass(frozen=True)
class Event:
    """One lifecycle event of a run, stamped with the simulated time it happened at."""

    time: float
    kind: EventKind
    txn: Transaction | None = None
