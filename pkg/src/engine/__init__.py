from src.engine.events import Event, EventKind
from src.engine.simulator import (
    Simulator,
    Streams,
    derive_streams,
    execute_transaction,
    recluster_exclusive,
    run_simulation,
)

__all__ = [
    "Event",
    "EventKind",
    "Simulator",
    "Streams",
    "derive_streams",
    "execute_transaction",
    "recluster_exclusive",
    "run_simulation",
]
