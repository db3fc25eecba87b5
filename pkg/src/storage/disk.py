from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Protocol

from src.config import SimConfig


class IoCause(StrEnum):
    TRANSACTION = "transaction"
    CLUSTERING = "clustering"


class Timer(Protocol):
    """Anything simulated device time can be charged to."""

    def advance(self, ms: float) -> None: ...


@dataclass
class Stopwatch:
    """Accumulates the time charged during one service step."""

    elapsed_ms: float = 0.0

    def advance(self, ms: float) -> None:
        self.elapsed_ms += ms


def io_time_ms(config: SimConfig) -> float:
    """Duration of one page read or write."""
    return config.SEEK + config.LATENCY + config.TRANSFER


@dataclass
class IoCounters:
    txn_reads: int = 0
    txn_writes: int = 0
    clust_reads: int = 0
    clust_writes: int = 0

    def record_read(self, cause: IoCause) -> None:
        if cause == IoCause.TRANSACTION:
            self.txn_reads += 1
        else:
            self.clust_reads += 1

    def record_write(self, cause: IoCause) -> None:
        if cause == IoCause.TRANSACTION:
            self.txn_writes += 1
        else:
            self.clust_writes += 1

    @property
    def txn_total(self) -> int:
        return self.txn_reads + self.txn_writes

    @property
    def clust_total(self) -> int:
        return self.clust_reads + self.clust_writes

    @property
    def total(self) -> int:
        return self.txn_total + self.clust_total

    def reset(self) -> None:
        self.txn_reads = self.txn_writes = self.clust_reads = self.clust_writes = 0
