from __future__ import annotations

from collections import OrderedDict
from collections.abc import Callable
from enum import StrEnum

from src.storage.disk import IoCause, IoCounters, Timer


class FetchResult(StrEnum):
    HIT = "hit"
    MISS = "miss"


class Buffer:
    """Main-memory page buffer with FIFO replacement.

    Pages are evicted in load order; hitting a resident page does not move it.
    Evicting a dirty page costs one write, charged to whoever caused the eviction.
    """

    def __init__(
        self,
        capacity_pages: int,
        counters: IoCounters,
        io_ms: float,
        is_dirty: Callable[[int], bool] = lambda _page_id: False,
        mark_clean: Callable[[int], None] = lambda _page_id: None,
    ) -> None:
        self._capacity = capacity_pages
        self._counters = counters
        self._io_ms = io_ms
        self._is_dirty = is_dirty
        self._mark_clean = mark_clean
        self._resident: OrderedDict[int, None] = OrderedDict()

    @property
    def capacity_pages(self) -> int:
        return self._capacity

    @property
    def resident(self) -> list[int]:
        """Resident page ids, oldest first."""
        return list(self._resident)

    def __contains__(self, page_id: int) -> bool:
        return page_id in self._resident

    def __len__(self) -> int:
        return len(self._resident)

    def fetch(self, page_id: int, cause: IoCause, clock: Timer) -> FetchResult:
        if page_id in self._resident:
            return FetchResult.HIT
        self._make_room(cause, clock)
        self._counters.record_read(cause)
        clock.advance(self._io_ms)
        self._resident[page_id] = None
        return FetchResult.MISS

    def install(self, page_id: int, cause: IoCause, clock: Timer) -> None:
        """Bring a freshly allocated page into memory without reading it from disk."""
        if page_id in self._resident:
            return
        self._make_room(cause, clock)
        self._resident[page_id] = None

    def drop(self, page_id: int) -> None:
        self._resident.pop(page_id, None)

    def clear(self) -> None:
        self._resident.clear()

    def _make_room(self, cause: IoCause, clock: Timer) -> None:
        while len(self._resident) >= self._capacity:
            victim, _ = self._resident.popitem(last=False)
            if self._is_dirty(victim):
                self._counters.record_write(cause)
                clock.advance(self._io_ms)
                self._mark_clean(victim)
