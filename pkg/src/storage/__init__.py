from src.storage.buffer import Buffer, FetchResult
from src.storage.disk import IoCause, IoCounters, Stopwatch, Timer, io_time_ms
from src.storage.pages import Page, PageStore, Segment

__all__ = [
    "Buffer",
    "FetchResult",
    "IoCause",
    "IoCounters",
    "Page",
    "PageStore",
    "Segment",
    "Stopwatch",
    "Timer",
    "io_time_ms",
]
