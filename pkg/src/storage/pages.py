from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

from src.config import SimConfig
from src.errors import DirectoryMissError, NonEmptyFreeError, PageFullError
from src.model.objects import ObjectInstance, object_size_bytes
from src.storage.buffer import Buffer, FetchResult
from src.storage.disk import IoCause, IoCounters, Timer, io_time_ms


@dataclass
class Page:
    page_id: int
    capacity_bytes: int
    used_bytes: int = 0
    residents: list[int] = field(default_factory=list)
    dirty: bool = False
    segment_id: int | None = None

    @property
    def free_bytes(self) -> int:
        return self.capacity_bytes - self.used_bytes

    def fits(self, size_bytes: int) -> bool:
        return size_bytes <= self.free_bytes


@dataclass
class Segment:
    segment_id: int
    member_classes: set[int] = field(default_factory=set)
    pages: list[int] = field(default_factory=list)


class PageStore:
    """Pages, segments, the object-to-page directory and the page buffer.

    The directory stands for the in-memory hash tables of the object manager:
    looking an object up costs TEST + ACCM and never any I/O.
    """

    def __init__(self, config: SimConfig) -> None:
        self._config = config
        self._io_ms = io_time_ms(config)
        self.pages: dict[int, Page] = {}
        self.segments: dict[int, Segment] = {}
        self.counters = IoCounters()
        self.buffer = Buffer(
            config.BUFSIZE,
            self.counters,
            self._io_ms,
            is_dirty=lambda pid: pid in self.pages and self.pages[pid].dirty,
            mark_clean=self._mark_clean,
        )
        self._directory: dict[int, int] = {}
        self._sizes: dict[int, int] = {}
        self._class_segment: dict[int, int] = {}
        self._next_page_id = 1
        self._next_segment_id = 1
        self._pages_used = 0
        self._listeners: list[Callable[[], None]] = []

    # -- observation -------------------------------------------------------

    def subscribe(self, listener: Callable[[], None]) -> None:
        """Call *listener* after every allocation, free and placement."""
        self._listeners.append(listener)

    def _changed(self) -> None:
        for listener in self._listeners:
            listener()

    @property
    def pages_used(self) -> int:
        return self._pages_used

    @property
    def pages_allocated(self) -> int:
        return len(self.pages)

    @property
    def total_used_bytes(self) -> int:
        return sum(p.used_bytes for p in self.pages.values())

    def page_ids(self) -> list[int]:
        return sorted(self.pages)

    def placed_oids(self) -> Iterable[int]:
        return self._directory.keys()

    # -- directory ---------------------------------------------------------

    def page_of(self, oid: int) -> int | None:
        """Free directory peek (no time charged); None when the object is unplaced."""
        return self._directory.get(oid)

    def lookup_page(self, oid: int, clock: Timer) -> int:
        clock.advance(self._config.TEST + self._config.ACCM)
        try:
            return self._directory[oid]
        except KeyError:
            raise DirectoryMissError(f"object {oid} has no page") from None

    def size_of(self, oid: int) -> int:
        return self._sizes[oid]

    # -- page lifecycle ----------------------------------------------------

    def allocate_page(self, segment_id: int | None = None) -> int:
        page_id = self._next_page_id
        self._next_page_id += 1
        self.pages[page_id] = Page(page_id, self._config.PGSIZE, segment_id=segment_id)
        if segment_id is not None:
            self.segments[segment_id].pages.append(page_id)
        self._changed()
        return page_id

    def free_page(self, page_id: int) -> None:
        page = self.pages[page_id]
        if page.residents:
            raise NonEmptyFreeError(f"page {page_id} still holds {len(page.residents)} objects")
        del self.pages[page_id]
        self.buffer.drop(page_id)
        if page.segment_id is not None and page.segment_id in self.segments:
            self.segments[page.segment_id].pages.remove(page_id)
        self._changed()

    def place_object(self, obj: ObjectInstance, page_id: int) -> None:
        """Make *page_id* the residence of *obj*, releasing its previous page."""
        size = object_size_bytes(obj, self._config)
        page = self.pages[page_id]
        current = self._directory.get(obj.oid)

        if current == page_id:
            delta = size - self._sizes[obj.oid]
            if delta > page.free_bytes:
                raise PageFullError(
                    f"object {obj.oid} grew to {size} bytes, page {page_id} has "
                    f"{page.free_bytes} free"
                )
            page.used_bytes += delta
            self._sizes[obj.oid] = size
            page.dirty = True
            return

        if not page.fits(size):
            raise PageFullError(
                f"object {obj.oid} needs {size} bytes, page {page_id} has {page.free_bytes} free"
            )
        if current is not None:
            self._release(obj.oid, current)
        if not page.residents:
            self._pages_used += 1
        page.residents.append(obj.oid)
        page.used_bytes += size
        page.dirty = True
        self._directory[obj.oid] = page_id
        self._sizes[obj.oid] = size
        self._changed()

    def refresh(self, obj: ObjectInstance) -> None:
        """Re-account an already placed object whose size changed."""
        page_id = self._directory.get(obj.oid)
        if page_id is None:
            raise DirectoryMissError(f"object {obj.oid} has no page")
        self.place_object(obj, page_id)

    def _release(self, oid: int, page_id: int) -> None:
        page = self.pages[page_id]
        page.residents.remove(oid)
        page.used_bytes -= self._sizes[oid]
        if not page.residents:
            self._pages_used -= 1

    def fits(self, obj: ObjectInstance, page_id: int) -> bool:
        page = self.pages[page_id]
        size = object_size_bytes(obj, self._config)
        if self._directory.get(obj.oid) == page_id:
            size -= self._sizes[obj.oid]
        return page.fits(size)

    def least_filled_page(self, size_bytes: int) -> int | None:
        """Non-full page with the most free space that still fits *size_bytes*."""
        best: Page | None = None
        for page in self.pages.values():
            if page.fits(size_bytes) and (best is None or page.used_bytes < best.used_bytes):
                best = page
        return None if best is None else best.page_id

    # -- I/O ---------------------------------------------------------------

    def fetch_page(self, page_id: int, cause: IoCause, clock: Timer) -> FetchResult:
        return self.buffer.fetch(page_id, cause, clock)

    def install_page(self, page_id: int, cause: IoCause, clock: Timer) -> None:
        self.buffer.install(page_id, cause, clock)

    def write_page(self, page_id: int, cause: IoCause, clock: Timer) -> None:
        """Force *page_id* to disk now."""
        self.counters.record_write(cause)
        clock.advance(self._io_ms)
        self.pages[page_id].dirty = False

    def mark_dirty(self, page_id: int) -> None:
        self.pages[page_id].dirty = True

    def _mark_clean(self, page_id: int) -> None:
        if page_id in self.pages:
            self.pages[page_id].dirty = False

    def reset_io(self) -> None:
        """Start cold: empty buffer, zero counters, every page clean."""
        self.buffer.clear()
        self.counters.reset()
        for page in self.pages.values():
            page.dirty = False

    # -- segments ----------------------------------------------------------

    def create_segment(self, classes: Iterable[int]) -> Segment:
        segment = Segment(self._next_segment_id)
        self._next_segment_id += 1
        self.segments[segment.segment_id] = segment
        for class_id in classes:
            self.assign_class(class_id, segment.segment_id)
        return segment

    def assign_class(self, class_id: int, segment_id: int) -> None:
        """Move *class_id* to *segment_id*; a class belongs to at most one segment."""
        previous = self._class_segment.get(class_id)
        if previous is not None and previous in self.segments:
            self.segments[previous].member_classes.discard(class_id)
        self._class_segment[class_id] = segment_id
        self.segments[segment_id].member_classes.add(class_id)

    def segment_of_class(self, class_id: int) -> Segment | None:
        segment_id = self._class_segment.get(class_id)
        return None if segment_id is None else self.segments.get(segment_id)

    def drop_segment(self, segment_id: int) -> None:
        segment = self.segments.pop(segment_id)
        for class_id in segment.member_classes:
            if self._class_segment.get(class_id) == segment_id:
                del self._class_segment[class_id]
        for page_id in segment.pages:
            if page_id in self.pages:
                self.pages[page_id].segment_id = None
