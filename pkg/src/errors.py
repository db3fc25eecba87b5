from __future__ import annotations


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigError(SimulationError):
    """Invalid simulation or experiment configuration.

    ``line`` is set when the problem was found while parsing a config file.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DirectoryMissError(SimulationError):
    """An object was looked up before any policy placed it on a page."""


class PageFullError(SimulationError):
    """The object does not fit in the free space left on the page."""


class NonEmptyFreeError(SimulationError):
    """Attempt to free a page that still holds objects."""


class ClusterConflictError(SimulationError):
    """A Cluster message names a class that already shares a multi-class segment."""


class EmptyAggregateError(SimulationError):
    """Aggregation over an empty list of reports."""
