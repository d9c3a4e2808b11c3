"""Exception hierarchy shared by every bevnav package."""
from __future__ import annotations


class BevNavError(Exception):
    """Base class for all library errors."""


class ShapeError(BevNavError, ValueError):
    """A primitive received operands outside its shape contract."""


class NonFiniteError(BevNavError, FloatingPointError):
    """A forward or backward pass produced NaN or Inf."""


class GradientError(BevNavError):
    """Backward or optimizer misuse (non-scalar loss, missing gradients)."""


class CheckpointError(BevNavError):
    """Checkpoint manifest or payload is corrupt or incompatible."""


class ConfigError(BevNavError, ValueError):
    """Invalid configuration; the message names every offending field."""


class EmptyCloudError(BevNavError, ValueError):
    """A point cloud with no points where at least one is required."""


class WorldGenerationError(BevNavError):
    """Rejection sampling could not place every entity in the arena."""


class EpisodeFinishedError(BevNavError):
    """``step`` called on an episode that already ended."""


class NoPathError(BevNavError):
    """The planner found no collision-free path between start and goal."""


class CloudFileError(BevNavError, ValueError):
    """Malformed or empty XYZ point file."""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class MetricsError(BevNavError, ValueError):
    """Metrics requested over no records or records with a non-positive optimal length."""
