"""Shared exception types.

Every error that callers are expected to branch on gets its own class; plain
ValueError is reserved for programmer mistakes (bad arguments, misuse).
"""

from __future__ import annotations


class TownletError(Exception):
    """Base class for all package-specific errors."""


class WorldError(TownletError):
    """Violation of a world-model precondition (bad placement, unknown id, ...)."""


class UnknownIdError(WorldError):
    pass


class DuplicateIdError(WorldError):
    pass


class CapacityError(WorldError):
    pass


class ContainerCycleError(WorldError):
    pass


class OutOfBoundsError(WorldError):
    pass


class NotPortableError(WorldError):
    pass


class OutOfReachError(WorldError):
    pass


class UnreachableError(TownletError):
    """No walkable path exists between the two tiles."""


class BundleError(TownletError):
    """Map bundle is structurally unreadable (missing file, malformed CSV...)."""


class MapValidationError(TownletError):
    """Map failed semantic validation; carries the full report."""

    def __init__(self, report: object) -> None:
        super().__init__(f"map validation failed: {report}")
        self.report = report


class BackendError(TownletError):
    """LLM backend failure after retries were exhausted."""


class CacheMissError(BackendError):
    """Replay-mode backend had no recorded response for the request."""


class FixtureMissError(BackendError):
    """Scripted backend had no fixture matching the request."""


class UnparsableJudgmentError(TownletError):
    """Judge response had no usable SCORE line after all retries."""


class TraceError(TownletError):
    """Trace file violates format rules (tick regression, bad header, drift)."""


class DialogueOrderError(TownletError):
    """An utterance was submitted out of turn."""
