"""
Error Hierarchy
===============

Every failure raised by the library derives from ``P1LabError``.  The CLI
catches the base class once and prints the concrete class name, so the
names below are part of the user-facing surface.
"""

from __future__ import annotations


class P1LabError(Exception):
    """Base class for all domain errors."""


class PoleCollision(P1LabError):
    """Two apparent singularities (or recovered roots) are closer than tolerance."""


class DegenerateTimes(P1LabError):
    """Leading odd time vanishes (M∞ singular) or T₂ = 0."""


class IllConditioned(P1LabError):
    """A dense solve exceeded the configured condition-number guard."""


class NotCanonical(P1LabError):
    """A canonical-times-only route was called with general times."""


class WrongGenus(P1LabError):
    """The operation is only defined for a specific genus."""


class ResidueMismatch(P1LabError):
    """An assembly that must be polynomial kept a pole part."""


class IndexOutOfRange(P1LabError):
    """A flow or basis index outside its admissible range."""


class StepFailure(P1LabError):
    """Integration blew up (movable pole of the transcendent reached).

    ``tau`` and ``state`` hold the last good point so callers can report it.
    """

    def __init__(self, message: str, tau=None, state=None):
        super().__init__(message)
        self.tau = tau
        self.state = state
