"""p1lab — Twisted gl₂ isomonodromic systems and the Painlevé 1 hierarchy."""

from p1lab.central_config import PROJECT_VERSION
from p1lab.errors import (
    DegenerateTimes,
    IllConditioned,
    IndexOutOfRange,
    NotCanonical,
    P1LabError,
    PoleCollision,
    ResidueMismatch,
    StepFailure,
    WrongGenus,
)
from p1lab.lax import DarbouxPoint, SymmetricPoint
from p1lab.times import DeformationVector, IrregularTimes, ReducedTimes

__version__ = PROJECT_VERSION

__all__ = [
    "__version__",
    "DarbouxPoint",
    "DegenerateTimes",
    "DeformationVector",
    "IllConditioned",
    "IndexOutOfRange",
    "IrregularTimes",
    "NotCanonical",
    "P1LabError",
    "PoleCollision",
    "ReducedTimes",
    "ResidueMismatch",
    "StepFailure",
    "SymmetricPoint",
    "WrongGenus",
]
