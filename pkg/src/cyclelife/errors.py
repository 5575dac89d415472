"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class CycleLifeError(Exception):
    """Base class for all package errors."""


class SpecError(CycleLifeError):
    """Invalid configuration, hyperparameters, or arguments (usage error)."""


class MissingManifest(CycleLifeError):
    pass


class SchemaVersionMismatch(CycleLifeError):
    pass


@dataclass(frozen=True)
class ValidationFailure:
    """One violated dataset rule, attributed to a cell."""

    cell_id: str
    rule: str

    def __str__(self) -> str:
        return f"{self.cell_id}: {self.rule}"


class DatasetValidationError(CycleLifeError):
    """Raised when a dataset fails to load; carries every violation found."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("\n".join(str(f) for f in self.failures))


class NoCrossing(CycleLifeError):
    pass


class DegenerateSplit(CycleLifeError):
    pass


class MissingCurve(CycleLifeError):
    pass


class EmptyDataset(CycleLifeError):
    pass


class MissingChannel(CycleLifeError):
    pass


class SingularSystem(CycleLifeError):
    pass


class NoValidSplit(CycleLifeError):
    pass


class NoConsensus(CycleLifeError):
    pass


class DimensionMismatch(CycleLifeError):
    pass


class ShapeMismatch(CycleLifeError):
    pass


class ZeroTarget(CycleLifeError):
    pass


class ConstantTargets(CycleLifeError):
    pass


class UnsupportedFormat(CycleLifeError):
    pass


class NumericalDivergence(CycleLifeError):
    """Training loss became non-finite; carries the partial run."""

    def __init__(self, message, history=None, params=None):
        super().__init__(message)
        self.history = history
        self.params = params
