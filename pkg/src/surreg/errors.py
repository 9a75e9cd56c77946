"""Exception hierarchy for surreg.

Every error raised by this package derives from :class:`SurregError` so
callers can catch the whole family with one clause.  Subclasses that also
derive from ``ValueError`` or ``KeyError`` keep stdlib-style semantics for
code that does not know about surreg.
"""

from __future__ import annotations


class SurregError(Exception):
    """Base class for all surreg errors."""


class SymmetryViolation(SurregError):
    """A conditional distribution failed the mirror-atom symmetry test.

    Carries the offending label in ``label``.
    """

    def __init__(self, message: str, label: float):
        super().__init__(message)
        self.label = label


class NotSymmetric(SurregError):
    """Closed-form best conditional error requested for an asymmetric conditional."""


class MissingPrediction(SurregError, KeyError):
    """A hypothesis has no prediction for a requested input id."""


class InvalidSpec(SurregError, ValueError):
    """A bound specification or argument violates its invariants."""


class BoundInapplicable(SurregError):
    """The requested bound has no finite form here (worst-case mass is zero)."""


class PremiseFailed(SurregError):
    """The per-input premise of a general comparison theorem does not hold.

    Not a bug: it marks an instantiation the theorem simply does not cover.
    Carries the offending input id in ``input_id``.
    """

    def __init__(self, message: str, input_id: str, lhs: float, rhs: float):
        super().__init__(message)
        self.input_id = input_id
        self.lhs = lhs
        self.rhs = rhs


class NumericalInconsistency(SurregError):
    """An internally computed quantity violated a guaranteed inequality.

    Raised when numbers disagree beyond what floating-point noise can
    explain, e.g. a conditional error strictly below the proven optimum.
    """


class DomainViolation(SurregError, ValueError):
    """A pair-deviation query lies outside the stated domain of the lemma."""


class InvalidParams(SurregError, ValueError):
    """Counterexample parameters violate a regime inequality (named in the message)."""


class NonConvergence(SurregError):
    """The solver exhausted its iteration budget before meeting its tolerance.

    Carries the trailing objective values in ``trace``.
    """

    def __init__(self, message: str, trace: list[float]):
        super().__init__(message)
        self.trace = trace


class ParseError(SurregError, ValueError):
    """A delimited data file failed to parse; names the first bad cell."""

    def __init__(self, message: str, row: int, col: int):
        super().__init__(message)
        self.row = row
        self.col = col


class DimensionMismatch(SurregError, ValueError):
    """Rows of a dataset (or a model/dataset pair) disagree on dimension."""


class ConfigInfeasible(SurregError, ValueError):
    """A synthetic-data config cannot satisfy its label bound by construction."""


class InvalidDistribution(SurregError, ValueError):
    """A distribution config violates a type invariant; names the first bad path."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path
