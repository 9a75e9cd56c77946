"""Conditional errors, regrets, and best-in-class quantities.

Conventions, fixed once here:

* conditional error   C(h, x)   = sum of mass * loss(h(x), y) over atoms
* best conditional    C*(x)     = inf over predictions in [-B, B]
* conditional regret  dC(h, x)  = C(h, x) - C*(x), clamped at zero
* generalization error E(h)     = sum of weight * C(h, x)
* best in class       E*(H)     = inf over hypotheses in the class
* minimizability gap  M(H)      = E*(H) - E_x[C*(x)]  (always >= 0)

Two hypothesis classes are supported: every bounded assignment of
predictions (:class:`AllBounded`) and the bounded constants
(:class:`ConstantBounded`).  The closed-form best conditional error
evaluates at the symmetry center and is valid only for symmetric
conditionals; the numeric route golden-sections the interval and needs
no symmetry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .distributions import Conditional, FiniteDistribution, check_symmetric
from .errors import (
    InvalidSpec,
    MissingPrediction,
    NotSymmetric,
    NumericalInconsistency,
    SymmetryViolation,
)
from .losses import LossKind, psi
from .optimize import minimize_scalar_convex

__all__ = [
    "Hypothesis",
    "AllBounded",
    "ConstantBounded",
    "HypothesisClass",
    "BestMethod",
    "conditional_error",
    "best_conditional_error",
    "conditional_regret",
    "clipped_regret",
    "generalization_error",
    "best_in_class_error",
    "minimizability_gap",
]

#: regrets in (-REGRET_SLOP, 0) are rounding debris and snap to zero
REGRET_SLOP = 1e-12


@dataclass(frozen=True)
class Hypothesis:
    """A prediction per input id."""

    values: Mapping[str, float]

    def at(self, input_id: str) -> float:
        try:
            return float(self.values[input_id])
        except KeyError:
            raise MissingPrediction(f"no prediction for input {input_id!r}") from None

    @staticmethod
    def constant(value: float, input_ids) -> "Hypothesis":
        v = float(value)
        return Hypothesis({i: v for i in input_ids})


@dataclass(frozen=True)
class AllBounded:
    """All hypotheses with every |prediction| <= bound."""

    bound: float
    grid_size: int = 33

    def __post_init__(self):
        if self.bound <= 0.0:
            raise InvalidSpec("bound must be positive")
        if self.grid_size < 2:
            raise InvalidSpec("grid_size must be >= 2")


@dataclass(frozen=True)
class ConstantBounded:
    """Constant hypotheses h(x) = c with |c| <= bound."""

    bound: float
    grid_size: int = 33

    def __post_init__(self):
        if self.bound <= 0.0:
            raise InvalidSpec("bound must be positive")
        if self.grid_size < 2:
            raise InvalidSpec("grid_size must be >= 2")


HypothesisClass = Union[AllBounded, ConstantBounded]


class BestMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    NUMERIC = "numeric"


def conditional_error(kind: LossKind, prediction: float, cond: Conditional) -> float:
    """Mass-weighted loss of one prediction against a conditional."""
    return float(cond.masses @ psi(kind, float(prediction) - cond.labels))


def best_conditional_error(
    kind: LossKind,
    cond: Conditional,
    method: BestMethod = BestMethod.CLOSED_FORM,
) -> float:
    """Best conditional error over predictions in [-bound, bound].

    CLOSED_FORM evaluates at the symmetry center, which is optimal for
    every supported loss on a symmetric conditional; it raises
    :class:`NotSymmetric` otherwise.  NUMERIC golden-sections the interval
    and works for any conditional (value accurate to ~1e-10).
    """
    if method is BestMethod.CLOSED_FORM:
        try:
            center = check_symmetric(cond)
        except SymmetryViolation as exc:
            raise NotSymmetric(
                f"closed-form best requires a symmetric conditional: {exc}"
            ) from exc
        return conditional_error(kind, center, cond)
    _, value = minimize_scalar_convex(
        lambda c: conditional_error(kind, c, cond), -cond.bound, cond.bound
    )
    return value


def conditional_regret(kind: LossKind, prediction: float, cond: Conditional) -> float:
    """C(prediction) - C*(closed form), clamped at zero.

    A value below ``-REGRET_SLOP`` means the claimed optimum was beaten,
    which for a symmetric conditional is impossible in exact arithmetic;
    that raises :class:`NumericalInconsistency` rather than being hidden.
    """
    raw = conditional_error(kind, prediction, cond) - best_conditional_error(
        kind, cond, BestMethod.CLOSED_FORM
    )
    if raw < -REGRET_SLOP:
        raise NumericalInconsistency(
            f"conditional error {raw} below the closed-form optimum for {kind}"
        )
    return max(raw, 0.0)


def clipped_regret(regret: float, eps: float) -> float:
    """Regret if it strictly exceeds ``eps``, else exactly zero."""
    if eps < 0.0:
        raise InvalidSpec("eps must be >= 0")
    return regret if regret > eps else 0.0


def generalization_error(kind: LossKind, h: Hypothesis, dist: FiniteDistribution) -> float:
    """Weighted conditional error of ``h`` over the distribution support."""
    return sum(
        p.weight * conditional_error(kind, h.at(p.input_id), p.cond)
        for p in dist.points
    )


def best_in_class_error(
    kind: LossKind, hclass: HypothesisClass, dist: FiniteDistribution
) -> float:
    """Infimum of the generalization error over the hypothesis class.

    AllBounded decomposes per input (each prediction is free), so the
    infimum is the weighted sum of per-input numeric minima.  For
    ConstantBounded one shared value is optimized against the weighted
    mixture of conditionals.
    """
    if hclass.bound <= 0.0:
        raise InvalidSpec("hypothesis class bound must be positive")
    if isinstance(hclass, AllBounded):
        total = 0.0
        for p in dist.points:
            _, value = minimize_scalar_convex(
                lambda c, cond=p.cond: conditional_error(kind, c, cond),
                -hclass.bound,
                hclass.bound,
            )
            total += p.weight * value
        return total

    def mixture(c: float) -> float:
        return sum(p.weight * conditional_error(kind, c, p.cond) for p in dist.points)

    _, value = minimize_scalar_convex(mixture, -hclass.bound, hclass.bound)
    return value


def minimizability_gap(
    kind: LossKind, hclass: HypothesisClass, dist: FiniteDistribution
) -> float:
    """Best-in-class error minus the expected best conditional error.

    Nonnegative by definition; tiny negative rounding residue is clamped.
    Conditionals must be symmetric (the closed-form per-input best is used).
    """
    expected_best = sum(
        p.weight * best_conditional_error(kind, p.cond, BestMethod.CLOSED_FORM)
        for p in dist.points
    )
    return max(best_in_class_error(kind, hclass, dist) - expected_best, 0.0)


def hypothesis_in_class(h: Hypothesis, hclass: HypothesisClass, dist: FiniteDistribution) -> bool:
    """Membership test against the distribution's support."""
    values = [h.at(i) for i in dist.input_ids]
    if any(abs(v) > hclass.bound + REGRET_SLOP for v in values):
        return False
    if isinstance(hclass, ConstantBounded):
        return max(values) - min(values) == 0.0
    return True
