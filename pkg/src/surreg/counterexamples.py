"""Constructions showing where surrogate control of squared error breaks.

Each construction is a single-input distribution with two equally likely
labels ``y`` and ``2*mu - y`` (symmetric around ``mu``) together with a
witness prediction that is *surrogate-optimal* yet has strictly positive
squared-error regret.  They certify:

* ``huber``: with all label mass farther than delta from the mean, the
  conditional Huber risk is flat on an interval around the mean, so no
  window-mass-free comparison inequality can exist.
* ``sqeps`` / ``eps-near``: with all mass strictly inside the eps tube,
  the conditional risk vanishes on a whole interval.
* ``eps-far``: with mass outside the tube, the eps-insensitive risk is
  flat between the atoms, ruling out any comparison inequality for that
  loss even with tail-mass qualifiers.

``build_counterexample`` validates the regime conditions, evaluates both
sides through the ordinary risk machinery and returns a confirmed record.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .conditional import conditional_error, conditional_regret
from .distributions import Conditional, DistPoint, FiniteDistribution
from .errors import InvalidParams
from .losses import LossKind

__all__ = [
    "TheoremTag",
    "CounterexampleParams",
    "Counterexample",
    "build_counterexample",
    "EQUALITY_TOL",
]

#: witness and optimum surrogate errors must agree this tightly
EQUALITY_TOL = 1e-12

_FAR_TAGS = frozenset({"huber", "eps-far"})
_NEAR_TAGS = frozenset({"sqeps", "eps-near"})


class TheoremTag(enum.Enum):
    HUBER = "huber"
    SQEPS = "sqeps"
    EPS_FAR = "eps-far"
    EPS_NEAR = "eps-near"


@dataclass(frozen=True)
class CounterexampleParams:
    """Geometry of one construction.

    ``y`` is the lower label, ``mu`` the conditional mean (the upper
    label is its mirror image ``2*mu - y``), ``param`` the loss
    parameter (delta or eps).
    """

    bound: float
    y: float
    mu: float
    param: float


@dataclass(frozen=True)
class Counterexample:
    theorem: TheoremTag
    params: CounterexampleParams
    surrogate: LossKind
    dist: FiniteDistribution
    center: float
    witness: float
    surrogate_error_center: float
    surrogate_error_witness: float
    squared_regret: float
    confirmed: bool

    @property
    def regime_margin(self) -> float:
        """Distance from the regime boundary; the squared regret equals its square."""
        return abs((self.params.mu - self.params.y) - self.params.param)


def _validate(tag: TheoremTag, p: CounterexampleParams) -> None:
    B, y, mu, param = p.bound, p.y, p.mu, p.param
    if not (math.isfinite(B) and B > 0.0):
        raise InvalidParams(f"bound must be positive and finite, got {B}")
    if param <= 0.0 or not math.isfinite(param):
        raise InvalidParams(f"loss parameter must be positive, got {param}")
    if y < -B:
        raise InvalidParams(f"lower label {y} lies below -bound")
    if not y < mu:
        raise InvalidParams(f"need y < mu, got y={y}, mu={mu}")
    if mu > B:
        raise InvalidParams(f"mean {mu} exceeds bound {B}")
    if 2.0 * mu - y > B:
        raise InvalidParams(f"mirrored label {2.0 * mu - y} exceeds bound {B}")
    s = mu - y
    if tag.value in _FAR_TAGS and not s > param:
        raise InvalidParams(
            f"{tag.value} needs the atoms outside the parameter scale: "
            f"mu - y = {s} must exceed {param}"
        )
    if tag.value in _NEAR_TAGS and not s < param:
        raise InvalidParams(
            f"{tag.value} needs the atoms inside the parameter scale: "
            f"mu - y = {s} must be below {param}"
        )
    if y + param > B:
        raise InvalidParams(f"witness prediction {y + param} exceeds bound {B}")


def _surrogate_for(tag: TheoremTag, param: float) -> LossKind:
    if tag is TheoremTag.HUBER:
        return LossKind.huber(param)
    if tag is TheoremTag.SQEPS:
        return LossKind.sq_eps_insensitive(param)
    return LossKind.eps_insensitive(param)


def build_counterexample(
    theorem: TheoremTag | str, params: CounterexampleParams
) -> Counterexample:
    """Build and confirm one construction; raises InvalidParams off-regime."""
    tag = TheoremTag(theorem) if not isinstance(theorem, TheoremTag) else theorem
    _validate(tag, params)

    upper = 2.0 * params.mu - params.y
    cond = Conditional(
        labels=np.array([params.y, upper]),
        masses=np.array([0.5, 0.5]),
        bound=params.bound,
    )
    dist = FiniteDistribution(
        points=(DistPoint("x0", 1.0, cond),), bound=params.bound
    )
    surrogate = _surrogate_for(tag, params.param)

    witness = params.y + params.param
    err_center = conditional_error(surrogate, params.mu, cond)
    err_witness = conditional_error(surrogate, witness, cond)
    sq_regret = conditional_regret(LossKind.squared(), witness, cond)
    confirmed = abs(err_center - err_witness) <= EQUALITY_TOL and sq_regret > 0.0
    return Counterexample(
        theorem=tag,
        params=params,
        surrogate=surrogate,
        dist=dist,
        center=params.mu,
        witness=witness,
        surrogate_error_center=err_center,
        surrogate_error_witness=err_witness,
        squared_regret=sq_regret,
        confirmed=confirmed,
    )
