"""Regression losses on the residual t = prediction - label.

Five families, all convex, even, and nonnegative with psi(0) = 0:

    squared             t^2
    lp (p >= 1)         |t|^p
    huber (delta > 0)   t^2/2 on |t| <= delta, else delta*|t| - delta^2/2
    eps (eps > 0)       max(|t| - eps, 0)
    sqeps (eps > 0)     max(t^2 - eps^2, 0)

Subgradients returned by :func:`loss_subgradient` are the minimal-norm
element of the subdifferential, so kinks and the flat tube interior map
to 0 exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec

__all__ = [
    "LossFamily",
    "LossKind",
    "loss_value",
    "loss_subgradient",
    "loss_upper_bound",
    "parse_loss_tag",
]


class LossFamily(enum.Enum):
    SQUARED = "squared"
    LP = "lp"
    HUBER = "huber"
    EPS = "eps"
    SQEPS = "sqeps"


@dataclass(frozen=True)
class LossKind:
    """One concrete loss: a family plus its scalar parameter (if any)."""

    family: LossFamily
    param: float | None = None

    def __post_init__(self):
        fam, par = self.family, self.param
        if fam is LossFamily.SQUARED:
            if par is not None:
                raise InvalidSpec("squared loss takes no parameter")
        elif par is None or not math.isfinite(par):
            raise InvalidSpec(f"{fam.value} loss needs a finite parameter")
        elif fam is LossFamily.LP:
            if par < 1.0:
                raise InvalidSpec(f"lp exponent must be >= 1, got {par}")
        elif par <= 0.0:
            raise InvalidSpec(f"{fam.value} parameter must be positive, got {par}")

    @staticmethod
    def squared() -> "LossKind":
        return LossKind(LossFamily.SQUARED)

    @staticmethod
    def lp(p: float) -> "LossKind":
        return LossKind(LossFamily.LP, float(p))

    @staticmethod
    def huber(delta: float) -> "LossKind":
        return LossKind(LossFamily.HUBER, float(delta))

    @staticmethod
    def eps_insensitive(eps: float) -> "LossKind":
        return LossKind(LossFamily.EPS, float(eps))

    @staticmethod
    def sq_eps_insensitive(eps: float) -> "LossKind":
        return LossKind(LossFamily.SQEPS, float(eps))

    def tag(self) -> str:
        """Serialize to the loss-tag grammar used by configs and the CLI."""
        if self.family is LossFamily.SQUARED:
            return "squared"
        return f"{self.family.value}:{self.param:g}"

    def __str__(self) -> str:
        return self.tag()


def parse_loss_tag(tag: str) -> LossKind:
    """Parse ``"squared"``, ``"lp:3.0"``, ``"huber:0.2"``, ``"eps:0.1"``, ``"sqeps:0.1"``."""
    text = tag.strip()
    if text == "squared":
        return LossKind.squared()
    name, sep, rest = text.partition(":")
    if not sep:
        raise InvalidSpec(f"loss tag {tag!r} needs a parameter, e.g. 'huber:0.5'")
    try:
        par = float(rest)
    except ValueError as exc:
        raise InvalidSpec(f"bad loss parameter in tag {tag!r}") from exc
    builders = {
        "lp": LossKind.lp,
        "huber": LossKind.huber,
        "eps": LossKind.eps_insensitive,
        "sqeps": LossKind.sq_eps_insensitive,
    }
    if name not in builders:
        raise InvalidSpec(f"unknown loss family {name!r} in tag {tag!r}")
    return builders[name](par)


def psi(kind: LossKind, t):
    """Loss of a residual array (or scalar); vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    fam, par = kind.family, kind.param
    if fam is LossFamily.SQUARED:
        return t * t
    if fam is LossFamily.LP:
        return np.abs(t) ** par
    if fam is LossFamily.HUBER:
        a = np.abs(t)
        return np.where(a <= par, 0.5 * t * t, par * a - 0.5 * par * par)
    if fam is LossFamily.EPS:
        return np.maximum(np.abs(t) - par, 0.0)
    # SQEPS
    return np.maximum(t * t - par * par, 0.0)


def psi_subgradient(kind: LossKind, t):
    """Minimal-norm subgradient of :func:`psi` at residual ``t``; vectorized."""
    t = np.asarray(t, dtype=float)
    fam, par = kind.family, kind.param
    if fam is LossFamily.SQUARED:
        return 2.0 * t
    if fam is LossFamily.LP:
        if par == 1.0:
            return np.sign(t)
        # p > 1: derivative p*|t|^(p-1)*sign(t); 0 at the origin
        return par * np.abs(t) ** (par - 1.0) * np.sign(t)
    if fam is LossFamily.HUBER:
        return np.where(np.abs(t) <= par, t, par * np.sign(t))
    if fam is LossFamily.EPS:
        # flat inside the closed tube, so the kink at |t| = eps maps to 0
        return np.where(np.abs(t) <= par, 0.0, np.sign(t))
    return np.where(np.abs(t) <= par, 0.0, 2.0 * t)


def loss_value(kind: LossKind, prediction: float, label: float) -> float:
    """psi(prediction - label)."""
    return float(psi(kind, float(prediction) - float(label)))


def loss_subgradient(kind: LossKind, prediction: float, label: float) -> float:
    """Minimal-norm subgradient of the loss in its prediction argument."""
    return float(psi_subgradient(kind, float(prediction) - float(label)))


def loss_upper_bound(kind: LossKind, bound: float) -> float:
    """Largest loss value reachable when both |prediction| and |label| <= bound.

    Every family is even and nondecreasing in |t|, so the supremum over
    residuals |t| <= 2*bound is the value at 2*bound.
    """
    if bound <= 0.0 or not math.isfinite(bound):
        raise InvalidSpec(f"bound must be positive and finite, got {bound}")
    return float(psi(kind, 2.0 * bound))
