"""Grid verification of the pairwise convexity-deficit lower bounds.

Each comparison transform in :mod:`surreg.bounds` rests on an elementary
two-point inequality: for a loss psi, the symmetrized deviation

    F(x, y) = (psi(x + y) + psi(x - y)) / 2 - psi(y)

dominates an explicit function of x on a stated (x, y) domain.  The
lemmas here pin those lower bounds and sweep them over dense grids; a
negative deviation beyond tolerance is a genuine counterexample to the
downstream transform, which is why the check is exposed on the CLI with
a distinct failure exit code.

Lower bounds verified (x is the evaluation offset, y the anchor):

* Huber(delta), |x| <= r, |y| <= min(delta, r):  F >= min(delta/(2r), 1/4) * x^2
* |t|^p with p >= 2, |x|, |y| <= r:              F >= |x|^p
* |t|^p with 1 < p <= 2, |x|, |y| <= r:          F >= p(p-1)/2 * (2r)^(p-2) * x^2
* sq-eps(eps), any x, |y| >= eps:                F >= x^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainViolation, InvalidSpec
from .losses import LossKind, psi

__all__ = [
    "HuberF",
    "LpClarkson",
    "LpLowF",
    "SqEpsF",
    "Lemma",
    "pair_deviation",
    "check_lemma_grid",
    "default_grid",
    "GridReport",
    "DEVIATION_TOL",
]

#: deviations below -DEVIATION_TOL count as violations
DEVIATION_TOL = 1e-10


@dataclass(frozen=True)
class HuberF:
    """F(x, y) >= min(delta / (2 * radius), 1/4) * x^2 on |x| <= radius, |y| <= min(delta, radius)."""

    delta: float
    radius: float

    def __post_init__(self):
        if self.delta <= 0.0 or self.radius <= 0.0:
            raise InvalidSpec("delta and radius must be positive")

    @property
    def kind(self) -> LossKind:
        return LossKind.huber(self.delta)

    def lower(self, x: np.ndarray) -> np.ndarray:
        return min(self.delta / (2.0 * self.radius), 0.25) * x**2

    def domain(self) -> tuple[float, float, float, float]:
        return (-self.radius, self.radius, -min(self.delta, self.radius), min(self.delta, self.radius))


@dataclass(frozen=True)
class LpClarkson:
    """F(x, y) >= |x|^p for p >= 2 (superadditive two-point mean), |x|, |y| <= radius."""

    p: float
    radius: float = 1.0

    def __post_init__(self):
        if self.p < 2.0:
            raise InvalidSpec("clarkson form needs p >= 2")
        if self.radius <= 0.0:
            raise InvalidSpec("radius must be positive")

    @property
    def kind(self) -> LossKind:
        return LossKind.lp(self.p)

    def lower(self, x: np.ndarray) -> np.ndarray:
        return np.abs(x) ** self.p

    def domain(self) -> tuple[float, float, float, float]:
        r = self.radius
        return (-r, r, -r, r)


@dataclass(frozen=True)
class LpLowF:
    """F(x, y) >= p(p-1)/2 * (2 * radius)^(p-2) * x^2 for 1 < p <= 2 on |x|, |y| <= radius."""

    p: float
    radius: float

    def __post_init__(self):
        if not 1.0 < self.p <= 2.0:
            raise InvalidSpec("low-exponent form needs p in (1, 2]")
        if self.radius <= 0.0:
            raise InvalidSpec("radius must be positive")

    @property
    def kind(self) -> LossKind:
        return LossKind.lp(self.p)

    def lower(self, x: np.ndarray) -> np.ndarray:
        return 0.5 * self.p * (self.p - 1.0) * (2.0 * self.radius) ** (self.p - 2.0) * x**2

    def domain(self) -> tuple[float, float, float, float]:
        r = self.radius
        return (-r, r, -r, r)


@dataclass(frozen=True)
class SqEpsF:
    """F(x, y) >= x^2 whenever |y| >= eps (any x)."""

    eps: float

    def __post_init__(self):
        if self.eps <= 0.0:
            raise InvalidSpec("eps must be positive")

    @property
    def kind(self) -> LossKind:
        return LossKind.sq_eps_insensitive(self.eps)

    def lower(self, x: np.ndarray) -> np.ndarray:
        return x**2

    def domain(self) -> tuple[float, float, float, float]:
        # unbounded in principle; sweep a box that straddles both kink scales
        span = max(1.0, 4.0 * self.eps)
        return (-span, span, self.eps, self.eps + span)


Lemma = Union[HuberF, LpClarkson, LpLowF, SqEpsF]


def _in_domain(lemma: Lemma, x: float, y: float) -> bool:
    x_lo, x_hi, y_lo, y_hi = lemma.domain()
    if isinstance(lemma, SqEpsF):
        return abs(y) >= lemma.eps
    return x_lo <= x <= x_hi and y_lo <= y <= y_hi


def pair_deviation(lemma: Lemma, x: float, y: float) -> float:
    """F(x, y) - lower(x) at a single point; negative means the bound fails there."""
    if not _in_domain(lemma, x, y):
        raise DomainViolation(f"(x={x}, y={y}) is outside the lemma domain")
    kind = lemma.kind
    f = 0.5 * (float(psi(kind, x + y)) + float(psi(kind, x - y))) - float(psi(kind, y))
    return f - float(lemma.lower(np.asarray(x)))


@dataclass(frozen=True)
class GridReport:
    min_deviation: float
    argmin: tuple[float, float]
    violations: int
    points: int


def default_grid(lemma: Lemma, n: int = 401) -> tuple[np.ndarray, np.ndarray]:
    x_lo, x_hi, y_lo, y_hi = lemma.domain()
    return np.linspace(x_lo, x_hi, n), np.linspace(y_lo, y_hi, n)


def check_lemma_grid(
    lemma: Lemma,
    xs: np.ndarray | None = None,
    ys: np.ndarray | None = None,
    n: int = 401,
) -> GridReport:
    """Sweep F - lower over the grid; report the worst deviation found."""
    if xs is None or ys is None:
        gx, gy = default_grid(lemma, n)
        xs = gx if xs is None else np.asarray(xs, dtype=float)
        ys = gy if ys is None else np.asarray(ys, dtype=float)
    else:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
    kind = lemma.kind
    X = xs[:, None]
    Y = ys[None, :]
    F = 0.5 * (psi(kind, X + Y) + psi(kind, X - Y)) - psi(kind, Y)
    dev = F - lemma.lower(X)
    flat = int(np.argmin(dev))
    i, j = np.unravel_index(flat, dev.shape)
    return GridReport(
        min_deviation=float(dev[i, j]),
        argmin=(float(xs[i]), float(ys[j])),
        violations=int(np.count_nonzero(dev < -DEVIATION_TOL)),
        points=dev.size,
    )
