"""Finite label distributions over a handful of inputs.

A :class:`Conditional` is a finite label distribution for one input: sorted
atoms ``(label, mass)`` with masses summing to one and every label inside
``[-bound, bound]``.  A :class:`FiniteDistribution` attaches a weighted
conditional to each input id.

Symmetry is the load-bearing structural property: a conditional is
symmetric when mirroring every atom through the conditional mean lands on
an atom of equal mass.  :func:`check_symmetric` verifies exactly that and
returns the center, so callers never assume symmetry they did not test.

The worst-case masses consumed by the bound machinery live here too:
:func:`p_min` computes, over inputs, the smallest conditional mass of
either a Huber-style window ``0 <= mean - y <= delta`` or a tail
``mean - y >= eps``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidDistribution, SymmetryViolation

__all__ = [
    "Conditional",
    "DistPoint",
    "FiniteDistribution",
    "HuberWindow",
    "EpsTail",
    "GeneratorConfig",
    "conditional_mean",
    "check_symmetric",
    "p_min",
    "random_symmetric_distribution",
    "load_distribution",
    "distribution_to_config",
]

MASS_TOL = 1e-12
#: slop when counting atoms sitting exactly on a window or tail edge
EDGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Conditional:
    """Finite label distribution for a single input."""

    labels: np.ndarray
    masses: np.ndarray
    bound: float

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "masses", masses)
        if labels.ndim != 1 or labels.shape != masses.shape or labels.size == 0:
            raise InvalidDistribution("labels and masses must be equal-length 1-d", "cond")
        if not (np.all(np.isfinite(labels)) and np.all(np.isfinite(masses))):
            raise InvalidDistribution("labels and masses must be finite", "cond")
        if np.any(np.diff(labels) <= 0.0):
            raise InvalidDistribution("labels must be strictly increasing", "cond")
        if np.any(masses <= 0.0):
            raise InvalidDistribution("every mass must be positive", "cond")
        if abs(float(masses.sum()) - 1.0) > MASS_TOL:
            raise InvalidDistribution("masses must sum to 1 within 1e-12", "cond")
        if self.bound <= 0.0 or not math.isfinite(self.bound):
            raise InvalidDistribution("bound must be positive and finite", "cond")
        if float(np.abs(labels).max()) > self.bound + EDGE_TOL:
            raise InvalidDistribution("every |label| must be <= bound", "cond")

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.labels.tolist(), self.masses.tolist()))

    def mean(self) -> float:
        return float(self.labels @ self.masses)


def conditional_mean(cond: Conditional) -> float:
    """Mass-weighted mean label."""
    return cond.mean()


def _mirror_mismatch(cond: Conditional, tol: float) -> float | None:
    """First label whose mirror through the mean is absent or mass-mismatched."""
    center = cond.mean()
    labels, masses = cond.labels, cond.masses
    for y, m in zip(labels, masses):
        want = 2.0 * center - y
        j = int(np.searchsorted(labels, want))
        hit = None
        for k in (j - 1, j, j + 1):
            if 0 <= k < labels.size and abs(labels[k] - want) <= tol:
                hit = k
                break
        if hit is None or abs(masses[hit] - m) > tol:
            return float(y)
    return None


def check_symmetric(cond: Conditional, tol: float = 1e-12) -> float:
    """Return the symmetry center (the mean) or raise :class:`SymmetryViolation`.

    Verifies that for every atom ``(y, m)`` the mirrored label
    ``2*center - y`` is present within ``tol`` and carries a mass within
    ``tol`` of ``m``.  The center is computed, never assumed, so a config
    claiming symmetry about some other point is caught here.
    """
    bad = _mirror_mismatch(cond, tol)
    if bad is not None:
        raise SymmetryViolation(
            f"atom at label {bad} has no mirror of equal mass about {cond.mean():.17g}",
            label=bad,
        )
    return cond.mean()


def is_symmetric(cond: Conditional, tol: float = 1e-12) -> bool:
    return _mirror_mismatch(cond, tol) is None


@dataclass(frozen=True, eq=False)
class DistPoint:
    """One weighted input with its conditional label distribution."""

    input_id: str
    weight: float
    cond: Conditional


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Finitely supported input distribution with per-input conditionals."""

    points: tuple[DistPoint, ...]
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise InvalidDistribution("at least one point required", "points")
        ids = [p.input_id for p in self.points]
        if len(set(ids)) != len(ids):
            raise InvalidDistribution("input ids must be unique", "points")
        total = 0.0
        for i, p in enumerate(self.points):
            if p.weight <= 0.0 or not math.isfinite(p.weight):
                raise InvalidDistribution("weight must be positive", f"points[{i}].weight")
            if p.cond.bound != self.bound:
                raise InvalidDistribution(
                    "conditional bound must equal the distribution bound",
                    f"points[{i}].cond",
                )
            total += p.weight
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidDistribution("weights must sum to 1 within 1e-12", "points")

    @property
    def input_ids(self) -> list[str]:
        return [p.input_id for p in self.points]


@dataclass(frozen=True)
class HuberWindow:
    """Window mode for :func:`p_min`: mass of ``0 <= mean - y <= delta``."""

    delta: float


@dataclass(frozen=True)
class EpsTail:
    """Tail mode for :func:`p_min`: mass of ``mean - y >= eps``."""

    eps: float


PMinMode = Union[HuberWindow, EpsTail]


def p_min(dist: FiniteDistribution, mode: PMinMode) -> float:
    """Smallest over inputs of the window (or tail) mass below the mean.

    Every conditional must be symmetric; the offsets are measured from the
    verified center.  Atoms within ``EDGE_TOL`` of a window edge count as
    inside, so an atom at the center itself always lands in a Huber window.
    """
    worst = 1.0
    for point in dist.points:
        center = check_symmetric(point.cond)
        offs = center - point.cond.labels
        if isinstance(mode, HuberWindow):
            inside = (offs >= -EDGE_TOL) & (offs <= mode.delta + EDGE_TOL)
        else:
            inside = offs >= mode.eps - EDGE_TOL
        worst = min(worst, float(point.cond.masses[inside].sum()))
    return worst


@dataclass(frozen=True)
class GeneratorConfig:
    """Shape limits for :func:`random_symmetric_distribution`."""

    max_inputs: int
    max_atoms: int
    bound: float

    def __post_init__(self):
        if self.max_inputs < 1 or self.max_atoms < 1:
            raise InvalidDistribution("max_inputs and max_atoms must be >= 1", "cfg")
        if self.bound <= 0.0:
            raise InvalidDistribution("bound must be positive", "cfg")


def _random_symmetric_conditional(rng: np.random.Generator, cfg: GeneratorConfig) -> Conditional:
    bound = cfg.bound
    center = float(rng.uniform(-bound / 2.0, bound / 2.0))
    # keep a construction margin so rounded labels stay strictly inside the bound
    amax = (bound - abs(center)) * 0.999
    if cfg.max_atoms == 1:
        return Conditional(np.array([center]), np.array([1.0]), bound)
    n_pairs = int(rng.integers(1, cfg.max_atoms // 2 + 1))
    with_center = (cfg.max_atoms - 2 * n_pairs >= 1) and bool(rng.random() < 0.5)
    while True:
        offsets = np.sort(rng.uniform(0.05 * amax, amax, size=n_pairs))
        if n_pairs < 2 or float(np.diff(offsets).min()) > 1e-6 * amax:
            break
    pair_w = rng.uniform(0.1, 1.0, size=n_pairs)
    center_w = float(rng.uniform(0.1, 1.0)) if with_center else 0.0
    total = 2.0 * float(pair_w.sum()) + center_w
    pair_m = pair_w / total

    labels = [center - a for a in offsets[::-1]]
    masses = list(pair_m[::-1])
    if with_center:
        labels.append(center)
        masses.append(center_w / total)
    labels.extend(center + a for a in offsets)
    masses.extend(pair_m)
    return Conditional(np.array(labels), np.array(masses), bound)


def random_symmetric_distribution(seed: int, cfg: GeneratorConfig) -> FiniteDistribution:
    """Seeded random distribution whose conditionals are all symmetric.

    Per input: a center in ``[-bound/2, bound/2]``, between 1 and
    ``max_atoms // 2`` equal-mass mirrored pairs, and (when an atom slot
    remains) a center atom with probability one half.  ``max_atoms == 1``
    degenerates to a deterministic label at the center.
    """
    rng = np.random.default_rng(seed)
    n_inputs = int(rng.integers(1, cfg.max_inputs + 1))
    weights = rng.uniform(0.2, 1.0, size=n_inputs)
    weights = weights / weights.sum()
    points = tuple(
        DistPoint(f"x{i}", float(weights[i]), _random_symmetric_conditional(rng, cfg))
        for i in range(n_inputs)
    )
    return FiniteDistribution(points, cfg.bound)


# -- JSON config round trip -------------------------------------------------

def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidDistribution(f"expected a number, got {value!r}", path)
    return float(value)


def load_distribution(source: Union[str, Path, dict]) -> FiniteDistribution:
    """Build a :class:`FiniteDistribution` from a config dict or JSON file.

    Schema::

        {"B": 1.0,
         "points": [{"id": "x0", "weight": 1.0, "cond": [[-1.0, 0.5], [1.0, 0.5]]}]}

    The first invariant violation is reported with its config path, e.g.
    ``points[0].cond[2]``.
    """
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidDistribution(f"invalid JSON: {exc}", str(source)) from exc
    else:
        raw = source
    if not isinstance(raw, dict):
        raise InvalidDistribution("config must be a JSON object", "$")
    if "B" not in raw:
        raise InvalidDistribution("missing key", "B")
    bound = _as_number(raw["B"], "B")
    pts = raw.get("points")
    if not isinstance(pts, list) or not pts:
        raise InvalidDistribution("points must be a non-empty list", "points")

    points = []
    for i, entry in enumerate(pts):
        where = f"points[{i}]"
        if not isinstance(entry, dict):
            raise InvalidDistribution("point must be an object", where)
        pid = entry.get("id")
        if not isinstance(pid, str) or not pid:
            raise InvalidDistribution("id must be a non-empty string", f"{where}.id")
        weight = _as_number(entry.get("weight"), f"{where}.weight")
        atoms = entry.get("cond")
        if not isinstance(atoms, list) or not atoms:
            raise InvalidDistribution("cond must be a non-empty list", f"{where}.cond")
        labels, masses = [], []
        for j, atom in enumerate(atoms):
            apath = f"{where}.cond[{j}]"
            if not isinstance(atom, (list, tuple)) or len(atom) != 2:
                raise InvalidDistribution("atom must be a [label, mass] pair", apath)
            label = _as_number(atom[0], apath)
            mass = _as_number(atom[1], apath)
            if mass <= 0.0:
                raise InvalidDistribution("mass must be positive", apath)
            if abs(label) > bound + EDGE_TOL:
                raise InvalidDistribution(f"|label| exceeds B={bound}", apath)
            if labels and label <= labels[-1]:
                raise InvalidDistribution("labels must be strictly increasing", apath)
            labels.append(label)
            masses.append(mass)
        if abs(sum(masses) - 1.0) > MASS_TOL:
            raise InvalidDistribution("masses must sum to 1 within 1e-12", f"{where}.cond")
        try:
            cond = Conditional(np.array(labels), np.array(masses), bound)
        except InvalidDistribution as exc:
            raise InvalidDistribution(str(exc), f"{where}.cond") from exc
        points.append(DistPoint(pid, weight, cond))

    try:
        return FiniteDistribution(tuple(points), bound)
    except InvalidDistribution:
        raise


def distribution_to_config(dist: FiniteDistribution) -> dict:
    """Inverse of :func:`load_distribution` (exact float round trip via repr)."""
    return {
        "B": dist.bound,
        "points": [
            {
                "id": p.input_id,
                "weight": p.weight,
                "cond": [[float(y), float(m)] for y, m in p.cond.atoms],
            }
            for p in dist.points
        ],
    }
