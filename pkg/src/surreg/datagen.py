"""Synthetic regression data with symmetric noise, plus CSV round-trip.

Labels are generated as a bounded linear function of uniform features
plus zero-mean symmetric noise, with the truth vector rescaled so that
every label provably stays inside the configured bound: the clean signal
magnitude is capped at 90% of (bound - noise amplitude).  Configurations
whose noise amplitude reaches the bound are rejected outright.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Union

import numpy as np

from .adversarial import Dataset, LinearModel
from .errors import ConfigInfeasible, DimensionMismatch, InvalidSpec, ParseError

__all__ = [
    "TwoPoint",
    "UniformSym",
    "TwoPointWithOutliers",
    "NoiseSpec",
    "SynthConfig",
    "SynthResult",
    "make_synthetic",
    "save_csv_dataset",
    "load_csv_dataset",
]


@dataclass(frozen=True)
class TwoPoint:
    """Noise is +-a with equal probability."""

    a: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise InvalidSpec("noise scale must be positive")

    @property
    def amplitude(self) -> float:
        return self.a

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return self.a * (rng.integers(0, 2, size=m) * 2.0 - 1.0)


@dataclass(frozen=True)
class UniformSym:
    """Noise is uniform on [-a, a]."""

    a: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise InvalidSpec("noise scale must be positive")

    @property
    def amplitude(self) -> float:
        return self.a

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return rng.uniform(-self.a, self.a, size=m)


@dataclass(frozen=True)
class TwoPointWithOutliers:
    """+-a noise, but a fraction of points get magnitude a * scale instead."""

    a: float
    frac: float
    scale: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise InvalidSpec("noise scale must be positive")
        if not 0.0 <= self.frac <= 1.0:
            raise InvalidSpec("outlier fraction must be in [0, 1]")
        if self.scale < 1.0:
            raise InvalidSpec("outlier scale must be >= 1")

    @property
    def amplitude(self) -> float:
        return self.a * self.scale

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        signs = rng.integers(0, 2, size=m) * 2.0 - 1.0
        magnitude = np.where(rng.random(m) < self.frac, self.a * self.scale, self.a)
        return signs * magnitude


NoiseSpec = Union[TwoPoint, UniformSym, TwoPointWithOutliers]


@dataclass(frozen=True)
class SynthConfig:
    seed: int
    d: int
    m: int
    bound: float
    noise: NoiseSpec

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise InvalidSpec("d and m must be >= 1")
        if self.bound <= 0.0:
            raise InvalidSpec("bound must be positive")


@dataclass(frozen=True, eq=False)
class SynthResult:
    data: Dataset
    truth: LinearModel
    amplitude: float


def make_synthetic(config: SynthConfig) -> SynthResult:
    """Deterministic synthetic dataset; all labels lie strictly inside the bound."""
    amp = config.noise.amplitude
    if config.bound <= amp:
        raise ConfigInfeasible(
            f"noise amplitude {amp} leaves no room inside bound {config.bound}"
        )
    rng = np.random.default_rng(config.seed)
    X = rng.uniform(-1.0, 1.0, size=(config.m, config.d))
    w = rng.normal(size=config.d)
    b = float(rng.normal())
    raw = float(np.abs(w).sum() + abs(b))
    target = 0.9 * (config.bound - amp)
    w *= target / raw
    b *= target / raw
    truth = LinearModel(weights=w, bias=b)
    y = truth.predict(X) + config.noise.sample(rng, config.m)
    return SynthResult(data=Dataset(X=X, y=y), truth=truth, amplitude=amp)


def save_csv_dataset(path, data: Dataset) -> None:
    """Header f0..f{d-1},y; floats written with repr for exact round-trip."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{j}" for j in range(data.n_features)] + ["y"])
        for xi, yi in zip(data.X, data.y):
            writer.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


def load_csv_dataset(path) -> Dataset:
    """Inverse of save_csv_dataset; errors carry 1-based row/column positions."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", row=1, col=1) from None
        width = len(header)
        if width < 2:
            raise ParseError("header needs >= 1 feature column and a label", row=1, col=1)
        rows = []
        for i, row in enumerate(reader, start=2):
            if len(row) != width:
                raise DimensionMismatch(
                    f"row {i} has {len(row)} fields, header has {width}"
                )
            vals = []
            for j, cell in enumerate(row, start=1):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"not a number: {cell!r}", row=i, col=j
                    ) from None
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows", row=2, col=1)
    arr = np.array(rows)
    return Dataset(X=arr[:, :-1], y=arr[:, -1])
