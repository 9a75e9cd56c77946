"""Linear regression under norm-bounded feature perturbations.

For a linear model (w, b) and a perturbation budget gamma in norm q, the
worst-case squared error at (x, y) has the closed form

    sup_{|v|_q <= gamma} ((x + v) . w + b - y)^2 = (|r| + gamma * |w|_*)^2

with r the clean residual and |.|_* the dual norm.  Two training
objectives are provided:

* :class:`SmoothAdvObjective` -- a surrogate loss of the residual plus
  ``tau * gamma * |w|_*``, the additive relaxation of the worst case;
* :class:`AdvSqObjective` -- the exact worst-case squared error above.

Both are convex.  :func:`train` minimizes them with an accelerated
proximal gradient method (backtracking line search, momentum restarts).
Nonsmooth pieces are handled two ways: penalty terms that admit a cheap
proximal map are kept exact, while kinked loss terms are smoothed with a
decreasing sequence of smoothing widths, warm-starting each stage.  All
randomness comes from the solver seed, so runs are reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, NonConvergence
from .losses import LossFamily, LossKind, psi

__all__ = [
    "LinearModel",
    "PerturbNorm",
    "dual_norm",
    "smoothness_term",
    "adv_squared_loss",
    "smooth_adv_loss",
    "Dataset",
    "SmoothAdvObjective",
    "AdvSqObjective",
    "Objective",
    "SolverConfig",
    "TrainResult",
    "train",
    "EvalResult",
    "evaluate",
    "MU_STAGES",
]

#: smoothing widths for kinked objectives, largest to smallest
MU_STAGES = (1e-2, 1e-4, 1e-6, 1e-8)


class PerturbNorm(enum.Enum):
    LINF = "linf"
    L2 = "l2"
    L1 = "l1"


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise DimensionMismatch(f"weights must be 1-D, got shape {w.shape}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return X @ self.weights + self.bias


def dual_norm(weights: np.ndarray, norm: PerturbNorm) -> float:
    """Dual of the perturbation norm, evaluated on the weight vector."""
    w = np.asarray(weights, dtype=float)
    if norm is PerturbNorm.LINF:
        return float(np.abs(w).sum())
    if norm is PerturbNorm.L2:
        return float(np.linalg.norm(w))
    return float(np.abs(w).max()) if w.size else 0.0


def smoothness_term(model: LinearModel, gamma: float, norm: PerturbNorm) -> float:
    return gamma * dual_norm(model.weights, norm)


def adv_squared_loss(model, X, y, gamma: float, norm: PerturbNorm):
    """Worst-case squared error under the perturbation budget (exact closed form)."""
    r = model.predict(np.atleast_2d(np.asarray(X, dtype=float))) - np.asarray(y, dtype=float)
    out = (np.abs(r) + smoothness_term(model, gamma, norm)) ** 2
    return float(out[0]) if out.size == 1 and np.isscalar(y) else out


def smooth_adv_loss(
    surrogate: LossKind, model, X, y, gamma: float, norm: PerturbNorm, tau: float
):
    """Surrogate loss of the clean residual plus the scaled smoothness term."""
    r = model.predict(np.atleast_2d(np.asarray(X, dtype=float))) - np.asarray(y, dtype=float)
    out = psi(surrogate, r) + tau * smoothness_term(model, gamma, norm)
    return float(out[0]) if out.size == 1 and np.isscalar(y) else out


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DimensionMismatch(
                f"y must be 1-D with {X.shape[0]} entries, got shape {y.shape}"
            )
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise InvalidSpec("dataset contains non-finite values")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @staticmethod
    def from_rows(rows: Sequence[Sequence[float]]) -> "Dataset":
        """Each row is d feature values followed by the label."""
        arr = np.asarray(list(rows), dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise DimensionMismatch("rows must each hold >= 1 feature and a label")
        return Dataset(X=arr[:, :-1], y=arr[:, -1])

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class SmoothAdvObjective:
    surrogate: LossKind
    gamma: float
    norm: PerturbNorm
    tau: float = 1.0

    def __post_init__(self):
        if self.gamma < 0.0:
            raise InvalidSpec("gamma must be >= 0")
        if self.tau < 0.0:
            raise InvalidSpec("tau must be >= 0")


@dataclass(frozen=True)
class AdvSqObjective:
    gamma: float
    norm: PerturbNorm

    def __post_init__(self):
        if self.gamma < 0.0:
            raise InvalidSpec("gamma must be >= 0")


Objective = Union[SmoothAdvObjective, AdvSqObjective]


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 2000
    step0: float = 1.0
    tol: float = 1e-12
    seed: int = 0
    projection_bound: float | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidSpec("max_iters must be >= 1")
        if self.step0 <= 0.0:
            raise InvalidSpec("step0 must be positive")
        if self.tol <= 0.0:
            raise InvalidSpec("tol must be positive")
        if self.projection_bound is not None and self.projection_bound <= 0.0:
            raise InvalidSpec("projection_bound must be positive when set")


@dataclass(frozen=True, eq=False)
class TrainResult:
    model: LinearModel
    objective_value: float
    iterations: int
    trace: np.ndarray


@dataclass(frozen=True)
class EvalResult:
    clean_mse: float
    robust_mse: float


# -- smoothed primitives ----------------------------------------------------


def _sabs(t, mu):
    """Smooth |t|: sqrt(t^2 + mu^2) - mu; value and derivative."""
    root = np.sqrt(t * t + mu * mu)
    return root - mu, t / root


def _smax(s, mu):
    """Smooth max(s, 0): (s + sqrt(s^2 + mu^2)) / 2; value and derivative."""
    root = np.sqrt(s * s + mu * mu)
    return 0.5 * (s + root), 0.5 * (1.0 + s / root)


def _needs_smoothing(kind: LossKind) -> bool:
    fam = kind.family
    if fam in (LossFamily.EPS, LossFamily.SQEPS):
        return True
    return fam is LossFamily.LP and kind.param < 2.0


def _loss_value_grad(kind: LossKind, t: np.ndarray, mu: float):
    """Value and derivative of the (possibly smoothed) loss of residual t."""
    fam = kind.family
    if fam is LossFamily.SQUARED:
        return t * t, 2.0 * t
    if fam is LossFamily.HUBER:
        d = kind.param
        a = np.abs(t)
        small = a <= d
        val = np.where(small, 0.5 * t * t, d * (a - 0.5 * d))
        grad = np.where(small, t, d * np.sign(t))
        return val, grad
    if fam is LossFamily.LP:
        p = kind.param
        if p >= 2.0:
            a = np.abs(t)
            return a**p, p * a ** (p - 1.0) * np.sign(t)
        if mu == 0.0:
            raise InvalidSpec("p < 2 power loss requires a smoothing width")
        sq = t * t + mu * mu
        return sq ** (p / 2.0) - mu**p, p * t * sq ** (p / 2.0 - 1.0)
    if mu == 0.0:
        raise InvalidSpec(f"{fam.value} loss requires a smoothing width")
    if fam is LossFamily.EPS:
        av, ag = _sabs(t, mu)
        mv, mg = _smax(av - kind.param, mu)
        return mv, mg * ag
    # SQEPS
    mv, mg = _smax(t * t - kind.param**2, mu)
    return mv, mg * 2.0 * t


def _sdual_value_grad(w: np.ndarray, norm: PerturbNorm, mu: float):
    """Smoothed dual norm and its gradient in w."""
    if norm is PerturbNorm.LINF:  # dual is l1
        v, g = _sabs(w, mu)
        return float(v.sum()), g
    if norm is PerturbNorm.L2:
        root = math.sqrt(float(w @ w) + mu * mu)
        return root - mu, w / root
    # dual is l-infinity: log-sum-exp over +/- coordinates
    z = np.concatenate([w, -w]) / mu
    zmax = float(z.max())
    e = np.exp(z - zmax)
    total = float(e.sum())
    val = mu * (zmax + math.log(total))
    p = e / total
    d = w.size
    return val, p[:d] - p[d:]


def _project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    u = np.sort(a)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, u.size + 1)
    ok = u - (css - radius) / ks > 0.0
    rho = int(ks[ok][-1])
    theta = (css[rho - 1] - radius) / rho
    return np.sign(v) * np.maximum(a - theta, 0.0)


def _prox_dual_norm(w: np.ndarray, lam: float, norm: PerturbNorm) -> np.ndarray:
    """prox of lam * (dual norm) at w."""
    if lam <= 0.0:
        return w.copy()
    if norm is PerturbNorm.LINF:  # l1 penalty: soft threshold
        return np.sign(w) * np.maximum(np.abs(w) - lam, 0.0)
    if norm is PerturbNorm.L2:
        nrm = float(np.linalg.norm(w))
        if nrm <= lam:
            return np.zeros_like(w)
        return w * (1.0 - lam / nrm)
    # l-infinity penalty via the Moreau identity with l1-ball projection
    return w - lam * _project_l1_ball(w / lam, 1.0)


# -- objective assembly -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Smooth:
    """Smooth part f with gradient; optional prox-handled penalty g."""

    value: Callable[[np.ndarray], float]
    value_grad: Callable[[np.ndarray], tuple[float, np.ndarray]]
    prox: Callable[[np.ndarray, float], np.ndarray]
    penalty: Callable[[np.ndarray], float]


def _assemble(objective: Objective, data: Dataset, mu: float) -> _Smooth:
    X, y = data.X, data.y
    m = float(len(data))
    d = data.n_features

    if isinstance(objective, SmoothAdvObjective):
        kind, tau_gamma = objective.surrogate, objective.tau * objective.gamma
        norm = objective.norm

        def value(theta):
            r = X @ theta[:d] + theta[d] - y
            val, _ = _loss_value_grad(kind, r, mu)
            return float(val.sum() / m)

        def value_grad(theta):
            r = X @ theta[:d] + theta[d] - y
            val, dv = _loss_value_grad(kind, r, mu)
            grad = np.empty(d + 1)
            grad[:d] = X.T @ dv / m
            grad[d] = float(dv.sum() / m)
            return float(val.sum() / m), grad

        def prox(theta, step):
            out = theta.copy()
            out[:d] = _prox_dual_norm(theta[:d], step * tau_gamma, norm)
            return out

        def penalty(theta):
            return tau_gamma * dual_norm(theta[:d], norm)

        return _Smooth(value, value_grad, prox, penalty)

    gamma, norm = objective.gamma, objective.norm

    def value(theta):
        r = X @ theta[:d] + theta[d] - y
        av, _ = _sabs(r, mu)
        sv, _ = _sdual_value_grad(theta[:d], norm, mu)
        return float(((av + gamma * sv) ** 2).sum() / m)

    def value_grad(theta):
        r = X @ theta[:d] + theta[d] - y
        av, ag = _sabs(r, mu)
        sv, sg = _sdual_value_grad(theta[:d], norm, mu)
        total = av + gamma * sv
        coeff = 2.0 * total * ag
        grad = np.empty(d + 1)
        grad[:d] = X.T @ coeff / m + (2.0 * gamma * float(total.sum()) / m) * sg
        grad[d] = float(coeff.sum() / m)
        return float((total**2).sum() / m), grad

    def prox(theta, step):
        return theta.copy()

    def penalty(theta):
        return 0.0

    return _Smooth(value, value_grad, prox, penalty)


def _fista(parts: _Smooth, theta0, solver: SolverConfig, trace: list):
    """Accelerated proximal gradient with backtracking and function restarts."""
    pb = solver.projection_bound

    def prox(theta, step):
        out = parts.prox(theta, step)
        if pb is not None:
            np.clip(out, -pb, pb, out=out)
        return out

    x = theta0.copy()
    z = x.copy()
    t = 1.0
    L = 1.0 / solver.step0
    fx = parts.value(x) + parts.penalty(x)
    trace.append(fx)
    streak = 0
    iters = 0
    for _ in range(solver.max_iters):
        iters += 1
        fz, g = parts.value_grad(z)
        while True:
            x_new = prox(z - g / L, 1.0 / L)
            diff = x_new - z
            quad = fz + float(g @ diff) + 0.5 * L * float(diff @ diff)
            if parts.value(x_new) <= quad + 1e-15 * max(1.0, abs(quad)):
                break
            L *= 2.0
            if L > 1e18:
                raise NonConvergence(
                    "line search failed to find a descent step",
                    trace=np.array(trace),
                )
        f_new = parts.value(x_new) + parts.penalty(x_new)
        if f_new > fx:
            if t == 1.0:
                # un-accelerated step failed to descend: numerical floor
                return x, fx, iters, True
            # momentum overshoot: drop acceleration, restart from best point
            z = x.copy()
            t = 1.0
            continue
        trace.append(f_new)
        drop = fx - f_new
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new
        L = max(L * 0.95, 1e-12)
        if drop <= solver.tol * max(1.0, abs(f_new)):
            streak += 1
            if streak >= 5:
                return x, fx, iters, True
        else:
            streak = 0
    return x, fx, iters, False


def _exact_objective(objective: Objective, data: Dataset, theta: np.ndarray) -> float:
    d = data.n_features
    model = LinearModel(weights=theta[:d], bias=theta[d])
    if isinstance(objective, SmoothAdvObjective):
        r = model.predict(data.X) - data.y
        pen = objective.tau * smoothness_term(model, objective.gamma, objective.norm)
        return float(psi(objective.surrogate, r).mean()) + pen
    return float(
        np.mean(adv_squared_loss(model, data.X, data.y, objective.gamma, objective.norm))
    )


def train(
    objective: Objective, data: Dataset, solver: SolverConfig = SolverConfig()
) -> TrainResult:
    """Minimize the objective over linear models; deterministic given the seed.

    Raises NonConvergence (with the objective trace attached) if the final
    stage exhausts its iteration budget before the tolerance is met.
    """
    d = data.n_features
    rng = np.random.default_rng(solver.seed)
    theta = np.zeros(d + 1)
    theta[:d] = rng.uniform(-1e-3, 1e-3, size=d)

    if isinstance(objective, AdvSqObjective):
        stages = MU_STAGES
    elif _needs_smoothing(objective.surrogate):
        stages = MU_STAGES
    else:
        stages = (0.0,)

    trace: list[float] = []
    total_iters = 0
    for mu in stages:
        parts = _assemble(objective, data, mu)
        theta, _, iters, converged = _fista(parts, theta, solver, trace)
        total_iters += iters
    if not converged:
        raise NonConvergence(
            f"objective did not converge within {solver.max_iters} iterations "
            f"in the final stage",
            trace=np.array(trace),
        )
    model = LinearModel(weights=theta[:d], bias=theta[d])
    return TrainResult(
        model=model,
        objective_value=_exact_objective(objective, data, theta),
        iterations=total_iters,
        trace=np.array(trace),
    )


def evaluate(
    model: LinearModel, data: Dataset, gamma: float, norm: PerturbNorm
) -> EvalResult:
    """Clean and worst-case mean squared error on a dataset."""
    r = model.predict(data.X) - data.y
    clean = float(np.mean(r * r))
    robust = float(np.mean((np.abs(r) + smoothness_term(model, gamma, norm)) ** 2))
    return EvalResult(clean_mse=clean, robust_mse=robust)
