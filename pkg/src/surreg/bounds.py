"""Comparison bounds between squared-error regret and surrogate regret.

The central inequality checked here relates excess errors across losses on
symmetric bounded distributions: for a hypothesis h, a hypothesis class H,
a surrogate loss L and the squared loss,

    E_sq(h) - E_sq*(H) + M_sq  <=  Gamma( E_L(h) - E_L*(H) + M_L )

where M_* are minimizability gaps and Gamma is a loss-specific concave
transform.  :func:`gamma_transform` evaluates the transform for a given
:class:`BoundSpec`; :func:`verify_bound_instance` assembles both sides for
a concrete (distribution, class, hypothesis, surrogate) instance and
reports the slack.

:func:`check_general_theorem` replays the same conclusion through the
generic comparison route: a per-input premise

    Psi([dC_sq]_eps) <= alpha(h, x) * dC_L        (convex Psi), or
    [dC_sq]_eps      <= Gamma(alpha(h, x) * dC_L) (concave Gamma)

is verified on every support input first, then the aggregated conclusion
is formed with sup_x alpha and the eps bookkeeping term.  The transform
registry is closed (identity, linear, power) so reports stay serializable.

:func:`evaluate_learning_bound` turns the same transform into a
finite-sample guarantee using a Monte-Carlo mesh lower bound of the
empirical Rademacher complexity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .conditional import (
    AllBounded,
    BestMethod,
    ConstantBounded,
    Hypothesis,
    HypothesisClass,
    best_in_class_error,
    conditional_error,
    hypothesis_in_class,
)
from .distributions import (
    EDGE_TOL,
    EpsTail,
    FiniteDistribution,
    HuberWindow,
    check_symmetric,
)
from .errors import BoundInapplicable, InvalidSpec, PremiseFailed
from .losses import LossFamily, LossKind, loss_upper_bound, psi
from .optimize import minimize_scalar_convex

__all__ = [
    "BoundFamily",
    "BoundSpec",
    "BoundComponents",
    "BoundReport",
    "gamma_transform",
    "BoundVerifier",
    "verify_bound_instance",
    "TransformShape",
    "TransformFn",
    "Transform",
    "AlphaMode",
    "GeneralReport",
    "check_general_theorem",
    "natural_general_route",
    "LearningBoundResult",
    "evaluate_learning_bound",
    "SLACK_TOL",
]

#: a bound "holds" when rhs - lhs >= -SLACK_TOL
SLACK_TOL = 1e-8
#: premise checks tolerate this much relative rounding noise
PREMISE_PAD = 1e-9


class BoundFamily(enum.Enum):
    HUBER = "huber"
    LP_LOW = "lp_low"
    LP_HIGH = "lp_high"
    L1 = "l1"
    SQ_EPS = "sq_eps"


@dataclass(frozen=True)
class BoundSpec:
    """Everything :func:`gamma_transform` needs to evaluate one transform.

    ``param`` is delta for HUBER, the exponent for LP_LOW / LP_HIGH and
    eps for SQ_EPS.  ``p_min`` is the worst-case window (HUBER) or tail
    (SQ_EPS) mass.  ``sup_factor`` scales the L1 transform; ``None`` falls
    back to the distribution-free value ``4 * bound``.
    """

    family: BoundFamily
    bound: float
    param: float | None = None
    p_min: float | None = None
    sup_factor: float | None = None

    def __post_init__(self):
        if self.bound <= 0.0 or not math.isfinite(self.bound):
            raise InvalidSpec("bound must be positive and finite")
        fam = self.family
        if fam in (BoundFamily.HUBER, BoundFamily.SQ_EPS):
            if self.param is None or self.param <= 0.0:
                raise InvalidSpec(f"{fam.value} needs a positive parameter")
            if self.p_min is None or not 0.0 < self.p_min <= 1.0:
                raise InvalidSpec(f"{fam.value} needs p_min in (0, 1]")
        elif fam is BoundFamily.LP_LOW:
            if self.param is None or not 1.0 < self.param <= 2.0:
                raise InvalidSpec("lp_low needs an exponent in (1, 2]")
        elif fam is BoundFamily.LP_HIGH:
            if self.param is None or self.param < 2.0:
                raise InvalidSpec("lp_high needs an exponent >= 2")
        else:  # L1
            if self.sup_factor is not None and self.sup_factor < 0.0:
                raise InvalidSpec("l1 sup_factor must be >= 0")


def gamma_transform(spec: BoundSpec, t: float) -> float:
    """Evaluate the concave transform of ``spec`` at surrogate-regret ``t >= 0``."""
    if t < 0.0 or not math.isfinite(t):
        raise InvalidSpec(f"transform argument must be >= 0 and finite, got {t}")
    B = spec.bound
    fam = spec.family
    if fam is BoundFamily.HUBER:
        return max(2.0 * B / spec.param, 2.0) / spec.p_min * t
    if fam is BoundFamily.LP_HIGH:
        return t ** (2.0 / spec.param)
    if fam is BoundFamily.LP_LOW:
        p = spec.param
        return 2.0 / ((8.0 * B) ** (p - 2.0) * p * (p - 1.0)) * t
    if fam is BoundFamily.L1:
        factor = 4.0 * B if spec.sup_factor is None else spec.sup_factor
        return factor * t
    # SQ_EPS
    return t / (2.0 * spec.p_min)


@dataclass(frozen=True)
class BoundComponents:
    target_estimation_error: float
    target_gap: float
    surrogate_estimation_error: float
    surrogate_gap: float


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    slack: float
    holds: bool
    components: BoundComponents
    spec: BoundSpec
    surrogate: LossKind

    def to_dict(self) -> dict:
        return {
            "surrogate": self.surrogate.tag(),
            "family": self.spec.family.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "components": {
                "target_estimation_error": self.components.target_estimation_error,
                "target_gap": self.components.target_gap,
                "surrogate_estimation_error": self.components.surrogate_estimation_error,
                "surrogate_gap": self.components.surrogate_gap,
            },
        }


class TransformShape(enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"


class TransformFn(enum.Enum):
    IDENTITY = "identity"
    LINEAR = "linear"
    POWER = "power"


@dataclass(frozen=True)
class Transform:
    """Closed registry of admissible premise/conclusion transforms.

    Convex members must be nondecreasing with value 0 at 0; the POWER form
    requires exponent >= 1 when convex and in (0, 1] when concave, and the
    LINEAR form a positive coefficient.  Keeping the registry closed makes
    every report reproducible from its serialized parameters.
    """

    shape: TransformShape
    fn: TransformFn
    coeff: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.fn is TransformFn.LINEAR and self.coeff <= 0.0:
            raise InvalidSpec("linear transform needs a positive coefficient")
        if self.fn is TransformFn.POWER:
            if self.shape is TransformShape.CONVEX and self.exponent < 1.0:
                raise InvalidSpec("convex power transform needs exponent >= 1")
            if self.shape is TransformShape.CONCAVE and not 0.0 < self.exponent <= 1.0:
                raise InvalidSpec("concave power transform needs exponent in (0, 1]")

    def __call__(self, t: float) -> float:
        t = max(float(t), 0.0)
        if self.fn is TransformFn.IDENTITY:
            return t
        if self.fn is TransformFn.LINEAR:
            return self.coeff * t
        return t ** self.exponent

    def inverse(self, v: float) -> float:
        v = max(float(v), 0.0)
        if self.fn is TransformFn.IDENTITY:
            return v
        if self.fn is TransformFn.LINEAR:
            return v / self.coeff
        return v ** (1.0 / self.exponent)

    # shorthand constructors
    @staticmethod
    def convex_identity() -> "Transform":
        return Transform(TransformShape.CONVEX, TransformFn.IDENTITY)

    @staticmethod
    def convex_linear(coeff: float) -> "Transform":
        return Transform(TransformShape.CONVEX, TransformFn.LINEAR, coeff=coeff)

    @staticmethod
    def convex_power(exponent: float) -> "Transform":
        return Transform(TransformShape.CONVEX, TransformFn.POWER, exponent=exponent)

    @staticmethod
    def concave_identity() -> "Transform":
        return Transform(TransformShape.CONCAVE, TransformFn.IDENTITY)

    @staticmethod
    def concave_linear(coeff: float) -> "Transform":
        return Transform(TransformShape.CONCAVE, TransformFn.LINEAR, coeff=coeff)

    @staticmethod
    def concave_power(exponent: float) -> "Transform":
        return Transform(TransformShape.CONCAVE, TransformFn.POWER, exponent=exponent)


class AlphaMode(enum.Enum):
    """Per-input scaling factor used by the general comparison route."""

    ONE = "one"
    HUBER_WINDOW = "huber_window"
    EPS_TAIL = "eps_tail"


@dataclass(frozen=True)
class GeneralReport:
    lhs: float
    rhs: float
    slack: float
    holds: bool
    sup_alpha: float
    eps: float
    solved_rhs: float
    target_sum: float
    surrogate_sum: float


@dataclass(frozen=True)
class _KindConstants:
    per_input_best: np.ndarray
    expected_best: float
    best_in_class: float
    gap: float


class BoundVerifier:
    """Caches per-(distribution, class) constants across many hypotheses.

    Construction validates symmetry of every conditional and that the
    class bound matches the distribution bound; both are assumptions of
    every bound verified here.
    """

    def __init__(self, dist: FiniteDistribution, hclass: HypothesisClass):
        if hclass.bound != dist.bound:
            raise InvalidSpec(
                f"class bound {hclass.bound} must equal distribution bound {dist.bound}"
            )
        self.dist = dist
        self.hclass = hclass
        self.centers = np.array([check_symmetric(p.cond) for p in dist.points])
        self.weights = np.array([p.weight for p in dist.points])
        self._kconst: dict[LossKind, _KindConstants] = {}
        self._masses: dict[tuple, np.ndarray] = {}

    # -- cached pieces ------------------------------------------------------

    def kind_constants(self, kind: LossKind) -> _KindConstants:
        got = self._kconst.get(kind)
        if got is None:
            per_best = np.array(
                [
                    conditional_error(kind, c, p.cond)
                    for c, p in zip(self.centers, self.dist.points)
                ]
            )
            expected = float(self.weights @ per_best)
            best = best_in_class_error(kind, self.hclass, self.dist)
            got = _KindConstants(per_best, expected, best, max(best - expected, 0.0))
            self._kconst[kind] = got
        return got

    def window_masses(self, mode) -> np.ndarray:
        key = (type(mode).__name__, mode.delta if isinstance(mode, HuberWindow) else mode.eps)
        got = self._masses.get(key)
        if got is None:
            out = []
            for c, p in zip(self.centers, self.dist.points):
                offs = c - p.cond.labels
                if isinstance(mode, HuberWindow):
                    inside = (offs >= -EDGE_TOL) & (offs <= mode.delta + EDGE_TOL)
                else:
                    inside = offs >= mode.eps - EDGE_TOL
                out.append(float(p.cond.masses[inside].sum()))
            got = np.array(out)
            self._masses[key] = got
        return got

    def per_input_errors(self, kind: LossKind, values: np.ndarray) -> np.ndarray:
        return np.array(
            [
                float(p.cond.masses @ psi(kind, v - p.cond.labels))
                for v, p in zip(values, self.dist.points)
            ]
        )

    def _values(self, h: Hypothesis) -> np.ndarray:
        if not hypothesis_in_class(h, self.hclass, self.dist):
            raise InvalidSpec("hypothesis is not a member of the hypothesis class")
        return np.array([h.at(i) for i in self.dist.input_ids])

    # -- bound spec construction -------------------------------------------

    def build_spec(self, surrogate: LossKind, values: np.ndarray | None) -> BoundSpec:
        """Auto-build the transform spec for a surrogate.

        ``values`` feeds the data-dependent L1 factor; pass ``None`` to
        fall back to the distribution-free ``4B`` (used by the learning
        bound, where the trained hypothesis is unknown in advance).
        """
        B = self.dist.bound
        fam = surrogate.family
        if fam is LossFamily.EPS:
            raise InvalidSpec(
                "no squared-error comparison transform exists for the "
                "eps-insensitive loss; see the counterexample constructions"
            )
        if fam is LossFamily.HUBER:
            masses = self.window_masses(HuberWindow(surrogate.param))
            pm = float(masses.min())
            if pm <= 0.0:
                raise BoundInapplicable(
                    f"huber window mass is zero for delta={surrogate.param}"
                )
            return BoundSpec(BoundFamily.HUBER, B, param=surrogate.param, p_min=pm)
        if fam is LossFamily.SQEPS:
            masses = self.window_masses(EpsTail(surrogate.param))
            pm = float(masses.min())
            if pm <= 0.0:
                raise BoundInapplicable(
                    f"tail mass is zero for eps={surrogate.param}"
                )
            return BoundSpec(BoundFamily.SQ_EPS, B, param=surrogate.param, p_min=pm)
        p = 2.0 if fam is LossFamily.SQUARED else surrogate.param
        if p == 1.0:
            if values is None:
                return BoundSpec(BoundFamily.L1, B)
            return BoundSpec(BoundFamily.L1, B, sup_factor=self.sup_factor(values))
        if p < 2.0:
            return BoundSpec(BoundFamily.LP_LOW, B, param=p)
        return BoundSpec(BoundFamily.LP_HIGH, B, param=p)

    def sup_factor(self, values: np.ndarray) -> float:
        """max over support atoms of |h(x) - y| + |mean(x) - y|."""
        worst = 0.0
        for v, c, p in zip(values, self.centers, self.dist.points):
            worst = max(
                worst,
                float(np.max(np.abs(v - p.cond.labels) + np.abs(c - p.cond.labels))),
            )
        return worst

    # -- main checks --------------------------------------------------------

    def verify(self, h: Hypothesis, surrogate: LossKind) -> BoundReport:
        values = self._values(h)
        spec = self.build_spec(surrogate, values)
        sq = LossKind.squared()

        kc2 = self.kind_constants(sq)
        err2 = float(self.weights @ self.per_input_errors(sq, values))
        est2 = err2 - kc2.best_in_class
        lhs = est2 + kc2.gap

        kcl = self.kind_constants(surrogate)
        errl = float(self.weights @ self.per_input_errors(surrogate, values))
        estl = errl - kcl.best_in_class
        rhs = gamma_transform(spec, max(estl + kcl.gap, 0.0))

        slack = rhs - lhs
        return BoundReport(
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            holds=slack >= -SLACK_TOL,
            components=BoundComponents(est2, kc2.gap, estl, kcl.gap),
            spec=spec,
            surrogate=surrogate,
        )

    def general(
        self,
        h: Hypothesis,
        surrogate: LossKind,
        transform: Transform,
        alpha_mode: AlphaMode,
        eps: float = 0.0,
    ) -> GeneralReport:
        if eps < 0.0:
            raise InvalidSpec("eps must be >= 0")
        values = self._values(h)
        if surrogate.family is LossFamily.EPS:
            raise InvalidSpec("eps-insensitive loss is not an admissible surrogate")
        sq = LossKind.squared()
        kc2 = self.kind_constants(sq)
        kcl = self.kind_constants(surrogate)

        err2 = self.per_input_errors(sq, values)
        errl = self.per_input_errors(surrogate, values)
        reg2 = np.maximum(err2 - kc2.per_input_best, 0.0)
        regl = np.maximum(errl - kcl.per_input_best, 0.0)

        alphas = self._alphas(surrogate, alpha_mode)

        # per-input premise, checked before any aggregation
        for i, point in enumerate(self.dist.points):
            clipped = reg2[i] if reg2[i] > eps else 0.0
            if transform.shape is TransformShape.CONVEX:
                p_lhs = transform(clipped)
                p_rhs = alphas[i] * regl[i]
            else:
                p_lhs = clipped
                p_rhs = transform(alphas[i] * regl[i])
            if p_lhs > p_rhs + PREMISE_PAD * max(1.0, abs(p_rhs)):
                raise PremiseFailed(
                    f"premise fails at input {point.input_id!r}: "
                    f"{p_lhs:.12g} > {p_rhs:.12g}",
                    input_id=point.input_id,
                    lhs=p_lhs,
                    rhs=p_rhs,
                )

        target_sum = (float(self.weights @ err2) - kc2.best_in_class) + kc2.gap
        surrogate_sum = max(
            (float(self.weights @ errl) - kcl.best_in_class) + kcl.gap, 0.0
        )
        sup_alpha = float(np.max(alphas))

        if transform.shape is TransformShape.CONVEX:
            lhs = transform(max(target_sum, 0.0))
            rhs = sup_alpha * surrogate_sum + transform(eps)
            solved = transform.inverse(rhs)
        else:
            lhs = target_sum
            rhs = transform(sup_alpha * surrogate_sum) + eps
            solved = rhs
        slack = rhs - lhs
        return GeneralReport(
            lhs=lhs,
            rhs=rhs,
            slack=slack,
            holds=slack >= -SLACK_TOL,
            sup_alpha=sup_alpha,
            eps=eps,
            solved_rhs=solved,
            target_sum=target_sum,
            surrogate_sum=surrogate_sum,
        )

    def _alphas(self, surrogate: LossKind, alpha_mode: AlphaMode) -> np.ndarray:
        n = len(self.dist.points)
        if alpha_mode is AlphaMode.ONE:
            return np.ones(n)
        if alpha_mode is AlphaMode.HUBER_WINDOW:
            if surrogate.family is not LossFamily.HUBER:
                raise InvalidSpec("huber_window alpha requires a huber surrogate")
            masses = self.window_masses(HuberWindow(surrogate.param))
        else:
            if surrogate.family is not LossFamily.SQEPS:
                raise InvalidSpec("eps_tail alpha requires a sqeps surrogate")
            masses = self.window_masses(EpsTail(surrogate.param))
        if float(masses.min()) <= 0.0:
            raise BoundInapplicable("per-input mass is zero; alpha is unbounded")
        return 1.0 / masses


def verify_bound_instance(
    dist: FiniteDistribution,
    hclass: HypothesisClass,
    h: Hypothesis,
    surrogate: LossKind,
) -> BoundReport:
    """One-shot form of :meth:`BoundVerifier.verify`."""
    return BoundVerifier(dist, hclass).verify(h, surrogate)


def check_general_theorem(
    dist: FiniteDistribution,
    hclass: HypothesisClass,
    h: Hypothesis,
    surrogate: LossKind,
    transform: Transform,
    alpha_mode: AlphaMode,
    eps: float = 0.0,
) -> GeneralReport:
    """One-shot form of :meth:`BoundVerifier.general`."""
    return BoundVerifier(dist, hclass).general(h, surrogate, transform, alpha_mode, eps)


def natural_general_route(
    verifier: BoundVerifier,
    h: Hypothesis,
    surrogate: LossKind,
    shape: TransformShape,
) -> tuple[Transform, AlphaMode]:
    """Canonical (transform, alpha_mode) instantiation for a surrogate.

    These are exactly the pairs under which the general route reproduces
    the named transforms of :func:`gamma_transform`, used by the
    agreement tests.
    """
    B = verifier.dist.bound
    fam = surrogate.family
    if fam is LossFamily.HUBER:
        c = min(surrogate.param / (2.0 * B), 0.5)
        if shape is TransformShape.CONVEX:
            return Transform.convex_linear(c), AlphaMode.HUBER_WINDOW
        return Transform.concave_linear(1.0 / c), AlphaMode.HUBER_WINDOW
    if fam is LossFamily.SQEPS:
        if shape is TransformShape.CONVEX:
            return Transform.convex_linear(2.0), AlphaMode.EPS_TAIL
        return Transform.concave_linear(0.5), AlphaMode.EPS_TAIL
    if fam is LossFamily.EPS:
        raise InvalidSpec("eps-insensitive loss is not an admissible surrogate")
    p = 2.0 if fam is LossFamily.SQUARED else surrogate.param
    if p == 1.0:
        factor = verifier.sup_factor(verifier._values(h))
        if factor <= 0.0:
            # degenerate only when h matches a deterministic label exactly
            factor = 4.0 * B
        if shape is TransformShape.CONVEX:
            return Transform.convex_linear(1.0 / factor), AlphaMode.ONE
        return Transform.concave_linear(factor), AlphaMode.ONE
    if p < 2.0:
        c = (8.0 * B) ** (p - 2.0) * p * (p - 1.0) / 2.0
        if shape is TransformShape.CONVEX:
            return Transform.convex_linear(c), AlphaMode.ONE
        return Transform.concave_linear(1.0 / c), AlphaMode.ONE
    if shape is TransformShape.CONVEX:
        return Transform.convex_power(p / 2.0), AlphaMode.ONE
    return Transform.concave_power(2.0 / p), AlphaMode.ONE


# -- finite-sample bound ----------------------------------------------------


@dataclass(frozen=True)
class LearningBoundResult:
    rhs_value: float
    rademacher_estimate: float
    deviation_term: float
    surrogate_gap: float
    target_gap: float


def _mesh_sup_pair(kind, candidates, labels, sigma):
    """(sup, sup with flipped signs) of sum_i sigma_i * loss(c, y_i) over the mesh."""
    vals = psi(kind, candidates[:, None] - labels[None, :]) @ sigma
    return float(vals.max()), float((-vals).max())


def evaluate_learning_bound(
    surrogate: LossKind,
    dist: FiniteDistribution,
    hclass: HypothesisClass,
    m: int,
    delta_conf: float,
    seed: int,
    trials: int = 8,
) -> LearningBoundResult:
    """Finite-sample surrogate-to-squared guarantee at confidence 1 - delta_conf.

    Draws ``trials`` seeded samples of size ``m``, estimates the empirical
    Rademacher complexity of the loss class by a mesh supremum (a lower
    bound of the true supremum: candidates are a uniform grid of
    ``grid_size`` values, plus the sampled labels of each input for
    AllBounded, whose per-input decoupling makes the per-group best mesh
    value a feasible hypothesis).  Sign vectors are used in antithetic
    pairs so the averaged estimate is nonnegative by construction.

    Returns the transform of (surrogate gap + 4 * estimate + deviation)
    minus the squared-loss gap, the dominant terms of the guarantee.
    """
    if m < 1:
        raise InvalidSpec("sample size m must be >= 1")
    if not 0.0 < delta_conf < 1.0:
        raise InvalidSpec("delta_conf must be in (0, 1)")
    if trials < 1:
        raise InvalidSpec("trials must be >= 1")

    from .conditional import minimizability_gap  # local to avoid cycle at import

    verifier = BoundVerifier(dist, hclass)
    spec = verifier.build_spec(surrogate, values=None)
    sq = LossKind.squared()
    gap_l = minimizability_gap(surrogate, hclass, dist)
    gap_2 = minimizability_gap(sq, hclass, dist)
    b_l = loss_upper_bound(surrogate, dist.bound)
    deviation = 2.0 * b_l * math.sqrt(math.log(2.0 / delta_conf) / (2.0 * m))

    rng = np.random.default_rng(seed)
    weights = verifier.weights
    n = len(dist.points)
    grid = np.linspace(-dist.bound, dist.bound, hclass.grid_size)

    total = 0.0
    for _ in range(trials):
        idx = rng.choice(n, size=m, p=weights)
        labels = np.empty(m)
        for j, point in enumerate(dist.points):
            sel = idx == j
            k = int(sel.sum())
            if k:
                labels[sel] = rng.choice(point.cond.labels, size=k, p=point.cond.masses)
        sigma = rng.integers(0, 2, size=m) * 2.0 - 1.0

        if isinstance(hclass, ConstantBounded):
            up, down = _mesh_sup_pair(surrogate, grid, labels, sigma)
        else:
            up = down = 0.0
            for j, point in enumerate(dist.points):
                sel = idx == j
                if not sel.any():
                    continue
                cands = np.concatenate([grid, point.cond.labels])
                u, d = _mesh_sup_pair(surrogate, cands, labels[sel], sigma[sel])
                up += u
                down += d
        total += 0.5 * (up + down) / m

    estimate = total / trials
    rhs = gamma_transform(spec, gap_l + 4.0 * estimate + deviation) - gap_2
    return LearningBoundResult(
        rhs_value=rhs,
        rademacher_estimate=estimate,
        deviation_term=deviation,
        surrogate_gap=gap_l,
        target_gap=gap_2,
    )
