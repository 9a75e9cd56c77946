"""surreg: surrogate-regret comparison bounds for bounded regression.

The library answers one family of questions: when a hypothesis is trained
against a surrogate loss (Huber, power, eps-insensitive variants) on a
label distribution that is symmetric and bounded per input, how much
squared-error regret can it still have?  It provides the loss toolbox,
exact conditional risks on finite distributions, verified comparison
transforms with their supporting two-point lemmas, breaking
constructions for regimes where no transform exists, a finite-sample
guarantee, and an adversarially robust linear trainer that puts the
bounds to work.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BoundInapplicable,
    ConfigInfeasible,
    DimensionMismatch,
    DomainViolation,
    InvalidDistribution,
    InvalidParams,
    InvalidSpec,
    MissingPrediction,
    NonConvergence,
    NotSymmetric,
    NumericalInconsistency,
    ParseError,
    PremiseFailed,
    SurregError,
    SymmetryViolation,
)
from .losses import (
    LossFamily,
    LossKind,
    loss_subgradient,
    loss_upper_bound,
    loss_value,
    parse_loss_tag,
    psi,
    psi_subgradient,
)
from .distributions import (
    Conditional,
    DistPoint,
    EpsTail,
    FiniteDistribution,
    GeneratorConfig,
    HuberWindow,
    check_symmetric,
    conditional_mean,
    distribution_to_config,
    is_symmetric,
    load_distribution,
    p_min,
    random_symmetric_distribution,
)
from .conditional import (
    AllBounded,
    BestMethod,
    ConstantBounded,
    Hypothesis,
    best_conditional_error,
    best_in_class_error,
    clipped_regret,
    conditional_error,
    conditional_regret,
    generalization_error,
    hypothesis_in_class,
    minimizability_gap,
)
from .bounds import (
    AlphaMode,
    BoundFamily,
    BoundReport,
    BoundSpec,
    BoundVerifier,
    GeneralReport,
    LearningBoundResult,
    Transform,
    TransformShape,
    check_general_theorem,
    evaluate_learning_bound,
    gamma_transform,
    natural_general_route,
    verify_bound_instance,
)
from .lemmas import (
    HuberF,
    LpClarkson,
    LpLowF,
    SqEpsF,
    check_lemma_grid,
    pair_deviation,
)
from .counterexamples import (
    Counterexample,
    CounterexampleParams,
    TheoremTag,
    build_counterexample,
)
from .adversarial import (
    AdvSqObjective,
    Dataset,
    EvalResult,
    LinearModel,
    PerturbNorm,
    SmoothAdvObjective,
    SolverConfig,
    TrainResult,
    adv_squared_loss,
    dual_norm,
    evaluate,
    smooth_adv_loss,
    smoothness_term,
    train,
)
from .datagen import (
    SynthConfig,
    TwoPoint,
    TwoPointWithOutliers,
    UniformSym,
    load_csv_dataset,
    make_synthetic,
    save_csv_dataset,
)
