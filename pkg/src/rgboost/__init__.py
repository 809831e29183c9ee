"""Restricted gradient boosting over an empirical L2 function space."""

from .fspace import SampleSpace, FnVec, inner, norm, combine
from .objectives import (
    LabeledData, OptimalReference, SquaredLoss, ExponentialLoss, BinaryHinge, MulticlassHinge,
    PairwiseRankingHinge, TwoPointAbs, regularize, pointwise_optimum, subgradient_oracle, make_objective,
)
from .learners import (
    ProjectionMode, Stump, EnumeratedClass, RegressionStumps, BinaryStumps, MulticlassStumps,
    ConstantLearner, fit_regression_stump, fit_binary_stump, fit_multiclass_stump, fit_enumerated,
    fit_constant,
)
from .descent import (
    Ensemble, TrainReport, Fixed, InvLambdaT, InvSqrtT, LineSearch, FixedPerIteration, Threshold,
    project_coefficient, line_search, run_naive, run_repeated, run_residual,
)
from .edge import realized_edge, class_edge, EdgeEstimate, WeightedClassification

__version__ = "0.1.0"
