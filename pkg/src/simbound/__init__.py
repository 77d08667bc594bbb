"""Bounds on test-set overfitting when many similar models share one holdout set."""
from .bounds import (
    BoundResult,
    EnsembleSpec,
    bound_probability,
    joint_tail,
    naive_bayes_prob,
    similarity_union_prob,
    standard_union_prob,
)
from .coupling import (
    CouplingParams,
    NaiveBayesParams,
    PairwiseJoint,
    factorize,
    independence_similarity,
    joint_from_marginals,
    nb_params,
)
from .cover import CoverResult, cover_curve, greedy_cover, verify_cover
from .dataio import (
    DifficultyHistogram,
    PredictionMatrix,
    SimilaritySummary,
    difficulty_histogram,
    load_matrix,
    summarize,
)
from .errors import (
    CouplingInfeasibleError,
    DomainError,
    InfeasibleError,
    InfeasibleTripleError,
    NaiveBayesInfeasibleError,
    ParseError,
    SimboundError,
)
from .numerics import binom_cdf, binom_sf, log_binom_coeff, two_sided_dev_tail
from .planner import PlanQuery, PlanResult, gains, max_models

__version__ = "0.1.0"
