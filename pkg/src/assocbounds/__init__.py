"""Exponential upper bounds for P(X=0) where X sums positively associated
indicators, with exact oracles, Monte Carlo validation, and a CLI."""

from .bounds import (
    BoundResult,
    SkippedBound,
    boppona_spencer,
    boutsikas_koutras,
    evaluate_all,
    independent_lower,
    janson_basic,
    janson_ratio,
    lv_general,
    lv_iid,
    lv_optimal,
    tightest_upper,
)
from .family import FamilySummary, ModelSpec, validate
from .models import (
    FIRST_PRINCIPLES,
    PAPER_AS_PRINTED,
    hypergraph_edge_prob,
    hypergraph_joint_probs,
    hypergraph_summary,
    runs_poisson_band,
    runs_summary,
    sample_is_zero,
    summary_for,
    triangles_summary,
    ustat_summary,
)
from .numerics import (
    ConfidenceInterval,
    LogProb,
    clopper_pearson,
    log_add,
    log_binom,
    minimize_scalar,
)
from .oracles import (
    DEFAULT_SEED,
    EstimateWithCI,
    cover_all_exact,
    mgf_gap_check,
    monte_carlo,
    oracle_for,
    random_monotone_joint,
    runs_zero_exact,
    triangle_free_exact,
    ustat_zero_exact,
)

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "ConfidenceInterval",
    "DEFAULT_SEED",
    "EstimateWithCI",
    "FIRST_PRINCIPLES",
    "FamilySummary",
    "LogProb",
    "ModelSpec",
    "PAPER_AS_PRINTED",
    "SkippedBound",
    "boppona_spencer",
    "boutsikas_koutras",
    "clopper_pearson",
    "cover_all_exact",
    "evaluate_all",
    "hypergraph_edge_prob",
    "hypergraph_joint_probs",
    "hypergraph_summary",
    "independent_lower",
    "janson_basic",
    "janson_ratio",
    "log_add",
    "log_binom",
    "lv_general",
    "lv_iid",
    "lv_optimal",
    "mgf_gap_check",
    "minimize_scalar",
    "monte_carlo",
    "oracle_for",
    "random_monotone_joint",
    "runs_poisson_band",
    "runs_summary",
    "runs_zero_exact",
    "sample_is_zero",
    "summary_for",
    "tightest_upper",
    "triangle_free_exact",
    "triangles_summary",
    "ustat_summary",
    "ustat_zero_exact",
    "validate",
]
