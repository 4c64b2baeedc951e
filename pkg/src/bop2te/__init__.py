"""Exact design engine and decision console for phase II trials that jointly
monitor binary efficacy and toxicity with posterior cutoff rules."""

from .betainc import betainc_regularized, log_beta
from .design import (
    CutoffParameters,
    DesignSpec,
    InterimDecision,
    Look,
    StoppingBoundaries,
    TrialData,
    cutoff_efficacy,
    cutoff_toxicity,
    derive_boundaries,
    interim_decision,
)
from .errors import (
    Bop2teError,
    ConflictError,
    MissingResultError,
    NotFoundError,
    SizeLimitError,
    ValidationError,
)
from .mc import (
    ArmResult,
    DoseOptimizationSpec,
    MonteCarloOC,
    MultiDoseResult,
    SimulationConfig,
    estimate_oc,
    pava,
    select_optimal_dose,
    simulate_multidose,
    simulate_trial,
)
from .oc import (
    OperatingCharacteristics,
    brute_force_claim_probability,
    claim_probability,
    continuation_distribution,
    hypothesis_claim_probabilities,
    joint_stage_pmf,
    operating_characteristics,
    phi_sensitivity_curve,
    stage_pmf_table,
    theorem1_residual,
)
from .probability import (
    OddsRatio,
    OutcomeProbabilities,
    PriorHyperparameters,
    beta_posterior_tail,
    binomial_pmf_vector,
    cells_from_margins,
    frechet_bounds,
    log_binomial_pmf,
    phi_from_pi_et,
    pi_et_from_phi,
)
from .search import (
    OptimizationResult,
    global_boundary_search,
    optimize,
    parameter_grid,
)
from .store import DecisionLogEntry, DesignDocument, Store, design_id_for

__version__ = "0.1.0"

__all__ = [
    "ArmResult",
    "Bop2teError",
    "ConflictError",
    "CutoffParameters",
    "DecisionLogEntry",
    "DesignDocument",
    "DesignSpec",
    "DoseOptimizationSpec",
    "InterimDecision",
    "Look",
    "MissingResultError",
    "MonteCarloOC",
    "MultiDoseResult",
    "NotFoundError",
    "OddsRatio",
    "OperatingCharacteristics",
    "OptimizationResult",
    "OutcomeProbabilities",
    "PriorHyperparameters",
    "SimulationConfig",
    "SizeLimitError",
    "StoppingBoundaries",
    "Store",
    "TrialData",
    "ValidationError",
    "beta_posterior_tail",
    "betainc_regularized",
    "binomial_pmf_vector",
    "brute_force_claim_probability",
    "cells_from_margins",
    "claim_probability",
    "continuation_distribution",
    "cutoff_efficacy",
    "cutoff_toxicity",
    "derive_boundaries",
    "design_id_for",
    "estimate_oc",
    "frechet_bounds",
    "global_boundary_search",
    "hypothesis_claim_probabilities",
    "interim_decision",
    "joint_stage_pmf",
    "log_beta",
    "log_binomial_pmf",
    "operating_characteristics",
    "optimize",
    "parameter_grid",
    "pava",
    "phi_from_pi_et",
    "phi_sensitivity_curve",
    "pi_et_from_phi",
    "select_optimal_dose",
    "simulate_multidose",
    "simulate_trial",
    "stage_pmf_table",
    "theorem1_residual",
]
