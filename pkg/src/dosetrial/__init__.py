"""Bayesian adaptive dose-finding models, pathway planning, CLI and service."""

from .outcomes import (
    Alphabet,
    OutcomeParseError,
    OutcomeSequence,
    PatientRecord,
    from_vectors,
    parse_outcomes,
    serialize_outcomes,
)
from .mcmc import (
    GridOracle,
    PosteriorDraws,
    SamplerConfig,
    SamplingError,
    TargetDensity,
    grid_oracle,
    sample,
)
from .crm import CrmModel
from .efftox import (
    EffToxModel,
    joint_prob,
    solve_contour_exponent,
    standardize_doses,
    utility,
)
from .augbin import (
    AugBinDataset,
    AugBinModel,
    binary_prob_success,
    prior_predictive_2t_1a,
    simulate_scenario,
)
from .pathways import (
    NodeBudgetError,
    PathwayNode,
    PathwayTree,
    careful_escalation,
    compute_dtps,
    count_pathway_nodes,
    default_policy,
    enumerate_cohort_outcomes,
    export_graph,
    make_careful_policy,
    spread_paths,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "OutcomeParseError",
    "OutcomeSequence",
    "PatientRecord",
    "from_vectors",
    "parse_outcomes",
    "serialize_outcomes",
    "GridOracle",
    "PosteriorDraws",
    "SamplerConfig",
    "SamplingError",
    "TargetDensity",
    "grid_oracle",
    "sample",
    "CrmModel",
    "EffToxModel",
    "joint_prob",
    "solve_contour_exponent",
    "standardize_doses",
    "utility",
    "AugBinDataset",
    "AugBinModel",
    "binary_prob_success",
    "prior_predictive_2t_1a",
    "simulate_scenario",
    "NodeBudgetError",
    "PathwayNode",
    "PathwayTree",
    "careful_escalation",
    "compute_dtps",
    "count_pathway_nodes",
    "default_policy",
    "enumerate_cohort_outcomes",
    "export_graph",
    "make_careful_policy",
    "spread_paths",
]
