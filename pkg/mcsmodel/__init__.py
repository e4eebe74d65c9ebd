"""MCS model package - maximum common subelement models, graph distances and GED."""

from .errors import (
    McsError,
    InputError,
    CapExceededError,
    ModelViolationError,
    ContractViolationError,
)
from .rational import parse_rational, format_rational
from .core_model import (
    FiniteMcsModel,
    MetricKind,
    AxiomTag,
    AxiomReport,
    Violation,
    common_subelements,
    max_common_size,
    max_common_subelements,
    metric_value,
    distance,
    check_axioms,
    check_metric_table,
    check_metric_laws,
    check_aux_inequality,
    check_global_subelement,
    min_size_element,
    power_set_model,
    chain_model,
    discrete_model,
)
from .graphs import (
    LabeledGraph,
    LabelWeighting,
    Embedding,
    EmbeddingKind,
    EPS_V,
    EPS_E,
    is_isomorphic,
    subgraph_isomorphic,
    induced_subgraph_isomorphic,
    extended_subgraph_isomorphic,
    completion,
    size_gve,
    size_gv,
    size_ges,
    canonical_form,
    graph_universe,
)
from .mcs_solvers import (
    GraphModelKind,
    SolverParams,
    McsResult,
    Witness,
    mcs_brute_force,
    mcs_solve,
    graph_distance,
    distance_matrix,
)
from .metric2model import (
    FiniteMetricSpace,
    DerivedElement,
    enumerate_connected_edge_subsets,
    build_model,
    verify_recovery,
    random_metric_space,
)
from .ged import (
    EditCostTables,
    GedResult,
    CorrespondenceContext,
    GedCorrespondenceReport,
    ged_brute_force,
    validate_cost_metric,
    build_correspondence,
    embed,
    mcs_size_on_complete,
    per_bijection_identity,
    verify_ged_correspondence,
)

__all__ = [
    "McsError",
    "InputError",
    "CapExceededError",
    "ModelViolationError",
    "ContractViolationError",
    "parse_rational",
    "format_rational",
    "FiniteMcsModel",
    "MetricKind",
    "AxiomTag",
    "AxiomReport",
    "Violation",
    "common_subelements",
    "max_common_size",
    "max_common_subelements",
    "metric_value",
    "distance",
    "check_axioms",
    "check_metric_table",
    "check_metric_laws",
    "check_aux_inequality",
    "check_global_subelement",
    "min_size_element",
    "power_set_model",
    "chain_model",
    "discrete_model",
    "LabeledGraph",
    "LabelWeighting",
    "Embedding",
    "EmbeddingKind",
    "EPS_V",
    "EPS_E",
    "is_isomorphic",
    "subgraph_isomorphic",
    "induced_subgraph_isomorphic",
    "extended_subgraph_isomorphic",
    "completion",
    "size_gve",
    "size_gv",
    "size_ges",
    "canonical_form",
    "graph_universe",
    "GraphModelKind",
    "SolverParams",
    "McsResult",
    "Witness",
    "mcs_brute_force",
    "mcs_solve",
    "graph_distance",
    "distance_matrix",
    "FiniteMetricSpace",
    "DerivedElement",
    "enumerate_connected_edge_subsets",
    "build_model",
    "verify_recovery",
    "random_metric_space",
    "EditCostTables",
    "GedResult",
    "CorrespondenceContext",
    "GedCorrespondenceReport",
    "ged_brute_force",
    "validate_cost_metric",
    "build_correspondence",
    "embed",
    "mcs_size_on_complete",
    "per_bijection_identity",
    "verify_ged_correspondence",
]
