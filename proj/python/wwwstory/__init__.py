"""Document-count meaning bonds, overextension analysis and quantum conjunction models."""

from ._core import (
    CountProvider,
    Error,
    FitFailure,
    Index,
    MeasureError,
    MissingObservationError,
    canonical_query,
    conditional_probability,
    ee_fallacy_classification,
    ee_feasible_interference_bound,
    ee_fit,
    ee_forward,
    landing_probability,
    local_provider,
    local_provider_from_documents,
    meaning_bond,
    oe_demo,
    oe_fit,
    oe_forward,
    recorded_provider,
    tokenize,
)

__all__ = [
    "CountProvider",
    "Error",
    "FitFailure",
    "Index",
    "MeasureError",
    "MissingObservationError",
    "canonical_query",
    "conditional_probability",
    "ee_fallacy_classification",
    "ee_feasible_interference_bound",
    "ee_fit",
    "ee_forward",
    "landing_probability",
    "local_provider",
    "local_provider_from_documents",
    "meaning_bond",
    "oe_demo",
    "oe_fit",
    "oe_forward",
    "recorded_provider",
    "tokenize",
]
