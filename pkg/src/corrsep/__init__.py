"""Correlation-tensor separability criteria, witnesses and local filtering."""

from .bases import OperatorBasis, SicPovm, canonical_basis, sic_basis, sic_povm, validate_basis
from .correlation import CorrelationTensor, bloch_vector, correlation_tensor, scale
from .criteria import (
    CriterionReport,
    esic_direct,
    family_gap,
    multipartite_gap,
    named_criterion,
    optimize_xy,
    ppt_check,
    tensor_nuclear_lower_bound,
    threshold_scan,
)
from .estimators import (
    CorrelationTransformer,
    FamilyWitness,
    LocalFilter,
    ScalingSearch,
    SeparabilityCriterion,
    check_states,
)
from .filtering import filtered_dv_gap, local_filter_normal_form
from .states import DensityMatrix
from .witnesses import Witness, build_witness, witness_expectation

__version__ = "0.1.0"

__all__ = [
    "CorrelationTensor",
    "CorrelationTransformer",
    "CriterionReport",
    "DensityMatrix",
    "FamilyWitness",
    "LocalFilter",
    "OperatorBasis",
    "ScalingSearch",
    "SeparabilityCriterion",
    "SicPovm",
    "Witness",
    "bloch_vector",
    "build_witness",
    "canonical_basis",
    "check_states",
    "correlation_tensor",
    "esic_direct",
    "family_gap",
    "filtered_dv_gap",
    "local_filter_normal_form",
    "multipartite_gap",
    "named_criterion",
    "optimize_xy",
    "ppt_check",
    "scale",
    "sic_basis",
    "sic_povm",
    "tensor_nuclear_lower_bound",
    "threshold_scan",
    "validate_basis",
    "witness_expectation",
]
