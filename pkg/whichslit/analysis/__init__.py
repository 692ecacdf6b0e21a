"""
Constraint checking, case labels, solution families and the projector search.
"""

from whichslit.analysis.cases import CaseLabel, classify_case
from whichslit.analysis.checker import (
    CONDITIONS,
    CheckReport,
    ConditionResult,
    Correlation,
    CorrelationClass,
    NondisturbanceReport,
    ProblemInstance,
    check_problem,
    classify_correlation,
    conditional_probability,
    verify_nondisturbing,
)
from whichslit.analysis.families import (
    INFERENCE_MAP,
    EswSetup,
    FamilyParams,
    FamilyTag,
    InfeasibilityCertificate,
    Sec6Setup,
    ansatz_subspace_dim4,
    audit_mu0_printed_constants,
    build_family,
    dim2_infeasibility,
    esw_instance,
    family_dim4_general,
    family_dim4_mu0,
    family_dim4_sym,
    family_dim6,
    fit_dim4_sym,
    fit_dim6,
    mirror_instance,
    sec6_instance,
)
from whichslit.analysis.solver import (
    ConstraintSubspace,
    ProjectorSearch,
    SolverOptions,
    SolverReport,
    build_constraint_subspace,
    find_projector,
    projector_gradient,
    projector_objective,
    search_solutions,
)

__all__ = [
    "CONDITIONS",
    "INFERENCE_MAP",
    "CaseLabel",
    "CheckReport",
    "ConditionResult",
    "ConstraintSubspace",
    "Correlation",
    "CorrelationClass",
    "EswSetup",
    "FamilyParams",
    "FamilyTag",
    "InfeasibilityCertificate",
    "NondisturbanceReport",
    "ProblemInstance",
    "ProjectorSearch",
    "Sec6Setup",
    "SolverOptions",
    "SolverReport",
    "ansatz_subspace_dim4",
    "audit_mu0_printed_constants",
    "build_constraint_subspace",
    "build_family",
    "check_problem",
    "classify_case",
    "classify_correlation",
    "conditional_probability",
    "dim2_infeasibility",
    "esw_instance",
    "family_dim4_general",
    "family_dim4_mu0",
    "family_dim4_sym",
    "family_dim6",
    "find_projector",
    "fit_dim4_sym",
    "fit_dim6",
    "mirror_instance",
    "projector_gradient",
    "projector_objective",
    "search_solutions",
    "sec6_instance",
    "verify_nondisturbing",
]
