"""Vector-bias malaria model with bed-net control.

Simulation, equilibrium and bifurcation analysis (including backward
bifurcation detection), numerical global-stability certification, and
sensitivity analysis of the basic reproduction number.
"""

from .bifurcation import (
    BifurcationReport,
    BranchPoint,
    bifurcation_report,
    centre_manifold_coefficients,
    critical_p2,
    eigenvectors_at_criticality,
    saddle_node_r0,
    sweep_branch,
    theta,
    theta_derivatives,
)
from .equilibria import (
    EndemicEquilibrium,
    EquilibriumSet,
    QuadraticCoefficients,
    backward_window,
    basic_reproduction_number,
    disease_free_equilibrium,
    endemic_equilibria,
    quadratic_coefficients,
)
from .errors import (
    CriticalityError,
    DegenerateStateError,
    InternalConsistencyError,
    NotAnEquilibriumError,
    ParameterError,
    RegionExitError,
    StepSizeUnderflowError,
)
from .model import (
    ForceOfInfection,
    ModelParams,
    StateFull,
    StateReduced,
    contact_rate,
    forces_of_infection,
    in_region,
    mosquito_death_rate,
    reduced_state,
    rhs_full,
    rhs_reduced,
    vector_capacity,
)
from .params import TABLE1, load_params
from .sensitivity import (
    SensitivityReport,
    critical_bednet_coverage,
    grid_surface,
    sensitivity_indices,
)
from .simulate import Trajectory, detect_convergence, integrate
from .stability import (
    LozinskiiCertificate,
    StabilityVerdict,
    certify_global_stability,
    classify,
    jacobian_full,
    jacobian_reduced,
    lozinskii_terms,
    lozinskii_terms_direct,
    second_additive_compound,
)

__all__ = [
    "BifurcationReport", "BranchPoint", "CriticalityError", "DegenerateStateError",
    "EndemicEquilibrium", "EquilibriumSet", "ForceOfInfection",
    "InternalConsistencyError", "LozinskiiCertificate", "ModelParams",
    "NotAnEquilibriumError", "ParameterError", "QuadraticCoefficients",
    "RegionExitError", "SensitivityReport", "StabilityVerdict", "StateFull",
    "StateReduced", "StepSizeUnderflowError", "TABLE1", "Trajectory",
    "backward_window", "basic_reproduction_number", "bifurcation_report",
    "centre_manifold_coefficients", "certify_global_stability", "classify",
    "contact_rate", "critical_bednet_coverage", "critical_p2",
    "detect_convergence", "disease_free_equilibrium", "eigenvectors_at_criticality",
    "endemic_equilibria", "forces_of_infection", "grid_surface", "in_region",
    "integrate", "jacobian_full", "jacobian_reduced", "load_params",
    "lozinskii_terms", "lozinskii_terms_direct", "mosquito_death_rate",
    "quadratic_coefficients", "reduced_state", "rhs_full", "rhs_reduced",
    "saddle_node_r0", "second_additive_compound", "sensitivity_indices",
    "sweep_branch", "theta", "theta_derivatives", "vector_capacity",
]

__version__ = "0.1.0"
