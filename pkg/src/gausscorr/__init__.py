"""Rényi-2 toolbox for Gaussian quantum correlations and CARL three-mode dynamics."""

from .carl import (
    CarlParams,
    CarlReport,
    RecoilInputs,
    carl_state_report,
    drift_matrix,
    evolve_cm,
    evolve_cm_rk4,
    hamiltonian_matrix,
    recoil_parameter,
)
from .correlations import (
    DiscordResult,
    EntanglementResult,
    MeasurementSeed,
    OptimizerConfig,
    PPTResult,
    PurityError,
    ResidualResult,
    conditional_cm,
    discord,
    gaussian_entanglement,
    is_ppt,
    pure_entanglement,
    residual_tripartite,
)
from .nonlocality import (
    SettingsVector,
    SvetlichnyResult,
    mermin_klyshko,
    optimize_svetlichny,
    parity_correlation,
    svetlichny,
)
from .symplectic import (
    CovarianceError,
    MalformedCMError,
    ModePartition,
    NumericalDomainError,
    UnphysicalCMError,
    Validity,
    as_cm,
    mode_populations,
    partial_transpose,
    reduce,
    renyi2_entropy,
    symplectic_eigenvalues,
    symplectic_form,
    thermal,
    two_mode_squeezed_vacuum,
    validate_cm,
    wigner,
    williamson,
)

__version__ = "0.1.0"
