"""Gaussian-state dynamics under local thermal and squeezed-thermal baths.

Covariance-level channels, Simon classicality and PPT separability tests,
quantum-to-classical and entanglement-sudden-death times, and a truncated
Fock-space master-equation oracle.
"""

from .channels import (
    BathSpec,
    GaussianChannel,
    apply,
    asymptotic_covariance,
    bath_channel,
    compose,
    evolve,
    extend_local,
    squeezed_channel,
    thermal_channel,
)
from .criteria import (
    SymmetricTwoModeState,
    TransitionResult,
    classicality_time,
    esd_time,
    esd_time_symmetric,
    is_separable_two_mode,
    squeezed_classicality_bound,
    t_max,
)
from .errors import (
    BathKindError,
    ConvergenceError,
    DimensionError,
    DomainError,
    TruncationError,
    UnphysicalStateError,
)
from .phase_space import (
    CovarianceMatrix,
    GaussianPFunction,
    PhaseSpacePoint,
    characteristic_function,
    evolve_coherent_p,
    is_classical,
    min_eigenvalue,
    symplectic_eigenvalues,
    symplectic_form,
    validate_state,
)

__version__ = "0.1.0"
