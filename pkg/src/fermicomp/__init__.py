"""Desk-scale fermionic quantum information: parity superselection, typical
subspaces, and source-coding sweeps."""

from .channels import (
    ClosenessResult,
    Effect,
    FermionicChannel,
    KrausOperator,
    apply,
    classify_parity,
    closeness_upon_input,
    compose_sequential,
    connect_purifications,
    entanglement_fidelity,
    entanglement_fidelity_via_purification,
    extend,
    identity_channel,
    new_channel,
    parallel_compose,
    parity_channel,
    random_channel,
    random_even_povm,
    random_even_unitary,
    refinements_from_vector,
    sample_refinements,
    validate_effect,
)
from .compression import (
    CompressionScheme,
    ConverseResult,
    ReliabilityReport,
    build_scheme,
    converse_scheme_fidelity,
    reliability_report,
    scheme_fidelity,
    scheme_fidelity_dense,
    source_state,
)
from .errors import FermionicError
from .fock import (
    CarReport,
    FieldPolynomial,
    ModeOrdering,
    double_ket,
    double_ket_inv,
    fswap_adjacent,
    jw_field,
    matrix_to_poly,
    poly_to_matrix,
    reorder_modes,
    reorder_unitary,
    vacuum_projector,
    validate_car,
)
from .linalg import (
    EigenDecomposition,
    eig_hermitian,
    matrix_log_psd,
    matrix_sqrt_psd,
    trace_norm,
    uhlmann_fidelity_matrices,
)
from .states import (
    FermionicState,
    Purification,
    compose,
    entropy,
    fermionic_trace,
    fidelity,
    log_state,
    minimal_purification,
    new_state,
    partial_trace,
    pure_state,
    random_blocked_state,
    sqrt_state,
    trace_distance,
    vacuum_state,
)
from .typicality import (
    SpectralSource,
    TypeClass,
    TypicalSpec,
    best_rank_mass,
    is_typical,
    iter_type_classes,
    make_spec,
    spectral_source,
    typical_dim,
    typical_mass,
    typical_projector_dense,
)

__version__ = "0.1.0"
