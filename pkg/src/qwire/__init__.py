"""Scattering, localization and spectral tools for 1-D disordered quantum wires.

Finite chains are handled through transfer-matrix products and the
canonical three-term recursion; the thermodynamic limit is handled by
solving functional equations for per-species phase distribution functions,
which yield the localization length and the density of states without any
finite-size averaging.
"""

__version__ = "0.1.0"

from . import errors
from .canonical import (
    CanonicalCoefficients,
    CanonicalModel,
    PhasePoint,
    canonical_step,
    coefficients_from_matrix,
    gap_condition,
    general_coefficients,
    j_from_coefficients,
    normalize_phase,
    phase_forward,
    phase_inverse,
    radius_factor,
)
from .chain import (
    DisorderSpec,
    LatticeTransmission,
    StateTrajectory,
    WireSequence,
    constant_sequence,
    generate_sequence,
    propagate_canonical,
    transmission_discretized,
    transmission_matrix_chain,
    transmission_p_matrix,
    write_sequence,
)
from .models import (
    TabulatedModel,
    TightBindingModel,
    TightBindingSpecies,
    binary_species,
    model_from_matrices,
    pure_chain_dos,
    pure_chain_idos,
    pure_chain_lambda,
    tb_model,
)
from .observables import (
    LyapunovEstimate,
    NodeCountTally,
    NodeDosResult,
    complex_lyapunov,
    idos_from_transmission_phase,
    ipr,
    lce_pair_defect,
    lyapunov_from_log_transmission,
    lyapunov_from_state,
    lyapunov_from_transmission,
    node_count_dos,
    sign_change_tally,
)
from .tlsolver import (
    PhaseDistributionTable,
    SolverReport,
    TlDosResult,
    empirical_phase_cdf,
    functional_operator,
    ks_distance,
    simplified_operator,
    solve_phase_distributions,
    solve_simplified,
    tl_dos,
    tl_localization_length,
    tl_lyapunov,
)
from .xfer import (
    ScatteringAmplitudes,
    SymmetryClass,
    TransferMatrix,
    apply_cutoff,
    asymptotic_matrix_from_solutions,
    classify_symmetry,
    compose,
    compose_scattering,
    delta_matrix,
    identity,
    random_su11,
    scattering_amplitudes,
)

__all__ = [name for name in dir() if not name.startswith("_")]
